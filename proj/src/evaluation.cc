// Copyright 2026 The PeGS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pegs/evaluation.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "pegs/error.h"

namespace pegs {
namespace {

void RequireNonEmpty(const Dataset& dataset, const char* what) {
  if (dataset.num_rows() == 0) ThrowData(std::string(what) + " dataset is empty");
}

void RequireSameSchema(const Dataset& a, const Dataset& b) {
  if (a.num_features() != b.num_features()) {
    ThrowData("datasets have different numbers of features");
  }
  for (int i = 0; i < a.num_features(); ++i) {
    if (a.schema().num_categories(i) != b.schema().num_categories(i)) {
      ThrowData("datasets disagree on the categories of feature '" +
                a.schema().feature(i).name + "'");
    }
  }
}

void RequireFeatureIndex(const Schema& schema, int feature) {
  if (feature < 0 || feature >= schema.num_features()) {
    ThrowUsage("feature index " + std::to_string(feature) + " out of range");
  }
}

std::vector<double> Frequencies(const Dataset& dataset, int feature) {
  std::vector<double> freq(dataset.schema().num_categories(feature), 0.0);
  for (int r = 0; r < dataset.num_rows(); ++r) freq[dataset.at(r, feature)] += 1;
  for (double& f : freq) f /= dataset.num_rows();
  return freq;
}

// Packs a projection onto `features` into one integer.
class Projector {
 public:
  Projector(const Schema& schema, std::span<const int> features)
      : features_(features.begin(), features.end()) {
    std::uint64_t space = 1;
    for (int f : features_) {
      RequireFeatureIndex(schema, f);
      const auto c = static_cast<std::uint64_t>(schema.num_categories(f));
      if (space > std::numeric_limits<std::uint64_t>::max() / c) {
        ThrowUsage("too many conditioning features");
      }
      space *= c;
      radices_.push_back(c);
    }
  }

  std::uint64_t operator()(std::span<const Category> row) const {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < features_.size(); ++k) {
      key = key * radices_[k] + static_cast<std::uint64_t>(row[features_[k]]);
    }
    return key;
  }

 private:
  std::vector<int> features_;
  std::vector<std::uint64_t> radices_;
};

void RequireAttackArgs(const Dataset& orig, const Dataset& synth, int target,
                       std::span<const int> given) {
  if (synth.num_rows() == 0) ThrowData("synthetic dataset is empty");
  RequireSameSchema(orig, synth);
  RequireFeatureIndex(orig.schema(), target);
  if (given.empty()) ThrowUsage("attack needs at least one conditioning feature");
  if (std::find(given.begin(), given.end(), target) != given.end()) {
    ThrowUsage("attack target cannot also be a conditioning feature");
  }
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double LogisticLogLikelihood(const DesignMatrix& d, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = d.x * beta;
  double ll = 0.0;
  for (Eigen::Index r = 0; r < eta.size(); ++r) {
    ll += d.y[r] * eta[r] - Softplus(eta[r]);
  }
  return ll;
}

RegressionFit FitLinear(const DesignMatrix& d) {
  RegressionFit fit;
  fit.names = d.names;
  const Eigen::Index n = d.x.rows();
  const Eigen::Index p = d.x.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.x);
  Eigen::MatrixXd gram = d.x.transpose() * d.x;
  if (qr.rank() == p) {
    fit.coefficients = qr.solve(d.y);
  } else {
    fit.warnings.push_back("design matrix is rank deficient; ridge 1e-8 applied");
    gram.diagonal().array() += 1e-8;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) ThrowData("least-squares system is singular");
  if (qr.rank() != p) fit.coefficients = ldlt.solve(d.x.transpose() * d.y);
  if (!fit.coefficients.allFinite()) ThrowData("least-squares fit is not finite");
  const Eigen::VectorXd resid = d.y - d.x * fit.coefficients;
  const double sigma2 = n > p ? resid.squaredNorm() / static_cast<double>(n - p) : 0.0;
  fit.variances =
      sigma2 * ldlt.solve(Eigen::MatrixXd::Identity(p, p)).diagonal();
  return fit;
}

RegressionFit FitLogistic(const DesignMatrix& d) {
  constexpr int kMaxIterations = 100;
  constexpr double kTolerance = 1e-8;
  // |logit| beyond this puts a fitted probability within 1e-10 of 0 or 1.
  constexpr double kSaturatedLogit = 23.0;
  RegressionFit fit;
  fit.names = d.names;
  const Eigen::Index n = d.x.rows();
  const Eigen::Index p = d.x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double ll = LogisticLogLikelihood(d, beta);
  Eigen::MatrixXd hessian(p, p);
  Eigen::VectorXd grad(p), w(n), prob(n);
  bool converged = false;
  int iter = 0;
  for (; iter <= kMaxIterations; ++iter) {
    const Eigen::VectorXd eta = d.x * beta;
    for (Eigen::Index r = 0; r < n; ++r) {
      prob[r] = Sigmoid(eta[r]);
      w[r] = prob[r] * (1.0 - prob[r]);
    }
    grad = d.x.transpose() * (d.y - prob) * inv_n;
    if (grad.lpNorm<Eigen::Infinity>() <= kTolerance) {
      converged = true;
      break;
    }
    if (iter == kMaxIterations) break;
    hessian = d.x.transpose() * w.asDiagonal() * d.x * inv_n;
    hessian.diagonal().array() += 1e-8;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    if (ldlt.info() != Eigen::Success) break;
    const Eigen::VectorXd step = ldlt.solve(grad);
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 50; ++ls) {
      const Eigen::VectorXd candidate = beta + t * step;
      const double candidate_ll = LogisticLogLikelihood(d, candidate);
      if (candidate_ll >= ll - 1e-12 * std::abs(ll)) {
        beta = candidate;
        ll = candidate_ll;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  fit.coefficients = beta;
  fit.converged = converged;
  fit.iterations = iter;
  if (!converged) {
    fit.warnings.push_back(
        "logistic fit did not converge (possible separation); returning the "
        "last iterate");
  }
  const Eigen::VectorXd eta = d.x * beta;
  bool saturated = false;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double pr = Sigmoid(eta[r]);
    saturated |= std::abs(eta[r]) > kSaturatedLogit;
    w[r] = pr * (1.0 - pr);
  }
  if (saturated) {
    fit.warnings.push_back(
        "fitted probabilities numerically 0 or 1 (possible separation)");
  }
  Eigen::MatrixXd info = d.x.transpose() * w.asDiagonal() * d.x;
  info.diagonal().array() += 1e-8;
  fit.variances =
      info.ldlt().solve(Eigen::MatrixXd::Identity(p, p)).diagonal();
  return fit;
}

std::string FormatNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string QuoteCsv(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

double MarginalDistance(const Dataset& orig, const Dataset& synth,
                        int feature) {
  RequireNonEmpty(orig, "original");
  RequireNonEmpty(synth, "synthetic");
  RequireSameSchema(orig, synth);
  RequireFeatureIndex(orig.schema(), feature);
  const auto po = Frequencies(orig, feature);
  const auto ps = Frequencies(synth, feature);
  double total = 0.0;
  for (std::size_t j = 0; j < po.size(); ++j) {
    total += (ps[j] - po[j]) * (ps[j] - po[j]);
  }
  return total;
}

double ConditionalDistance(const Dataset& orig, const Dataset& synth,
                           int target, int given) {
  RequireNonEmpty(orig, "original");
  RequireNonEmpty(synth, "synthetic");
  RequireSameSchema(orig, synth);
  RequireFeatureIndex(orig.schema(), target);
  RequireFeatureIndex(orig.schema(), given);
  const int ct = orig.schema().num_categories(target);
  const int cg = orig.schema().num_categories(given);
  auto table = [&](const Dataset& d) {
    std::vector<double> counts(static_cast<std::size_t>(cg) * ct, 0.0);
    for (int r = 0; r < d.num_rows(); ++r) {
      counts[static_cast<std::size_t>(d.at(r, given)) * ct + d.at(r, target)] += 1;
    }
    return counts;
  };
  const auto to = table(orig);
  const auto ts = table(synth);
  double total = 0.0;
  for (int g = 0; g < cg; ++g) {
    const auto begin = static_cast<std::size_t>(g) * ct;
    double no = 0.0, ns = 0.0;
    for (int j = 0; j < ct; ++j) {
      no += to[begin + j];
      ns += ts[begin + j];
    }
    if (no == 0.0 || ns == 0.0) continue;
    for (int j = 0; j < ct; ++j) {
      const double diff = ts[begin + j] / ns - to[begin + j] / no;
      total += diff * diff;
    }
  }
  return total;
}

RegressionSpec RegressionSpec::Parse(std::string_view formula) {
  RegressionSpec spec;
  const auto colon = formula.find(':');
  if (colon == std::string_view::npos) {
    ThrowUsage("regression formula needs a 'linear:' or 'logistic:' prefix");
  }
  const auto kind = Trim(formula.substr(0, colon));
  if (kind == "linear") {
    spec.kind = Kind::kLinear;
  } else if (kind == "logistic") {
    spec.kind = Kind::kLogistic;
  } else {
    ThrowUsage("unknown regression kind '" + std::string(kind) + "'");
  }
  const auto rest = formula.substr(colon + 1);
  const auto tilde = rest.find('~');
  if (tilde == std::string_view::npos) ThrowUsage("regression formula needs '~'");
  auto lhs = Trim(rest.substr(0, tilde));
  if (const auto gt = lhs.find('>'); gt != std::string_view::npos) {
    const std::string number(Trim(lhs.substr(gt + 1)));
    try {
      std::size_t used = 0;
      spec.threshold = std::stod(number, &used);
      if (used != number.size()) throw std::invalid_argument(number);
    } catch (const std::exception&) {
      ThrowUsage("bad threshold '" + number + "' in regression formula");
    }
    lhs = Trim(lhs.substr(0, gt));
  }
  if (lhs.empty()) ThrowUsage("regression formula has no target");
  spec.target = std::string(lhs);
  auto rhs = rest.substr(tilde + 1);
  while (true) {
    const auto plus = rhs.find('+');
    auto term = Trim(rhs.substr(0, plus));
    if (term.empty()) ThrowUsage("empty term in regression formula");
    RegressionTerm t;
    if (term.starts_with("num(") && term.ends_with(")")) {
      t.as_numeric = true;
      term = Trim(term.substr(4, term.size() - 5));
    }
    t.feature = std::string(term);
    spec.predictors.push_back(std::move(t));
    if (plus == std::string_view::npos) break;
    rhs = rhs.substr(plus + 1);
  }
  return spec;
}

std::string RegressionSpec::ToString() const {
  std::string out = kind == Kind::kLinear ? "linear:" : "logistic:";
  out += target;
  if (threshold) out += ">" + FormatNumber(*threshold);
  out += "~";
  for (std::size_t k = 0; k < predictors.size(); ++k) {
    if (k) out += "+";
    out += predictors[k].as_numeric ? "num(" + predictors[k].feature + ")"
                                    : predictors[k].feature;
  }
  return out;
}

DesignMatrix BuildDesignMatrix(const Dataset& dataset,
                               const RegressionSpec& spec) {
  const Schema& schema = dataset.schema();
  const int target = schema.RequireFeature(spec.target);
  const FeatureSpec& tspec = schema.feature(target);
  if (spec.predictors.empty()) ThrowUsage("regression needs predictors");
  std::vector<int> columns;
  for (const RegressionTerm& term : spec.predictors) {
    const int f = schema.RequireFeature(term.feature);
    if (f == target) ThrowUsage("regression target cannot be a predictor");
    if (term.as_numeric && !schema.feature(f).has_numeric()) {
      ThrowUsage("feature '" + term.feature + "' has no numeric representatives");
    }
    columns.push_back(f);
  }
  const bool numeric_target =
      spec.kind == RegressionSpec::Kind::kLinear || spec.threshold.has_value();
  if (numeric_target && !tspec.has_numeric()) {
    ThrowUsage("target '" + spec.target + "' has no numeric representatives");
  }
  if (!numeric_target && tspec.num_categories() != 2) {
    ThrowUsage("logistic target '" + spec.target +
               "' needs a threshold or exactly two categories");
  }

  DesignMatrix d;
  d.names.push_back("(Intercept)");
  int width = 1;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const FeatureSpec& fs = schema.feature(columns[k]);
    if (spec.predictors[k].as_numeric) {
      d.names.push_back(fs.name);
      ++width;
    } else {
      for (int c = 1; c < fs.num_categories(); ++c) {
        d.names.push_back(fs.name + "=" + fs.categories[c]);
      }
      width += fs.num_categories() - 1;
    }
  }
  const int n = dataset.num_rows();
  d.x = Eigen::MatrixXd::Zero(n, width);
  d.y.resize(n);
  for (int r = 0; r < n; ++r) {
    d.x(r, 0) = 1.0;
    int col = 1;
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const FeatureSpec& fs = schema.feature(columns[k]);
      const Category v = dataset.at(r, columns[k]);
      if (spec.predictors[k].as_numeric) {
        d.x(r, col++) = fs.numeric_representatives[v];
      } else {
        if (v > 0) d.x(r, col + v - 1) = 1.0;
        col += fs.num_categories() - 1;
      }
    }
    const Category t = dataset.at(r, target);
    if (spec.kind == RegressionSpec::Kind::kLinear) {
      d.y[r] = tspec.numeric_representatives[t];
    } else if (spec.threshold) {
      d.y[r] = tspec.numeric_representatives[t] > *spec.threshold ? 1.0 : 0.0;
    } else {
      d.y[r] = static_cast<double>(t);
    }
  }
  return d;
}

RegressionFit FitRegression(const Dataset& dataset,
                            const RegressionSpec& spec) {
  const DesignMatrix d = BuildDesignMatrix(dataset, spec);
  if (d.x.rows() == 0) ThrowData("cannot fit a regression on an empty dataset");
  return spec.kind == RegressionSpec::Kind::kLinear ? FitLinear(d)
                                                    : FitLogistic(d);
}

RegressionDistanceResult RegressionDistance(std::span<const double> synth,
                                            std::span<const double> orig) {
  if (synth.size() != orig.size()) {
    ThrowData("coefficient vectors have different lengths");
  }
  RegressionDistanceResult result;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    if (!(std::abs(orig[i]) > 1e-12)) {
      result.skipped.push_back(static_cast<int>(i));
      result.warnings.push_back("coefficient " + std::to_string(i) +
                                " is near zero in the original fit; skipped");
      continue;
    }
    result.value += std::abs((synth[i] - orig[i]) / orig[i]);
  }
  return result;
}

CombinedEstimate CombineEstimates(std::span<const double> q,
                                  std::span<const double> v) {
  if (q.size() < 2) ThrowUsage("combining rules need at least two datasets");
  if (q.size() != v.size()) ThrowUsage("estimate and variance counts differ");
  const double k = static_cast<double>(q.size());
  CombinedEstimate out;
  for (double x : q) out.q_bar += x;
  out.q_bar /= k;
  for (double x : q) out.b += (x - out.q_bar) * (x - out.q_bar);
  out.b /= k - 1.0;
  for (double x : v) out.v_bar += x;
  out.v_bar /= k;
  out.t_s = (k + 1.0) * out.b / k - out.v_bar;
  return out;
}

Uniqueness PopulationUniqueness(const Dataset& dataset,
                                std::span<const int> quasi_identifiers) {
  if (quasi_identifiers.empty()) ThrowUsage("no quasi-identifiers given");
  const Projector project(dataset.schema(), quasi_identifiers);
  std::unordered_map<std::uint64_t, int> counts;
  counts.reserve(dataset.num_rows());
  for (int r = 0; r < dataset.num_rows(); ++r) ++counts[project(dataset.row(r))];
  Uniqueness u;
  for (const auto& [key, c] : counts) u.count += c == 1;
  if (dataset.num_rows() > 0) {
    u.fraction = static_cast<double>(u.count) / dataset.num_rows();
  }
  return u;
}

double AttackCategorical(const Dataset& orig, const Dataset& synth,
                         int target, std::span<const int> given) {
  RequireAttackArgs(orig, synth, target, given);
  if (orig.num_rows() == 0) return 0.0;
  const int c = orig.schema().num_categories(target);
  const Projector project(orig.schema(), given);
  std::unordered_map<std::uint64_t, std::vector<int>> counts;
  std::vector<int> global(c, 0);
  for (int r = 0; r < synth.num_rows(); ++r) {
    auto& row = counts[project(synth.row(r))];
    if (row.empty()) row.assign(c, 0);
    ++row[synth.at(r, target)];
    ++global[synth.at(r, target)];
  }
  auto mode = [](const std::vector<int>& v) {
    return static_cast<Category>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  std::unordered_map<std::uint64_t, Category> modes;
  for (const auto& [key, row] : counts) modes.emplace(key, mode(row));
  const Category fallback = mode(global);
  int wrong = 0;
  for (int r = 0; r < orig.num_rows(); ++r) {
    const auto it = modes.find(project(orig.row(r)));
    const Category guess = it == modes.end() ? fallback : it->second;
    wrong += guess != orig.at(r, target);
  }
  return static_cast<double>(wrong) / orig.num_rows();
}

double AttackNumeric(const Dataset& orig, const Dataset& synth, int target,
                     std::span<const int> given) {
  RequireAttackArgs(orig, synth, target, given);
  const FeatureSpec& spec = orig.schema().feature(target);
  if (!spec.has_numeric()) {
    ThrowUsage("feature '" + spec.name + "' has no numeric representatives");
  }
  if (orig.num_rows() == 0) return 0.0;
  const auto& reps = spec.numeric_representatives;
  const Projector project(orig.schema(), given);
  std::unordered_map<std::uint64_t, std::pair<double, int>> sums;
  double global = 0.0;
  for (int r = 0; r < synth.num_rows(); ++r) {
    const double value = reps[synth.at(r, target)];
    auto& s = sums[project(synth.row(r))];
    s.first += value;
    ++s.second;
    global += value;
  }
  global /= synth.num_rows();
  double total = 0.0;
  for (int r = 0; r < orig.num_rows(); ++r) {
    const auto it = sums.find(project(orig.row(r)));
    const double guess =
        it == sums.end() ? global : it->second.first / it->second.second;
    total += std::abs(reps[orig.at(r, target)] - guess);
  }
  return total / orig.num_rows();
}

void EvalReport::Add(std::string name, double value) {
  metrics.emplace_back(std::move(name), value);
}

std::optional<double> EvalReport::Find(std::string_view name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  return std::nullopt;
}

nlohmann::json EvalReportToJson(const EvalReport& report) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& [name, value] : report.metrics) {
    metrics.push_back({{"name", name}, {"value", value}});
  }
  return {{"algorithm", report.algorithm},
          {"epsilon", report.epsilon},
          {"seed", report.seed},
          {"metrics", std::move(metrics)},
          {"warnings", report.warnings}};
}

EvalReport EvalReportFromJson(const nlohmann::json& j) {
  try {
    EvalReport report;
    report.algorithm = j.at("algorithm").get<std::string>();
    report.epsilon = j.at("epsilon").get<double>();
    report.seed = j.value("seed", std::uint64_t{0});
    for (const auto& m : j.at("metrics")) {
      report.Add(m.at("name").get<std::string>(), m.at("value").get<double>());
    }
    if (j.contains("warnings")) {
      report.warnings = j.at("warnings").get<std::vector<std::string>>();
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    ThrowData(std::string("malformed report: ") + e.what());
  }
}

void SaveEvalReport(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) ThrowIo("cannot write report " + path);
  out << EvalReportToJson(report).dump(2) << "\n";
  if (!out) ThrowIo("failed writing report " + path);
}

EvalReport LoadEvalReport(const std::string& path) {
  std::ifstream in(path);
  if (!in) ThrowIo("cannot open report " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    ThrowData("report " + path + " is not valid JSON: " + e.what());
  }
  return EvalReportFromJson(j);
}

EvalReport Evaluate(const Dataset& orig, std::span<const Dataset> synth,
                    const EvalOptions& options) {
  if (synth.empty()) ThrowUsage("no synthetic datasets to evaluate");
  RequireNonEmpty(orig, "original");
  for (const Dataset& s : synth) {
    RequireNonEmpty(s, "synthetic");
    RequireSameSchema(orig, s);
  }
  const Schema& schema = orig.schema();
  const int m = schema.num_features();
  const double k = static_cast<double>(synth.size());
  EvalReport report;

  if (options.marginal) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      double mean = 0.0;
      for (const Dataset& s : synth) mean += MarginalDistance(orig, s, i);
      mean /= k;
      report.Add("marginal/" + schema.feature(i).name, mean);
      sum += mean;
    }
    report.Add("marginal_sum", sum);
  }

  if (options.conditional) {
    std::vector<std::pair<int, int>> pairs = options.conditional_pairs;
    if (pairs.empty()) {
      for (int t = 0; t < m; ++t) {
        for (int g = 0; g < m; ++g) {
          if (t != g) pairs.emplace_back(t, g);
        }
      }
    }
    double sum = 0.0;
    for (const auto& [t, g] : pairs) {
      double mean = 0.0;
      for (const Dataset& s : synth) mean += ConditionalDistance(orig, s, t, g);
      mean /= k;
      report.Add("conditional/" + schema.feature(t).name + "|" +
                     schema.feature(g).name,
                 mean);
      sum += mean;
    }
    report.Add("conditional_sum", sum);
  }

  for (const RegressionSpec& spec : options.regressions) {
    const std::string name = "regression/" + spec.ToString();
    const RegressionFit base = FitRegression(orig, spec);
    for (const auto& w : base.warnings) report.warnings.push_back(name + ": original: " + w);
    const Eigen::Index p = base.coefficients.size();
    std::vector<RegressionFit> fits;
    for (const Dataset& s : synth) {
      fits.push_back(FitRegression(s, spec));
      for (const auto& w : fits.back().warnings) {
        report.warnings.push_back(name + ": synthetic: " + w);
      }
    }
    std::vector<double> pooled(p);
    double t_s_mean = 0.0;
    bool negative = false;
    for (Eigen::Index c = 0; c < p; ++c) {
      std::vector<double> q, v;
      for (const RegressionFit& f : fits) {
        q.push_back(f.coefficients[c]);
        v.push_back(f.variances[c]);
      }
      if (fits.size() >= 2) {
        const CombinedEstimate est = CombineEstimates(q, v);
        pooled[c] = est.q_bar;
        t_s_mean += est.t_s;
        negative |= est.negative_variance();
      } else {
        pooled[c] = q[0];
      }
    }
    const std::vector<double> orig_beta(base.coefficients.data(),
                                        base.coefficients.data() + p);
    const RegressionDistanceResult dist = RegressionDistance(pooled, orig_beta);
    for (int skipped : dist.skipped) {
      report.warnings.push_back(name + ": coefficient '" + base.names[skipped] +
                                "' is near zero in the original fit; skipped");
    }
    report.Add(name, dist.value);
    if (fits.size() >= 2) {
      report.Add(name + "/t_s_mean", t_s_mean / static_cast<double>(p));
      if (negative) {
        report.warnings.push_back(name + ": negative T_s for some coefficients");
      }
    }
  }

  if (options.uniqueness && !options.quasi_identifiers.empty()) {
    double fraction = 0.0, count = 0.0;
    for (const Dataset& s : synth) {
      const Uniqueness u = PopulationUniqueness(s, options.quasi_identifiers);
      fraction += u.fraction;
      count += u.count;
    }
    report.Add("uniqueness_fraction", fraction / k);
    report.Add("uniqueness_count", count / k);
  }

  if (options.categorical_attack_target) {
    const int t = *options.categorical_attack_target;
    double rate = 0.0;
    for (const Dataset& s : synth) {
      rate += AttackCategorical(orig, s, t, options.categorical_attack_given);
    }
    report.Add("attack_misclassification/" + schema.feature(t).name, rate / k);
  }
  if (options.numeric_attack_target) {
    const int t = *options.numeric_attack_target;
    double mae = 0.0;
    for (const Dataset& s : synth) {
      mae += AttackNumeric(orig, s, t, options.numeric_attack_given);
    }
    report.Add("attack_mae/" + schema.feature(t).name, mae / k);
  }
  return report;
}

std::string RuMapCsv(std::span<const EvalReport> reports) {
  if (reports.empty()) ThrowUsage("ru-map needs at least one report");
  std::ostringstream out;
  out << "algorithm,epsilon,metric,value\n";
  for (const EvalReport& r : reports) {
    for (const auto& [name, value] : r.metrics) {
      out << QuoteCsv(r.algorithm) << ',' << FormatNumber(r.epsilon) << ','
          << QuoteCsv(name) << ',' << FormatNumber(value) << '\n';
    }
  }
  return out.str();
}

void WriteRuMap(std::span<const EvalReport> reports, const std::string& path) {
  const std::string text = RuMapCsv(reports);
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowIo("cannot write " + path);
  out << text;
  if (!out) ThrowIo("failed writing " + path);
}

}  // namespace pegs
