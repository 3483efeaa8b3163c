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

#include "pegs/pmi.h"

#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>

#include "pegs/error.h"
#include "pegs/parallel.h"
#include "sequential_pass.h"

namespace pegs {
namespace {

struct Layout {
  std::vector<int> offsets;
  int num_inputs = 0;
};

Layout OneHotLayout(const Schema& schema, int target) {
  Layout layout;
  layout.offsets.assign(schema.num_features(), -1);
  for (int k = 0; k < schema.num_features(); ++k) {
    if (k == target) continue;
    layout.offsets[k] = layout.num_inputs;
    layout.num_inputs += schema.num_categories(k);
  }
  return layout;
}

// In-place softmax with max shift; returns log of the normalizer.
double Softmax(Eigen::Ref<Eigen::VectorXd> z) {
  const double shift = z.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    z[j] = std::exp(z[j] - shift);
    sum += z[j];
  }
  z /= sum;
  return shift + std::log(sum);
}

// Penalized mean negative log-likelihood over a subset of rows. Parameters
// are packed as [intercepts (C), W column-major (C x D)].
class SoftmaxObjective {
 public:
  SoftmaxObjective(const Dataset& dataset, int target, std::vector<int> rows,
                   const Layout& layout, double lambda)
      : dataset_(dataset),
        target_(target),
        rows_(std::move(rows)),
        layout_(layout),
        lambda_(lambda),
        c_(dataset.schema().num_categories(target)) {}

  Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(c_) * (1 + layout_.num_inputs);
  }

  double Evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const int m = dataset_.num_features();
    Eigen::Map<const Eigen::VectorXd> b(theta.data(), c_);
    Eigen::Map<const Eigen::MatrixXd> w(theta.data() + c_, c_,
                                        layout_.num_inputs);
    grad.setZero(theta.size());
    Eigen::Map<Eigen::VectorXd> gb(grad.data(), c_);
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + c_, c_, layout_.num_inputs);
    Eigen::VectorXd z(c_);
    double loss = 0.0;
    for (int r : rows_) {
      const auto row = dataset_.row(r);
      z = b;
      for (int k = 0; k < m; ++k) {
        if (k == target_) continue;
        z += w.col(layout_.offsets[k] + row[k]);
      }
      const int y = row[target_];
      Softmax(z);
      loss -= std::log(z[y]);
      z[y] -= 1.0;
      gb += z;
      for (int k = 0; k < m; ++k) {
        if (k == target_) continue;
        gw.col(layout_.offsets[k] + row[k]) += z;
      }
    }
    const double inv_n = 1.0 / static_cast<double>(rows_.size());
    loss *= inv_n;
    grad *= inv_n;
    loss += 0.5 * lambda_ * w.squaredNorm();
    gw += lambda_ * w;
    return loss;
  }

 private:
  const Dataset& dataset_;
  int target_;
  std::vector<int> rows_;
  const Layout& layout_;
  double lambda_;
  int c_;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

// Limited-memory BFGS (history 10) with Armijo backtracking.
MinimizeResult MinimizeLbfgs(const SoftmaxObjective& objective,
                             const GlmFitOptions& options) {
  constexpr int kHistory = 10;
  MinimizeResult result;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(objective.dimension());
  Eigen::VectorXd g(x.size());
  double f = objective.Evaluate(x, g);
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd d(x.size()), x_new(x.size()), g_new(x.size());
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (g.norm() <= options.tolerance) break;
    // Two-loop recursion.
    d = -g;
    std::vector<double> a(s_hist.size());
    for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
      a[h] = rho_hist[h] * s_hist[h].dot(d);
      d -= a[h] * y_hist[h];
    }
    if (!s_hist.empty()) {
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * y_hist[h].dot(d);
      d += (a[h] - beta) * s_hist[h];
    }
    double slope = g.dot(d);
    if (slope >= 0.0) {
      d = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * d;
      f_new = objective.Evaluate(x_new, g_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * std::sqrt(s.squaredNorm() * y.squaredNorm())) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kHistory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
  }
  result.gradient_norm = g.norm();
  result.converged = result.gradient_norm <= options.tolerance;
  result.iterations = iter;
  result.x = std::move(x);
  return result;
}

GlmConditional FitOnRows(const Dataset& dataset, int target,
                         std::vector<int> rows, const GlmFitOptions& options) {
  const Schema& schema = dataset.schema();
  const int c = schema.num_categories(target);
  if (static_cast<int>(rows.size()) < c) {
    ThrowData("cannot fit feature '" + schema.feature(target).name + "': " +
              std::to_string(rows.size()) + " rows for " + std::to_string(c) +
              " categories");
  }
  if (!(options.lambda >= 0.0)) ThrowUsage("lambda must be >= 0");
  const Layout layout = OneHotLayout(schema, target);
  const SoftmaxObjective objective(dataset, target, std::move(rows), layout,
                                   options.lambda);
  MinimizeResult fit = MinimizeLbfgs(objective, options);
  GlmConditional model;
  model.target = target;
  model.offsets = layout.offsets;
  model.num_inputs = layout.num_inputs;
  model.intercepts = fit.x.head(c);
  model.weights =
      Eigen::Map<const Eigen::MatrixXd>(fit.x.data() + c, c, layout.num_inputs);
  model.lambda = options.lambda;
  model.converged = fit.converged;
  model.iterations = fit.iterations;
  model.gradient_norm = fit.gradient_norm;
  return model;
}

}  // namespace

std::vector<double> GlmConditional::Probabilities(
    std::span<const Category> record) const {
  Eigen::VectorXd z = intercepts;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    if (offsets[k] < 0) continue;
    z += weights.col(offsets[k] + record[k]);
  }
  Softmax(z);
  return {z.data(), z.data() + z.size()};
}

double GlmConditional::MeanLogLikelihood(const Dataset& dataset) const {
  if (dataset.num_rows() == 0) return 0.0;
  double total = 0.0;
  for (int r = 0; r < dataset.num_rows(); ++r) {
    const auto p = Probabilities(dataset.row(r));
    total += std::log(p[dataset.at(r, target)]);
  }
  return total / dataset.num_rows();
}

GlmConditional FitGlmConditional(const Dataset& dataset, int target,
                                 const GlmFitOptions& options) {
  std::vector<int> rows(dataset.num_rows());
  std::iota(rows.begin(), rows.end(), 0);
  return FitOnRows(dataset, target, std::move(rows), options);
}

double SelectLambdaByCrossValidation(const Dataset& dataset, int target,
                                     std::span<const double> grid, int folds,
                                     const GlmFitOptions& options) {
  if (grid.empty()) ThrowUsage("lambda grid is empty");
  if (folds < 2) ThrowUsage("cross-validation needs at least 2 folds");
  double best_lambda = grid[0];
  double best_loss = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    GlmFitOptions fold_options = options;
    fold_options.lambda = lambda;
    double loss = 0.0;
    int held_out = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<int> train;
      std::vector<int> test;
      for (int r = 0; r < dataset.num_rows(); ++r) {
        (r % folds == f ? test : train).push_back(r);
      }
      const GlmConditional model =
          FitOnRows(dataset, target, std::move(train), fold_options);
      for (int r : test) {
        const auto p = model.Probabilities(dataset.row(r));
        loss -= std::log(p[dataset.at(r, target)]);
        ++held_out;
      }
    }
    loss /= std::max(held_out, 1);
    if (loss < best_loss) {
      best_loss = loss;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

std::vector<double> PerturbProbabilities(std::span<const double> g,
                                         double alpha) {
  if (!(alpha >= 0.0)) ThrowPrivacy("alpha must be non-negative");
  double sum = 0.0;
  for (double v : g) sum += v;
  if (std::abs(sum - 1.0) > 1e-12) {
    ThrowData("GLM response is not normalized (sum = " + std::to_string(sum) +
              ")");
  }
  const double denom = 1.0 + static_cast<double>(g.size()) * alpha;
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = (g[j] + alpha) / denom;
  return out;
}

std::vector<double> PmiProbability(const GlmConditional& model,
                                   std::span<const Category> record,
                                   double alpha) {
  return PerturbProbabilities(model.Probabilities(record), alpha);
}

PmiModels FitPmiModels(const Dataset& dataset, const GlmFitOptions& options,
                       int threads) {
  PmiModels out;
  out.schema = dataset.schema_ptr();
  out.models.resize(dataset.num_features());
  ParallelFor(dataset.num_features(), threads, [&](int i) {
    out.models[i] = FitGlmConditional(dataset, i, options);
  });
  return out;
}

nlohmann::json PmiModelsToJson(const PmiModels& models) {
  nlohmann::json list = nlohmann::json::array();
  for (const GlmConditional& m : models.models) {
    nlohmann::json weights = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.weights.rows(); ++j) {
      std::vector<double> row(m.weights.cols());
      for (Eigen::Index d = 0; d < m.weights.cols(); ++d) row[d] = m.weights(j, d);
      weights.push_back(std::move(row));
    }
    list.push_back({{"target", m.target},
                    {"lambda", m.lambda},
                    {"converged", m.converged},
                    {"iterations", m.iterations},
                    {"gradient_norm", m.gradient_norm},
                    {"intercepts", std::vector<double>(m.intercepts.data(),
                                                       m.intercepts.data() +
                                                           m.intercepts.size())},
                    {"weights", std::move(weights)}});
  }
  return {{"format", "pegs-pmi"},
          {"version", 1},
          {"schema", SchemaToJson(*models.schema)},
          {"models", std::move(list)}};
}

PmiModels PmiModelsFromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "pegs-pmi") {
      ThrowData("not a PMI model file");
    }
    if (j.at("version").get<int>() != 1) {
      ThrowData("unsupported PMI model version");
    }
    PmiModels out;
    out.schema = SchemaFromJson(j.at("schema"));
    const auto& list = j.at("models");
    if (static_cast<int>(list.size()) != out.schema->num_features()) {
      ThrowData("PMI model file needs one model per feature");
    }
    for (const auto& entry : list) {
      GlmConditional m;
      m.target = entry.at("target").get<int>();
      const Layout layout = OneHotLayout(*out.schema, m.target);
      m.offsets = layout.offsets;
      m.num_inputs = layout.num_inputs;
      m.lambda = entry.at("lambda").get<double>();
      m.converged = entry.at("converged").get<bool>();
      m.iterations = entry.at("iterations").get<int>();
      m.gradient_norm = entry.at("gradient_norm").get<double>();
      const auto b = entry.at("intercepts").get<std::vector<double>>();
      const int c = out.schema->num_categories(m.target);
      if (static_cast<int>(b.size()) != c) ThrowData("intercept width mismatch");
      m.intercepts = Eigen::Map<const Eigen::VectorXd>(b.data(), c);
      m.weights.resize(c, m.num_inputs);
      const auto& w = entry.at("weights");
      if (static_cast<int>(w.size()) != c) ThrowData("weight rows mismatch");
      for (int r = 0; r < c; ++r) {
        const auto row = w[r].get<std::vector<double>>();
        if (static_cast<int>(row.size()) != m.num_inputs) {
          ThrowData("weight width mismatch");
        }
        for (int d = 0; d < m.num_inputs; ++d) m.weights(r, d) = row[d];
      }
      out.models.push_back(std::move(m));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    ThrowData(std::string("malformed PMI model file: ") + e.what());
  }
}

void SavePmiModels(const PmiModels& models, const std::string& path) {
  std::ofstream out(path);
  if (!out) ThrowIo("cannot write PMI model file " + path);
  out << PmiModelsToJson(models).dump() << "\n";
}

PmiModels LoadPmiModels(const std::string& path) {
  std::ifstream in(path);
  if (!in) ThrowIo("cannot open PMI model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    ThrowData("PMI model file " + path + " is not valid JSON: " + e.what());
  }
  return PmiModelsFromJson(j);
}

SynthesisOutput PmiSynthesizeWithAlpha(const PmiModels& models, double alpha,
                                       const SeedPool& pool,
                                       const SynthesisOptions& options) {
  if (options.num_samples < 1) ThrowUsage("number of samples must be >= 1");
  if (options.num_datasets < 1) ThrowUsage("number of datasets must be >= 1");
  if (!(alpha >= 0.0)) ThrowPrivacy("alpha must be non-negative");
  const Schema& schema = *models.schema;
  const int m = schema.num_features();
  const int n = options.num_samples;
  SynthesisOutput output;
  output.traces.resize(options.num_datasets);
  for (int k = 0; k < options.num_datasets; ++k) {
    std::vector<Category> cells(static_cast<std::size_t>(n) * m);
    std::vector<SynthesisTrace> traces(options.keep_traces ? n : 0);
    ParallelFor(n, options.threads, [&](int j) {
      RngStream rng(options.seed,
                    StreamId(StreamPurpose::kPmiSynthesis,
                             static_cast<std::uint64_t>(k),
                             static_cast<std::uint64_t>(j)));
      Record record = pool.Draw(rng);
      if (static_cast<int>(record.size()) != m) {
        ThrowData("seed has the wrong number of features");
      }
      SynthesisTrace trace;
      internal::SequentialPass(
          schema, record, rng,
          [&](int i, const Record& current, std::vector<double>& p) {
            const auto q = PmiProbability(models.models[i], current, alpha);
            std::copy(q.begin(), q.end(), p.begin());
            return std::uint64_t{0};
          },
          options.keep_traces ? &trace : nullptr);
      std::copy(record.begin(), record.end(),
                cells.begin() + static_cast<std::ptrdiff_t>(j) * m);
      if (options.keep_traces) traces[j] = std::move(trace);
    });
    output.datasets.emplace_back(models.schema, std::move(cells));
    output.traces[k] = std::move(traces);
  }
  return output;
}

SynthesisOutput PmiSynthesize(const PmiModels& models,
                              const PrivacySpec& privacy, const SeedPool& pool,
                              const SynthesisOptions& options) {
  privacy.Check();
  if (privacy.criterion != PrivacySpec::Criterion::kDpPerSample) {
    ThrowUsage("the PMI engine supports only per-sample differential privacy");
  }
  return PmiSynthesizeWithAlpha(
      models, AlphaForEpsilon(privacy.epsilon, models.schema->num_features()),
      pool, options);
}

}  // namespace pegs
