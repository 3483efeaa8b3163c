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

#ifndef PEGS_EVALUATION_H_
#define PEGS_EVALUATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pegs/schema.h"

namespace pegs {

// Sum over categories of squared differences of empirical frequencies.
// Throws PegsError(kData) when either dataset is empty.
double MarginalDistance(const Dataset& orig, const Dataset& synth,
                        int feature);

// Sum over conditioning values and target values of squared differences of
// empirical conditionals. Conditioning values missing from either dataset
// contribute nothing.
double ConditionalDistance(const Dataset& orig, const Dataset& synth,
                           int target, int given);

struct RegressionTerm {
  std::string feature;
  bool as_numeric = false;
};

// Model formula. Linear models regress the target's numeric
// representatives; logistic models use I(rep > threshold) or, without a
// threshold, a two-level categorical target coded as its category index.
struct RegressionSpec {
  enum class Kind { kLinear, kLogistic };

  Kind kind = Kind::kLinear;
  std::string target;
  std::optional<double> threshold;
  std::vector<RegressionTerm> predictors;

  // Parses "kind:target[>threshold]~term+term", where a term is either a
  // feature name or num(feature). Throws PegsError(kUsage) on bad syntax.
  static RegressionSpec Parse(std::string_view formula);
  std::string ToString() const;
};

struct DesignMatrix {
  Eigen::MatrixXd x;  // intercept column first
  Eigen::VectorXd y;
  std::vector<std::string> names;
};

// Numeric terms use numeric_representatives; categorical terms are one-hot
// with the first category dropped. Throws PegsError(kUsage) for unknown
// features, a target listed as predictor, or a numeric term without
// representatives.
DesignMatrix BuildDesignMatrix(const Dataset& dataset,
                               const RegressionSpec& spec);

struct RegressionFit {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd variances;  // diagonal of the estimated covariance
  bool converged = true;
  int iterations = 0;
  std::vector<std::string> warnings;
};

// Linear: least squares via pivoted QR; a rank-deficient design falls back
// to normal equations with a 1e-8 ridge. Logistic: Newton's method until the
// max-norm of the mean gradient is at most 1e-8. Separation or
// non-convergence adds a warning and returns the best iterate. Throws
// PegsError(kData) when the data cannot support a fit.
RegressionFit FitRegression(const Dataset& dataset,
                            const RegressionSpec& spec);

struct RegressionDistanceResult {
  double value = 0.0;
  std::vector<int> skipped;  // coefficients with |beta_orig| <= 1e-12
  std::vector<std::string> warnings;
};

// Sum of |(synth_i - orig_i) / orig_i|. Throws PegsError(kData) when the
// lengths differ.
RegressionDistanceResult RegressionDistance(std::span<const double> synth,
                                            std::span<const double> orig);

struct CombinedEstimate {
  double q_bar = 0.0;
  double b = 0.0;      // between-dataset variance
  double v_bar = 0.0;  // mean within-dataset variance
  double t_s = 0.0;    // (1 + 1/K) b - v_bar, possibly negative
  bool negative_variance() const { return t_s < 0.0; }
};

// Combining rules over K >= 2 synthetic datasets. Throws PegsError(kUsage)
// for K < 2 or mismatched lengths.
CombinedEstimate CombineEstimates(std::span<const double> q,
                                  std::span<const double> v);

struct Uniqueness {
  int count = 0;
  double fraction = 0.0;
};

// Rows whose projection onto the quasi-identifiers occurs exactly once.
Uniqueness PopulationUniqueness(const Dataset& dataset,
                                std::span<const int> quasi_identifiers);

// Misclassification rate of inferring each original row's target as the
// modal synthetic value among rows sharing its conditioning projection
// (ties to the lowest index, no match to the global synthetic mode).
double AttackCategorical(const Dataset& orig, const Dataset& synth,
                         int target, std::span<const int> given);

// Mean absolute error, in representative units, of inferring each original
// row's target as the mean representative among matching synthetic rows
// (no match falls back to the global synthetic mean).
double AttackNumeric(const Dataset& orig, const Dataset& synth, int target,
                     std::span<const int> given);

struct EvalReport {
  std::string algorithm;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> metrics;  // insertion order
  std::vector<std::string> warnings;

  void Add(std::string name, double value);
  std::optional<double> Find(std::string_view name) const;
};

nlohmann::json EvalReportToJson(const EvalReport& report);
EvalReport EvalReportFromJson(const nlohmann::json& j);
void SaveEvalReport(const EvalReport& report, const std::string& path);
EvalReport LoadEvalReport(const std::string& path);

struct EvalOptions {
  bool marginal = true;
  bool conditional = true;
  bool uniqueness = true;
  // Ordered (target, given) pairs; empty means every ordered pair.
  std::vector<std::pair<int, int>> conditional_pairs;
  std::vector<RegressionSpec> regressions;
  std::vector<int> quasi_identifiers;
  // Attacks run when a target is set.
  std::optional<int> categorical_attack_target;
  std::vector<int> categorical_attack_given;
  std::optional<int> numeric_attack_target;
  std::vector<int> numeric_attack_given;
};

// Scores K synthetic datasets against the original. Distances, uniqueness
// and attack metrics are averaged over the K datasets; regression
// coefficients are pooled with the combining rules (the reported T_s values
// are means over coefficients) before the distance is taken.
EvalReport Evaluate(const Dataset& orig, std::span<const Dataset> synth,
                    const EvalOptions& options);

// Long-format table "algorithm,epsilon,metric,value", one row per metric per
// report, in input order. Throws PegsError(kUsage) for no reports.
std::string RuMapCsv(std::span<const EvalReport> reports);
void WriteRuMap(std::span<const EvalReport> reports, const std::string& path);

}  // namespace pegs

#endif  // PEGS_EVALUATION_H_
