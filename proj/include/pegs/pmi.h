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

#ifndef PEGS_PMI_H_
#define PEGS_PMI_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pegs/privacy.h"
#include "pegs/sampler.h"
#include "pegs/schema.h"

namespace pegs {

// Multinomial logistic model of one feature given one-hot encodings of all
// the others: Pr(x_i = j | x_{-i}) ∝ exp(c_j + beta_j . onehot(x_{-i})).
// No reference category is dropped; the ridge term resolves the redundancy.
struct GlmConditional {
  int target = 0;
  std::vector<int> offsets;  // first one-hot column of each feature, -1 for target
  int num_inputs = 0;
  Eigen::VectorXd intercepts;  // C_i
  Eigen::MatrixXd weights;     // C_i x num_inputs
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;

  // Softmax probabilities g for a full record (the target's value is
  // ignored).
  std::vector<double> Probabilities(std::span<const Category> record) const;
  // Mean log-likelihood over the dataset's rows.
  double MeanLogLikelihood(const Dataset& dataset) const;
};

struct GlmFitOptions {
  double lambda = 1e-3;
  int max_iterations = 500;
  double tolerance = 1e-6;
};

// Minimizes -mean log-likelihood + lambda/2 ||W||^2 (intercepts unpenalized)
// with L-BFGS from zero. Stops when the gradient 2-norm reaches `tolerance`
// or after max_iterations; `converged` records which. Throws
// PegsError(kData) when N < C_i.
GlmConditional FitGlmConditional(const Dataset& dataset, int target,
                                 const GlmFitOptions& options = {});

// k-fold cross-validation over a lambda grid (rows assigned to fold r % k);
// returns the lambda with the lowest held-out log-loss.
double SelectLambdaByCrossValidation(const Dataset& dataset, int target,
                                     std::span<const double> grid, int folds,
                                     const GlmFitOptions& options = {});

// (g_j + alpha) / (1 + C alpha). Throws PegsError(kData) unless g sums to 1
// within 1e-12.
std::vector<double> PerturbProbabilities(std::span<const double> g,
                                         double alpha);

std::vector<double> PmiProbability(const GlmConditional& model,
                                   std::span<const Category> record,
                                   double alpha);

struct PmiModels {
  SchemaPtr schema;
  std::vector<GlmConditional> models;  // one per feature, in schema order
};

PmiModels FitPmiModels(const Dataset& dataset, const GlmFitOptions& options,
                       int threads = 1);

nlohmann::json PmiModelsToJson(const PmiModels& models);
PmiModels PmiModelsFromJson(const nlohmann::json& j);
void SavePmiModels(const PmiModels& models, const std::string& path);
PmiModels LoadPmiModels(const std::string& path);

// Sequential imputation pass in schema order with perturbed GLM
// conditionals. Same seeding and stream layout as Synthesize.
SynthesisOutput PmiSynthesizeWithAlpha(const PmiModels& models, double alpha,
                                       const SeedPool& pool,
                                       const SynthesisOptions& options);

// alpha = AlphaForEpsilon(epsilon, M). Only the per-sample DP criterion
// applies; others throw PegsError(kUsage).
SynthesisOutput PmiSynthesize(const PmiModels& models,
                              const PrivacySpec& privacy, const SeedPool& pool,
                              const SynthesisOptions& options);

}  // namespace pegs

#endif  // PEGS_PMI_H_
