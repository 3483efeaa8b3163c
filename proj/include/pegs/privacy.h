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

#ifndef PEGS_PRIVACY_H_
#define PEGS_PRIVACY_H_

#include <span>
#include <vector>

#include "json.hpp"
#include "pegs/blocks.h"
#include "pegs/schema.h"

namespace pegs {

// alpha = 1 / (exp(epsilon / M) - 1): the smallest Dirichlet pseudo-count
// for which every output record's probability moves by at most exp(epsilon)
// when one row is added or removed. Throws PegsError(kPrivacy) for
// epsilon <= 0 or M < 1.
double AlphaForEpsilon(double epsilon, int num_features);

// Block sampling with reset spends `epsilon` on the whole block of B
// records, so alpha is AlphaForEpsilon(epsilon, M) and each record costs
// epsilon / B.
double AlphaForBlock(double epsilon, int num_features, int block_size);
double PerSampleEpsilon(double epsilon, int block_size);

// Shannon entropy in nats, 0 log 0 = 0.
double Entropy(std::span<const double> p);

// Smallest alpha >= 0 with H(conditional(counts, alpha)) >= log l, found by
// bisection on the monotone entropy curve. Throws PegsError(kPrivacy) when
// l < 1, l > C, or l = C and the counts are not already uniform.
double AlphaForLDiversity(const CountRow& counts, double l, int num_categories);

struct PrivacySpec {
  enum class Criterion { kDpPerSample, kDpPerBlock, kLDiversity };

  Criterion criterion = Criterion::kDpPerSample;
  double epsilon = 1.0;  // total budget per record (per block for kDpPerBlock)
  int block_size = 1;
  double l = 1.0;

  static PrivacySpec DpPerSample(double epsilon);
  static PrivacySpec DpPerBlock(double epsilon, int block_size);
  static PrivacySpec LDiversity(double l);

  // Throws PegsError(kPrivacy) on out-of-range parameters.
  void Check() const;
  // Alpha for the DP criteria; l-diversity alphas are per count row.
  double DerivedAlpha(int num_features) const;
  double PerSampleEpsilon() const;

  nlohmann::json ToJson() const;
  static PrivacySpec FromJson(const nlohmann::json& j);
};

// True when the two datasets are equal as multisets or one equals the other
// plus exactly one row.
bool AreNeighbors(const Dataset& a, const Dataset& b);

// Probability of every output record for a single sequential pass started at
// `seed`: prod_i Pr(x_i | h(x_{1:i-1}, s_{i+1:M})). Indexed by the mixed-radix
// code of the record with feature 0 most significant. Throws
// PegsError(kUsage) when the joint domain exceeds 1e6 records.
std::vector<double> ExactOutputDistribution(const BuildingBlocks& blocks,
                                            std::span<const Category> seed,
                                            double alpha);

// Decodes an index of ExactOutputDistribution back into a record.
Record DecodeRecord(const Schema& schema, std::size_t index);
std::size_t EncodeRecord(const Schema& schema, std::span<const Category> x);

// max_x |log Pr_1(x | seed) - log Pr_2(x | seed)| over the whole domain.
double MaxLogRatio(const BuildingBlocks& first, const BuildingBlocks& second,
                   std::span<const Category> seed, double alpha);

// Brute-force check of the DP inequality: disintegrates both datasets with
// the same m and enumerates every output record. Throws PegsError(kUsage) if
// the datasets are not neighbors or the domain is too large.
double DpRatioOracle(const Dataset& first, const Dataset& second,
                     std::span<const Category> seed, double alpha, int m);

}  // namespace pegs

#endif  // PEGS_PRIVACY_H_
