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

#include "pegs/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pegs/error.h"

namespace pegs {
namespace {

constexpr double kMaxDomain = 1e6;
constexpr double kEntropySlack = 1e-12;

double PerturbedEntropy(const CountRow& counts, double alpha, int c) {
  const double denom = static_cast<double>(counts.total) + c * alpha;
  double h = 0.0;
  for (int j = 0; j < c; ++j) {
    const double p = (static_cast<double>(counts.counts[j]) + alpha) / denom;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

std::size_t DomainSize(const Schema& schema) {
  double size = 1.0;
  for (int i = 0; i < schema.num_features(); ++i) {
    size *= schema.num_categories(i);
  }
  if (size > kMaxDomain) {
    ThrowUsage("joint domain of " + std::to_string(size) +
               " records is too large to enumerate (limit 1e6)");
  }
  return static_cast<std::size_t>(size);
}

}  // namespace

double AlphaForEpsilon(double epsilon, int num_features) {
  if (!(epsilon > 0.0)) {
    ThrowPrivacy("epsilon must be > 0, got " + std::to_string(epsilon));
  }
  if (num_features < 1) ThrowPrivacy("need at least one feature");
  return 1.0 / std::expm1(epsilon / num_features);
}

double AlphaForBlock(double epsilon, int num_features, int block_size) {
  if (block_size < 1) {
    ThrowPrivacy("block size must be >= 1, got " + std::to_string(block_size));
  }
  return AlphaForEpsilon(epsilon, num_features);
}

double PerSampleEpsilon(double epsilon, int block_size) {
  if (block_size < 1) {
    ThrowPrivacy("block size must be >= 1, got " + std::to_string(block_size));
  }
  return epsilon / block_size;
}

double Entropy(std::span<const double> p) {
  double h = 0.0;
  for (double q : p) {
    if (q > 0.0) h -= q * std::log(q);
  }
  return h;
}

double AlphaForLDiversity(const CountRow& counts, double l,
                          int num_categories) {
  const int c = num_categories;
  if (!(l >= 1.0)) ThrowPrivacy("l must be >= 1, got " + std::to_string(l));
  if (static_cast<int>(counts.counts.size()) != c) {
    ThrowUsage("count row width does not match the category count");
  }
  const double target = std::log(l);
  const double ceiling = std::log(static_cast<double>(c));
  if (target > ceiling + kEntropySlack) {
    ThrowPrivacy("l = " + std::to_string(l) + " exceeds the category count " +
                 std::to_string(c) + "; entropy can never reach log l");
  }
  // An empty row is uniform for every alpha > 0.
  if (counts.total == 0) return 0.0;
  if (PerturbedEntropy(counts, 0.0, c) >= target - kEntropySlack) return 0.0;
  if (target >= ceiling - kEntropySlack) {
    ThrowPrivacy("l = " + std::to_string(l) +
                 " equals the category count; non-uniform counts only reach "
                 "log l asymptotically");
  }
  double lo = 0.0;
  double hi = 1.0;
  constexpr double kCap = 1152921504606846976.0;  // 2^60
  while (PerturbedEntropy(counts, hi, c) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > kCap) {
      ThrowPrivacy("l-diversity alpha exceeds 2^60; l is too close to C");
    }
  }
  for (int iter = 0; iter < 400 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (PerturbedEntropy(counts, mid, c) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

PrivacySpec PrivacySpec::DpPerSample(double epsilon) {
  PrivacySpec spec;
  spec.criterion = Criterion::kDpPerSample;
  spec.epsilon = epsilon;
  return spec;
}

PrivacySpec PrivacySpec::DpPerBlock(double epsilon, int block_size) {
  PrivacySpec spec;
  spec.criterion = Criterion::kDpPerBlock;
  spec.epsilon = epsilon;
  spec.block_size = block_size;
  return spec;
}

PrivacySpec PrivacySpec::LDiversity(double l) {
  PrivacySpec spec;
  spec.criterion = Criterion::kLDiversity;
  spec.l = l;
  return spec;
}

void PrivacySpec::Check() const {
  switch (criterion) {
    case Criterion::kDpPerSample:
      if (!(epsilon > 0.0)) ThrowPrivacy("epsilon must be > 0");
      break;
    case Criterion::kDpPerBlock:
      if (!(epsilon > 0.0)) ThrowPrivacy("epsilon must be > 0");
      if (block_size < 1) ThrowPrivacy("block size must be >= 1");
      break;
    case Criterion::kLDiversity:
      if (!(l >= 1.0)) ThrowPrivacy("l must be >= 1");
      break;
  }
}

double PrivacySpec::DerivedAlpha(int num_features) const {
  Check();
  switch (criterion) {
    case Criterion::kDpPerSample:
      return AlphaForEpsilon(epsilon, num_features);
    case Criterion::kDpPerBlock:
      return AlphaForBlock(epsilon, num_features, block_size);
    case Criterion::kLDiversity:
      break;
  }
  ThrowUsage("l-diversity has no single alpha; it is solved per count row");
}

double PrivacySpec::PerSampleEpsilon() const {
  switch (criterion) {
    case Criterion::kDpPerSample:
      return epsilon;
    case Criterion::kDpPerBlock:
      return pegs::PerSampleEpsilon(epsilon, block_size);
    case Criterion::kLDiversity:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json PrivacySpec::ToJson() const {
  switch (criterion) {
    case Criterion::kDpPerSample:
      return {{"criterion", "dp"}, {"epsilon", epsilon}};
    case Criterion::kDpPerBlock:
      return {{"criterion", "dp-block"},
              {"epsilon", epsilon},
              {"block_size", block_size},
              {"per_sample_epsilon", PerSampleEpsilon()}};
    case Criterion::kLDiversity:
      return {{"criterion", "ldiv"}, {"l", l}};
  }
  return {};
}

PrivacySpec PrivacySpec::FromJson(const nlohmann::json& j) {
  const std::string criterion = j.at("criterion").get<std::string>();
  if (criterion == "dp") return DpPerSample(j.at("epsilon").get<double>());
  if (criterion == "dp-block") {
    return DpPerBlock(j.at("epsilon").get<double>(),
                      j.at("block_size").get<int>());
  }
  if (criterion == "ldiv") return LDiversity(j.at("l").get<double>());
  ThrowUsage("unknown privacy criterion '" + criterion + "'");
}

bool AreNeighbors(const Dataset& a, const Dataset& b) {
  if (a.num_features() != b.num_features()) return false;
  const Dataset& small = a.num_rows() <= b.num_rows() ? a : b;
  const Dataset& large = a.num_rows() <= b.num_rows() ? b : a;
  const int diff = large.num_rows() - small.num_rows();
  if (diff > 1) return false;
  auto sorted_rows = [](const Dataset& d) {
    std::vector<Record> rows;
    rows.reserve(d.num_rows());
    for (int r = 0; r < d.num_rows(); ++r) {
      rows.emplace_back(d.row(r).begin(), d.row(r).end());
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  const auto rs = sorted_rows(small);
  const auto rl = sorted_rows(large);
  if (diff == 0) return rs == rl;
  return std::includes(rl.begin(), rl.end(), rs.begin(), rs.end());
}

std::size_t EncodeRecord(const Schema& schema, std::span<const Category> x) {
  std::size_t index = 0;
  for (int i = 0; i < schema.num_features(); ++i) {
    index = index * schema.num_categories(i) + static_cast<std::size_t>(x[i]);
  }
  return index;
}

Record DecodeRecord(const Schema& schema, std::size_t index) {
  Record x(schema.num_features());
  for (int i = schema.num_features() - 1; i >= 0; --i) {
    const auto c = static_cast<std::size_t>(schema.num_categories(i));
    x[i] = static_cast<Category>(index % c);
    index /= c;
  }
  return x;
}

std::vector<double> ExactOutputDistribution(const BuildingBlocks& blocks,
                                            std::span<const Category> seed,
                                            double alpha) {
  const Schema& schema = *blocks.schema;
  const int m = schema.num_features();
  std::vector<double> out(DomainSize(schema), 0.0);
  Record record(seed.begin(), seed.end());
  std::vector<std::vector<double>> scratch(m);
  for (int i = 0; i < m; ++i) scratch[i].resize(schema.num_categories(i));

  // Depth-first over features in visit order; record holds x_{1:i-1} and the
  // seed's s_{i+1:M} when feature i is expanded.
  auto expand = [&](auto&& self, int i, std::size_t prefix,
                    double prob) -> void {
    if (i == m) {
      out[prefix] += prob;
      return;
    }
    const FeatureTable& table = blocks.tables[i];
    const std::uint64_t key = HashRecord(record, table.hash);
    const int c = schema.num_categories(i);
    std::vector<double>& p = scratch[i];
    PerturbedConditional(table.Find(key), c, alpha, p);
    for (int v = 0; v < c; ++v) {
      record[i] = v;
      self(self, i + 1, prefix * c + v, prob * p[v]);
    }
    record[i] = seed[i];
  };
  expand(expand, 0, 0, 1.0);
  return out;
}

double MaxLogRatio(const BuildingBlocks& first, const BuildingBlocks& second,
                   std::span<const Category> seed, double alpha) {
  const auto p1 = ExactOutputDistribution(first, seed, alpha);
  const auto p2 = ExactOutputDistribution(second, seed, alpha);
  double worst = 0.0;
  for (std::size_t x = 0; x < p1.size(); ++x) {
    if (p1[x] == 0.0 && p2[x] == 0.0) continue;
    if (p1[x] == 0.0 || p2[x] == 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, std::abs(std::log(p1[x]) - std::log(p2[x])));
  }
  return worst;
}

double DpRatioOracle(const Dataset& first, const Dataset& second,
                     std::span<const Category> seed, double alpha, int m) {
  if (!AreNeighbors(first, second)) {
    ThrowUsage("datasets differ by more than one row");
  }
  DomainSize(first.schema());
  return MaxLogRatio(Disintegrate(first, m), Disintegrate(second, m), seed,
                     alpha);
}

}  // namespace pegs
