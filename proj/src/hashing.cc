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

#include "pegs/hashing.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pegs/error.h"

namespace pegs {
namespace {

constexpr std::uint64_t kTailSeed = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kMaxKeySpace = std::uint64_t{1} << 62;

}  // namespace

double MutualInformation(const Dataset& dataset, int i, int j) {
  const int n = dataset.num_rows();
  if (n == 0) return 0.0;
  const int ci = dataset.schema().num_categories(i);
  const int cj = dataset.schema().num_categories(j);
  std::vector<std::int64_t> joint(static_cast<std::size_t>(ci) * cj, 0);
  std::vector<std::int64_t> pi(ci, 0), pj(cj, 0);
  for (int r = 0; r < n; ++r) {
    const Category a = dataset.at(r, i);
    const Category b = dataset.at(r, j);
    ++joint[static_cast<std::size_t>(a) * cj + b];
    ++pi[a];
    ++pj[b];
  }
  const double total = n;
  double mi = 0.0;
  for (int a = 0; a < ci; ++a) {
    for (int b = 0; b < cj; ++b) {
      const auto c = joint[static_cast<std::size_t>(a) * cj + b];
      if (c == 0) continue;
      // p(a,b) log(p(a,b) / (p(a) p(b))) = p(a,b) log(c N / (n_a n_b))
      mi += (c / total) *
            std::log(c * total / (static_cast<double>(pi[a]) * pj[b]));
    }
  }
  return std::max(mi, 0.0);
}

HashSpec MakeHashSpec(const Schema& schema, int target,
                      std::vector<int> ordering, int m) {
  const int num_features = schema.num_features();
  if (target < 0 || target >= num_features) {
    ThrowUsage("hash target " + std::to_string(target) + " out of range");
  }
  if (m < 1) ThrowUsage("m must be at least 1, got " + std::to_string(m));
  std::vector<int> sorted = ordering;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected;
  for (int f = 0; f < num_features; ++f) {
    if (f != target) expected.push_back(f);
  }
  if (sorted != expected) {
    ThrowData("hash ordering for feature " + std::to_string(target) +
              " is not a permutation of the other features");
  }
  HashSpec spec;
  spec.target = target;
  spec.ordering = std::move(ordering);
  spec.m = std::min(m, num_features - 1);
  spec.key_space = 1;
  for (int k = 0; k < spec.m; ++k) {
    const int radix = schema.num_categories(spec.ordering[k]);
    spec.radices.push_back(radix);
    if (spec.key_space > kMaxKeySpace / static_cast<std::uint64_t>(radix)) {
      ThrowUsage("hash key space overflows 2^62; lower m");
    }
    spec.key_space *= static_cast<std::uint64_t>(radix);
  }
  if (spec.has_tail()) spec.key_space *= 2;
  return spec;
}

HashSpec BuildHashSpec(const Dataset& dataset, int target, int m) {
  const int num_features = dataset.num_features();
  if (m < 1) ThrowUsage("m must be at least 1, got " + std::to_string(m));
  std::vector<std::pair<double, int>> scored;
  for (int f = 0; f < num_features; ++f) {
    if (f == target) continue;
    scored.emplace_back(MutualInformation(dataset, target, f), f);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return a.second < b.second;
                   });
  std::vector<int> ordering;
  ordering.reserve(scored.size());
  for (const auto& [mi, f] : scored) ordering.push_back(f);
  return MakeHashSpec(dataset.schema(), target, std::move(ordering), m);
}

std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t TailDigest(std::span<const Category> values) {
  std::uint64_t h = kTailSeed;
  for (std::size_t pos = 0; pos < values.size(); ++pos) {
    const std::uint64_t word =
        (static_cast<std::uint64_t>(pos) << 32) |
        static_cast<std::uint32_t>(values[pos]);
    h = Mix64(h ^ word);
  }
  return h;
}

int OneBitTail(std::span<const Category> values) {
  if (values.empty()) return 0;
  return static_cast<int>(TailDigest(values) & 1u);
}

namespace {

template <typename ValueAt>
std::uint64_t EncodeKey(const HashSpec& spec, ValueAt value_at) {
  std::uint64_t key = 0;
  for (int k = 0; k < spec.m; ++k) {
    key = key * static_cast<std::uint64_t>(spec.radices[k]) +
          static_cast<std::uint64_t>(value_at(spec.ordering[k]));
  }
  if (!spec.has_tail()) return key;
  // Same digest as TailDigest over the tail values, without materializing them.
  std::uint64_t h = kTailSeed;
  const std::size_t tail_len = spec.ordering.size() - spec.m;
  for (std::size_t t = 0; t < tail_len; ++t) {
    const Category v = value_at(spec.ordering[spec.m + t]);
    h = Mix64(h ^ ((static_cast<std::uint64_t>(t) << 32) |
                   static_cast<std::uint32_t>(v)));
  }
  return key * 2 + (h & 1u);
}

}  // namespace

std::uint64_t HashCondition(std::span<const Category> x_minus_i,
                            const HashSpec& spec) {
  return EncodeKey(spec, [&](int feature) {
    return x_minus_i[feature < spec.target ? feature : feature - 1];
  });
}

std::uint64_t HashRecord(std::span<const Category> record,
                         const HashSpec& spec) {
  return EncodeKey(spec, [&](int feature) { return record[feature]; });
}

nlohmann::json HashSpecToJson(const HashSpec& spec) {
  return nlohmann::json{{"target", spec.target},
                        {"ordering", spec.ordering},
                        {"m", spec.m},
                        {"key_space", spec.key_space}};
}

HashSpec HashSpecFromJson(const Schema& schema, const nlohmann::json& j) {
  HashSpec spec = MakeHashSpec(schema, j.at("target").get<int>(),
                               j.at("ordering").get<std::vector<int>>(),
                               j.at("m").get<int>());
  if (j.contains("key_space") &&
      j["key_space"].get<std::uint64_t>() != spec.key_space) {
    ThrowData("stored key_space disagrees with the schema");
  }
  return spec;
}

}  // namespace pegs
