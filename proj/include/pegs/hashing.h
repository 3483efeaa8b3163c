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

#ifndef PEGS_HASHING_H_
#define PEGS_HASHING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "pegs/schema.h"

namespace pegs {

// Plug-in (maximum-likelihood) mutual information between features i and j,
// in nats. Returns 0 for an empty dataset.
double MutualInformation(const Dataset& dataset, int i, int j);

// Compression of the conditioning vector x_{-i}: the first `m` features of
// `ordering` are encoded exactly as a mixed-radix number, the remaining ones
// collapse into a single tail bit.
struct HashSpec {
  int target = 0;
  std::vector<int> ordering;  // the other M-1 features, most informative first
  int m = 1;
  std::vector<int> radices;   // cardinalities of ordering[0..m)
  std::uint64_t key_space = 1;

  bool has_tail() const { return m < static_cast<int>(ordering.size()); }
};

// Validates `ordering` and derives radices and key_space. `m` larger than
// M-1 is clamped to M-1; m < 1 throws PegsError(kUsage).
HashSpec MakeHashSpec(const Schema& schema, int target,
                      std::vector<int> ordering, int m);

// Orders the other features by descending mutual information with `target`
// (ties by ascending index) and keeps the top `m` in the exact part.
HashSpec BuildHashSpec(const Dataset& dataset, int target, int m);

// Key for x_{-i}, given with the target removed and the other features in
// ascending index order. Always < spec.key_space.
std::uint64_t HashCondition(std::span<const Category> x_minus_i,
                            const HashSpec& spec);

// Same key computed from a full record; the target's own value is ignored.
std::uint64_t HashRecord(std::span<const Category> record,
                         const HashSpec& spec);

// splitmix64 finalizer.
std::uint64_t Mix64(std::uint64_t z);

// 64-bit digest of (position, value) pairs:
//   h0 = 0x9e3779b97f4a7c15
//   h  = Mix64(h ^ ((position << 32) | uint32(value)))   for each value
std::uint64_t TailDigest(std::span<const Category> values);

// Low bit of TailDigest; 0 for an empty vector.
int OneBitTail(std::span<const Category> values);

nlohmann::json HashSpecToJson(const HashSpec& spec);
HashSpec HashSpecFromJson(const Schema& schema, const nlohmann::json& j);

}  // namespace pegs

#endif  // PEGS_HASHING_H_
