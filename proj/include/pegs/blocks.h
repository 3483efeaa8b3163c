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

#ifndef PEGS_BLOCKS_H_
#define PEGS_BLOCKS_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pegs/hashing.h"
#include "pegs/schema.h"

namespace pegs {

// Category counts n_ij observed under one hash key, and their sum N_key.
struct CountRow {
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  friend bool operator==(const CountRow&, const CountRow&) = default;
};

// Hash-keyed count table for one feature. Keys that never occurred are not
// stored and read as all-zero rows.
struct FeatureTable {
  HashSpec hash;
  std::unordered_map<std::uint64_t, CountRow> rows;
  std::vector<std::int64_t> marginal;  // unconditional counts of the target

  const CountRow* Find(std::uint64_t key) const {
    auto it = rows.find(key);
    return it == rows.end() ? nullptr : &it->second;
  }
};

// The disintegrated form of a dataset: everything synthesis needs, and only
// aggregated counts. Immutable once built.
struct BuildingBlocks {
  SchemaPtr schema;
  std::vector<FeatureTable> tables;
  std::int64_t num_rows = 0;

  const Schema& schema_ref() const { return *schema; }
  int num_features() const { return static_cast<int>(tables.size()); }
};

// Counts every row once per feature under its hashed condition. Hash specs
// are derived from the same dataset. Tables are built in parallel across
// features when threads > 1.
BuildingBlocks Disintegrate(const Dataset& dataset, int m, int threads = 1);

// Disintegration under caller-provided hash specs (one per feature).
BuildingBlocks DisintegrateWithSpecs(const Dataset& dataset,
                                     std::vector<HashSpec> specs);

enum class PriorShape {
  kUniform,       // alpha virtual samples in every category
  kProportional,  // C * alpha virtual samples split by the target marginal
};

// Perturbed conditional (n_j + alpha) / (N_key + C alpha). `row` may be null
// for an unseen key. Throws PegsError(kPrivacy) when alpha is negative and
// PegsError(kData) when alpha == 0 meets an empty row.
void PerturbedConditional(const CountRow* row, int num_categories,
                          double alpha, std::span<double> out);
std::vector<double> PerturbedConditional(const CountRow* row,
                                         int num_categories, double alpha);

std::vector<double> Conditional(const BuildingBlocks& blocks, int feature,
                                std::uint64_t key, double alpha,
                                PriorShape prior = PriorShape::kUniform);

// Binary container: magic, version, JSON header (schema, hash specs), then
// per-feature count sections, closed by a CRC-32 of everything before it.
// Keys are written in ascending order so identical blocks give identical
// bytes.
inline constexpr std::uint32_t kBlocksFormatVersion = 1;

std::string SerializeBlocks(const BuildingBlocks& blocks);
BuildingBlocks DeserializeBlocks(std::string_view bytes);
void SaveBlocks(const BuildingBlocks& blocks, const std::string& path);
BuildingBlocks LoadBlocks(const std::string& path);

bool SameBlocks(const BuildingBlocks& a, const BuildingBlocks& b);

}  // namespace pegs

#endif  // PEGS_BLOCKS_H_
