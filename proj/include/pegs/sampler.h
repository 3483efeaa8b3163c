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

#ifndef PEGS_SAMPLER_H_
#define PEGS_SAMPLER_H_

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pegs/blocks.h"
#include "pegs/privacy.h"
#include "pegs/random.h"
#include "pegs/schema.h"

namespace pegs {

// Starting records for synthesis. Either an explicit list drawn uniformly
// with replacement, or (when built from a schema alone) uniformly random
// records over the whole domain so that no data is consulted.
class SeedPool {
 public:
  explicit SeedPool(std::vector<Record> records);
  static SeedPool FromDataset(const Dataset& dataset);
  static SeedPool UniformOverDomain(SchemaPtr schema);

  Record Draw(RngStream& rng) const;
  bool uniform() const { return schema_ != nullptr; }
  std::size_t size() const { return records_.size(); }

 private:
  SeedPool() = default;

  std::vector<Record> records_;
  SchemaPtr schema_;
};

// (feature, hash key) pairs whose conditional reads as uniform. Private to a
// single block of PeGS.rs; the shared blocks are never modified.
class ResetOverlay {
 public:
  explicit ResetOverlay(int num_features) : reset_(num_features) {}

  bool IsReset(int feature, std::uint64_t key) const {
    return reset_[feature].contains(key);
  }
  void Mark(int feature, std::uint64_t key) { reset_[feature].insert(key); }
  std::size_t size() const;
  void Clear();

 private:
  std::vector<std::unordered_set<std::uint64_t>> reset_;
};

struct TraceStep {
  int feature;
  std::uint64_t key;
  Category before;
  Category after;
};

// One sequential pass: the seed and the M resampling steps in visit order.
struct SynthesisTrace {
  Record seed;
  std::vector<TraceStep> steps;

  Record Replay() const;
};

struct SampleResult {
  Record record;
  SynthesisTrace trace;
};

// One PeGS pass: for i = 1..M, x_i ~ Pr_alpha(x_i | h(x_{1:i-1}, s_{i+1:M})).
// With an overlay, reset pairs read as uniform. Throws PegsError(kData) when
// alpha = 0 reaches an unseen key.
SampleResult PegsSample(const BuildingBlocks& blocks,
                        std::span<const Category> seed, double alpha,
                        RngStream& rng, const ResetOverlay* overlay = nullptr);

// The distribution a pass draws feature `feature` from at hash key `key`:
// uniform when the overlay has reset the pair, the perturbed conditional
// otherwise.
std::vector<double> PassConditional(const BuildingBlocks& blocks, int feature,
                                    std::uint64_t key, double alpha,
                                    const ResetOverlay* overlay = nullptr);

// B chained passes from one seed; after each pass every visited
// (feature, key) pair is reset to uniform for the rest of the block. The
// overlay, when given, receives the resets (it is cleared first).
std::vector<Record> PegsRsBlock(const BuildingBlocks& blocks,
                                std::span<const Category> seed, double alpha,
                                int block_size, RngStream& rng,
                                ResetOverlay* overlay = nullptr,
                                std::vector<SynthesisTrace>* traces = nullptr);

// Per-row l-diversity alphas, solved on first use. Safe for concurrent use.
class LDiversityAlphaCache {
 public:
  LDiversityAlphaCache(const BuildingBlocks& blocks, double l);

  // Alpha for the row stored at `key`, or nullopt for an unseen key (whose
  // conditional is taken as uniform).
  std::optional<double> Alpha(int feature, std::uint64_t key);
  std::size_t size() const;

 private:
  const BuildingBlocks& blocks_;
  double l_;
  mutable std::shared_mutex mu_;
  std::vector<std::unordered_map<std::uint64_t, double>> cache_;
};

struct SynthesisOptions {
  int num_samples = 1000;
  int num_datasets = 1;
  std::uint64_t seed = 0;
  bool keep_traces = false;
  int threads = 1;
  PriorShape prior = PriorShape::kUniform;
};

struct SynthesisOutput {
  std::vector<Dataset> datasets;
  // traces[k] holds one trace per pass, in sample order.
  std::vector<std::vector<SynthesisTrace>> traces;
};

// K synthetic datasets of n records. dp_per_sample and l_diversity run one
// pass per record from a fresh pool seed; dp_per_block runs ceil(n / B)
// blocks, truncating the last. Record (k, j) depends only on the seed and
// its stream, so output is identical for any thread count.
SynthesisOutput Synthesize(const BuildingBlocks& blocks,
                           const PrivacySpec& privacy, const SeedPool& pool,
                           const SynthesisOptions& options);

// One JSON line: {"dataset", "sample", "seed", "steps", "final"} with labels.
std::string TraceToJsonLine(const SynthesisTrace& trace, const Schema& schema,
                            int dataset, int sample);

// Text table: the seed row, then one row per step with the resampled value
// marked '*' when it changed.
std::string RenderTraceTable(const SynthesisTrace& trace,
                             const Schema& schema);

}  // namespace pegs

#endif  // PEGS_SAMPLER_H_
