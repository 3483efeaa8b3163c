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

#include "pegs/sampler.h"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "pegs/error.h"
#include "pegs/hashing.h"
#include "pegs/parallel.h"
#include "sequential_pass.h"

namespace pegs {
namespace {

void FillUniform(std::span<double> p) {
  std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
}

void CheckRecord(const Schema& schema, std::span<const Category> record,
                 const char* what) {
  if (static_cast<int>(record.size()) != schema.num_features()) {
    ThrowData(std::string(what) + " has the wrong number of features");
  }
  for (int i = 0; i < schema.num_features(); ++i) {
    if (record[i] < 0 || record[i] >= schema.num_categories(i)) {
      ThrowData(std::string(what) + " has an out-of-range value for '" +
                schema.feature(i).name + "'");
    }
  }
}

// Conditional for feature i at the record's current hash key, honoring the
// overlay and the prior shape.
std::uint64_t FillPegs(const BuildingBlocks& blocks, int i,
                       std::span<const Category> record, double alpha,
                       PriorShape prior, const ResetOverlay* overlay,
                       std::span<double> p) {
  const FeatureTable& table = blocks.tables[i];
  const std::uint64_t key = HashRecord(record, table.hash);
  if (overlay && overlay->IsReset(i, key)) {
    FillUniform(p);
  } else if (prior == PriorShape::kUniform) {
    PerturbedConditional(table.Find(key), static_cast<int>(p.size()), alpha,
                         p);
  } else {
    const auto q = Conditional(blocks, i, key, alpha, prior);
    std::copy(q.begin(), q.end(), p.begin());
  }
  return key;
}

SampleResult RunPass(const BuildingBlocks& blocks,
                     std::span<const Category> seed, double alpha,
                     PriorShape prior, RngStream& rng,
                     const ResetOverlay* overlay, bool keep_trace) {
  SampleResult result;
  result.record.assign(seed.begin(), seed.end());
  internal::SequentialPass(
      *blocks.schema, result.record, rng,
      [&](int i, const Record& record, std::vector<double>& p) {
        return FillPegs(blocks, i, record, alpha, prior, overlay, p);
      },
      keep_trace ? &result.trace : nullptr);
  return result;
}

std::vector<Record> RunBlock(const BuildingBlocks& blocks,
                             std::span<const Category> seed, double alpha,
                             PriorShape prior, int block_size, RngStream& rng,
                             ResetOverlay& overlay,
                             std::vector<SynthesisTrace>* traces) {
  overlay.Clear();
  std::vector<Record> out;
  out.reserve(block_size);
  Record previous(seed.begin(), seed.end());
  for (int b = 0; b < block_size; ++b) {
    SampleResult pass =
        RunPass(blocks, previous, alpha, prior, rng, &overlay, true);
    for (const TraceStep& step : pass.trace.steps) {
      overlay.Mark(step.feature, step.key);
    }
    previous = pass.record;
    out.push_back(std::move(pass.record));
    if (traces) traces->push_back(std::move(pass.trace));
  }
  return out;
}

}  // namespace

SeedPool::SeedPool(std::vector<Record> records) : records_(std::move(records)) {
  if (records_.empty()) ThrowData("seed pool is empty");
}

SeedPool SeedPool::FromDataset(const Dataset& dataset) {
  std::vector<Record> records;
  records.reserve(dataset.num_rows());
  for (int r = 0; r < dataset.num_rows(); ++r) {
    records.emplace_back(dataset.row(r).begin(), dataset.row(r).end());
  }
  return SeedPool(std::move(records));
}

SeedPool SeedPool::UniformOverDomain(SchemaPtr schema) {
  SeedPool pool;
  pool.schema_ = std::move(schema);
  return pool;
}

Record SeedPool::Draw(RngStream& rng) const {
  if (schema_) {
    Record record(schema_->num_features());
    for (int i = 0; i < schema_->num_features(); ++i) {
      record[i] = static_cast<Category>(
          rng.UniformInt(static_cast<std::uint64_t>(schema_->num_categories(i))));
    }
    return record;
  }
  return records_[rng.UniformInt(records_.size())];
}

std::size_t ResetOverlay::size() const {
  std::size_t n = 0;
  for (const auto& s : reset_) n += s.size();
  return n;
}

void ResetOverlay::Clear() {
  for (auto& s : reset_) s.clear();
}

Record SynthesisTrace::Replay() const {
  Record record = seed;
  for (const TraceStep& step : steps) record[step.feature] = step.after;
  return record;
}

SampleResult PegsSample(const BuildingBlocks& blocks,
                        std::span<const Category> seed, double alpha,
                        RngStream& rng, const ResetOverlay* overlay) {
  CheckRecord(*blocks.schema, seed, "seed");
  if (!(alpha >= 0.0)) ThrowPrivacy("alpha must be non-negative");
  return RunPass(blocks, seed, alpha, PriorShape::kUniform, rng, overlay, true);
}

std::vector<double> PassConditional(const BuildingBlocks& blocks, int feature,
                                    std::uint64_t key, double alpha,
                                    const ResetOverlay* overlay) {
  if (feature < 0 || feature >= blocks.num_features()) {
    ThrowUsage("feature index out of range");
  }
  std::vector<double> p(blocks.schema->num_categories(feature));
  if (overlay && overlay->IsReset(feature, key)) {
    FillUniform(p);
  } else {
    PerturbedConditional(blocks.tables[feature].Find(key),
                         static_cast<int>(p.size()), alpha, p);
  }
  return p;
}

std::vector<Record> PegsRsBlock(const BuildingBlocks& blocks,
                                std::span<const Category> seed, double alpha,
                                int block_size, RngStream& rng,
                                ResetOverlay* overlay,
                                std::vector<SynthesisTrace>* traces) {
  CheckRecord(*blocks.schema, seed, "seed");
  if (block_size < 1) ThrowUsage("block size must be >= 1");
  if (!(alpha > 0.0)) ThrowPrivacy("block sampling needs alpha > 0");
  ResetOverlay local(blocks.num_features());
  return RunBlock(blocks, seed, alpha, PriorShape::kUniform, block_size, rng,
                  overlay ? *overlay : local, traces);
}

LDiversityAlphaCache::LDiversityAlphaCache(const BuildingBlocks& blocks,
                                           double l)
    : blocks_(blocks), l_(l), cache_(blocks.num_features()) {}

std::optional<double> LDiversityAlphaCache::Alpha(int feature,
                                                  std::uint64_t key) {
  const CountRow* row = blocks_.tables[feature].Find(key);
  if (!row) return std::nullopt;
  {
    std::shared_lock lock(mu_);
    auto it = cache_[feature].find(key);
    if (it != cache_[feature].end()) return it->second;
  }
  const double alpha =
      AlphaForLDiversity(*row, l_, blocks_.schema->num_categories(feature));
  std::unique_lock lock(mu_);
  cache_[feature].emplace(key, alpha);
  return alpha;
}

std::size_t LDiversityAlphaCache::size() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& c : cache_) n += c.size();
  return n;
}

SynthesisOutput Synthesize(const BuildingBlocks& blocks,
                           const PrivacySpec& privacy, const SeedPool& pool,
                           const SynthesisOptions& options) {
  if (options.num_samples < 1) ThrowUsage("number of samples must be >= 1");
  if (options.num_datasets < 1) ThrowUsage("number of datasets must be >= 1");
  privacy.Check();
  const Schema& schema = *blocks.schema;
  const int m = schema.num_features();
  const int n = options.num_samples;

  double alpha = 0.0;
  std::optional<LDiversityAlphaCache> ldiv;
  if (privacy.criterion == PrivacySpec::Criterion::kLDiversity) {
    for (int i = 0; i < m; ++i) {
      if (privacy.l > schema.num_categories(i)) {
        ThrowPrivacy("l = " + std::to_string(privacy.l) + " exceeds C = " +
                     std::to_string(schema.num_categories(i)) +
                     " for feature '" + schema.feature(i).name + "'");
      }
    }
    ldiv.emplace(blocks, privacy.l);
  } else {
    alpha = privacy.DerivedAlpha(m);
  }
  const bool block_mode =
      privacy.criterion == PrivacySpec::Criterion::kDpPerBlock;
  const int block_size = block_mode ? privacy.block_size : 1;
  const int units = (n + block_size - 1) / block_size;

  SynthesisOutput output;
  output.traces.resize(options.num_datasets);
  for (int k = 0; k < options.num_datasets; ++k) {
    std::vector<Category> cells(static_cast<std::size_t>(n) * m);
    std::vector<SynthesisTrace> traces(options.keep_traces ? n : 0);
    ParallelFor(units, options.threads, [&](int unit) {
      RngStream rng(options.seed, StreamId(StreamPurpose::kSynthesis,
                                           static_cast<std::uint64_t>(k),
                                           static_cast<std::uint64_t>(unit)));
      const Record seed = pool.Draw(rng);
      CheckRecord(schema, seed, "seed");
      const int first = unit * block_size;
      const int count = std::min(block_size, n - first);
      std::vector<Record> records;
      std::vector<SynthesisTrace> unit_traces;
      if (block_mode) {
        ResetOverlay overlay(m);
        records = RunBlock(blocks, seed, alpha, options.prior, count, rng,
                           overlay, options.keep_traces ? &unit_traces : nullptr);
      } else if (ldiv) {
        SampleResult result;
        result.record = seed;
        internal::SequentialPass(
            schema, result.record, rng,
            [&](int i, const Record& record, std::vector<double>& p) {
              const std::uint64_t key = HashRecord(record, blocks.tables[i].hash);
              const auto row_alpha = ldiv->Alpha(i, key);
              if (!row_alpha) {
                FillUniform(p);
              } else {
                PerturbedConditional(blocks.tables[i].Find(key),
                                     static_cast<int>(p.size()), *row_alpha, p);
              }
              return key;
            },
            options.keep_traces ? &result.trace : nullptr);
        records.push_back(std::move(result.record));
        if (options.keep_traces) unit_traces.push_back(std::move(result.trace));
      } else {
        SampleResult result = RunPass(blocks, seed, alpha, options.prior, rng,
                                      nullptr, options.keep_traces);
        records.push_back(std::move(result.record));
        if (options.keep_traces) unit_traces.push_back(std::move(result.trace));
      }
      for (int j = 0; j < count; ++j) {
        std::copy(records[j].begin(), records[j].end(),
                  cells.begin() + static_cast<std::ptrdiff_t>(first + j) * m);
        if (options.keep_traces) traces[first + j] = std::move(unit_traces[j]);
      }
    });
    output.datasets.emplace_back(blocks.schema, std::move(cells));
    output.traces[k] = std::move(traces);
  }
  return output;
}

namespace {

nlohmann::json Labels(const Schema& schema, std::span<const Category> record) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < schema.num_features(); ++i) {
    out.push_back(schema.feature(i).categories[record[i]]);
  }
  return out;
}

}  // namespace

std::string TraceToJsonLine(const SynthesisTrace& trace, const Schema& schema,
                            int dataset, int sample) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& step : trace.steps) {
    const FeatureSpec& f = schema.feature(step.feature);
    steps.push_back({{"feature", f.name},
                     {"key", step.key},
                     {"from", f.categories[step.before]},
                     {"to", f.categories[step.after]},
                     {"changed", step.before != step.after}});
  }
  nlohmann::json line{{"dataset", dataset},
                      {"sample", sample},
                      {"seed", Labels(schema, trace.seed)},
                      {"steps", std::move(steps)},
                      {"final", Labels(schema, trace.Replay())}};
  return line.dump();
}

std::string RenderTraceTable(const SynthesisTrace& trace,
                             const Schema& schema) {
  const int m = schema.num_features();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"sequence"};
  for (int i = 0; i < m; ++i) header.push_back(schema.feature(i).name);
  rows.push_back(header);
  Record current = trace.seed;
  std::vector<std::string> seed_row{"seed"};
  for (int i = 0; i < m; ++i) {
    seed_row.push_back(schema.feature(i).categories[current[i]]);
  }
  rows.push_back(seed_row);
  for (const TraceStep& step : trace.steps) {
    current[step.feature] = step.after;
    std::vector<std::string> row{"X" + std::to_string(step.feature + 1) +
                                 " | X-" + std::to_string(step.feature + 1)};
    for (int i = 0; i < m; ++i) {
      std::string cell = schema.feature(i).categories[current[i]];
      if (i == step.feature && step.before != step.after) cell += "*";
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(m + 1, 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << "  ";
      out << row[c] << std::string(width[c] - row[c].size(), ' ');
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace pegs
