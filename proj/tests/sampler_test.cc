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

#include <cmath>
#include <map>
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "pegs/error.h"
#include "test_util.h"

namespace pegs {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using testutil::MakeDataset;
using testutil::MakeSchema;
using testutil::RandomDataset;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const PegsError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a PegsError";
  return ErrorCode::kUsage;
}

Dataset PointMass(int rows) {
  std::vector<std::vector<int>> cells(rows, std::vector<int>{1, 2, 0});
  return MakeDataset(MakeSchema({2, 3, 2}), cells);
}

TEST(PegsSampleTest, PointMassStaysPut) {
  const BuildingBlocks blocks = Disintegrate(PointMass(20), 2);
  const Record seed{1, 2, 0};
  RngStream rng(1, 1);
  for (int t = 0; t < 50; ++t) {
    EXPECT_THAT(PegsSample(blocks, seed, 0.0, rng).record, ElementsAre(1, 2, 0));
  }
}

TEST(PegsSampleTest, HugeAlphaIsNearlyUniform) {
  const BuildingBlocks blocks = Disintegrate(PointMass(20), 2);
  const Record seed{1, 2, 0};
  RngStream rng(2, 2);
  std::vector<int> hits(3, 0);
  constexpr int kDraws = 30000;
  for (int t = 0; t < kDraws; ++t) ++hits[PegsSample(blocks, seed, 1e9, rng).record[1]];
  double chi2 = 0.0;
  for (int h : hits) chi2 += (h - kDraws / 3.0) * (h - kDraws / 3.0) / (kDraws / 3.0);
  EXPECT_LT(chi2, 13.8);  // 2 dof, 99.9%
}

// Property: the empirical distribution of a pass matches the exact output
// distribution obtained by enumeration.
TEST(PegsSampleTest, EmpiricalMatchesExactDistribution) {
  std::mt19937_64 gen(4);
  const SchemaPtr schema = MakeSchema({2, 3, 2});
  const BuildingBlocks blocks = Disintegrate(RandomDataset(schema, 30, gen), 1);
  const Record seed{0, 1, 1};
  const double alpha = 0.7;
  const auto exact = ExactOutputDistribution(blocks, seed, alpha);
  std::vector<int> hits(exact.size(), 0);
  RngStream rng(3, 3);
  constexpr int kDraws = 60000;
  for (int t = 0; t < kDraws; ++t) {
    ++hits[EncodeRecord(*schema, PegsSample(blocks, seed, alpha, rng).record)];
  }
  double chi2 = 0.0;
  for (std::size_t x = 0; x < exact.size(); ++x) {
    const double expected = kDraws * exact[x];
    ASSERT_GT(expected, 5.0);
    chi2 += (hits[x] - expected) * (hits[x] - expected) / expected;
  }
  EXPECT_LT(chi2, 31.3);  // 11 dof, 99.9%
}

TEST(PegsSampleTest, TraceRecordsEveryFeatureInOrder) {
  std::mt19937_64 gen(8);
  const SchemaPtr schema = MakeSchema({2, 3, 4, 2, 2});
  const BuildingBlocks blocks = Disintegrate(RandomDataset(schema, 100, gen), 2);
  const Record seed{1, 0, 3, 1, 0};
  RngStream rng(5, 5);
  const SampleResult result = PegsSample(blocks, seed, 0.5, rng);
  ASSERT_EQ(result.trace.steps.size(), 5u);
  EXPECT_EQ(result.trace.seed, seed);
  Record running = seed;
  for (int i = 0; i < 5; ++i) {
    const TraceStep& step = result.trace.steps[i];
    EXPECT_EQ(step.feature, i);
    EXPECT_EQ(step.before, running[i]);
    EXPECT_EQ(step.key, HashRecord(running, blocks.tables[i].hash));
    running[i] = step.after;
  }
  EXPECT_EQ(result.trace.Replay(), result.record);

  const auto line = nlohmann::json::parse(
      TraceToJsonLine(result.trace, *schema, 0, 7));
  EXPECT_EQ(line["sample"], 7);
  EXPECT_EQ(line["steps"].size(), 5u);
  EXPECT_EQ(line["steps"][2]["feature"], "f2");
  EXPECT_EQ(line["seed"][2], "c3");
  const std::string table = RenderTraceTable(result.trace, *schema);
  EXPECT_THAT(table, HasSubstr("seed"));
  EXPECT_THAT(table, HasSubstr("X5 | X-5"));
}

TEST(PegsSampleTest, RejectsBadSeedAndAlpha) {
  const BuildingBlocks blocks = Disintegrate(PointMass(3), 1);
  RngStream rng(0, 0);
  const Record short_seed{1, 2};
  const Record wide_value{1, 3, 0};
  const Record ok{1, 2, 0};
  EXPECT_EQ(CodeOf([&] { PegsSample(blocks, short_seed, 1.0, rng); }), ErrorCode::kData);
  EXPECT_EQ(CodeOf([&] { PegsSample(blocks, wide_value, 1.0, rng); }), ErrorCode::kData);
  EXPECT_EQ(CodeOf([&] { PegsSample(blocks, ok, -1.0, rng); }), ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([&] { PegsRsBlock(blocks, ok, 1.0, 0, rng); }), ErrorCode::kUsage);
  EXPECT_EQ(CodeOf([&] { PegsRsBlock(blocks, ok, 0.0, 2, rng); }), ErrorCode::kPrivacy);
}

TEST(PegsRsTest, SingleRecordBlockEqualsPlainPass) {
  std::mt19937_64 gen(6);
  const BuildingBlocks blocks =
      Disintegrate(RandomDataset(MakeSchema({3, 2, 4}), 50, gen), 1);
  const Record seed{2, 1, 0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    RngStream a(s, 0), b(s, 0);
    EXPECT_EQ(PegsRsBlock(blocks, seed, 0.3, 1, a).front(),
              PegsSample(blocks, seed, 0.3, b).record);
  }
}

TEST(PegsRsTest, VisitedKeysAreResetToUniform) {
  const BuildingBlocks blocks = Disintegrate(PointMass(50), 2);
  const Record seed{1, 2, 0};
  std::vector<int> second_first_feature(2, 0);
  constexpr int kBlocks = 4000;
  for (int t = 0; t < kBlocks; ++t) {
    RngStream rng(t, 1);
    ResetOverlay overlay(3);
    std::vector<SynthesisTrace> traces;
    const auto records =
        PegsRsBlock(blocks, seed, 1e-9, 2, rng, &overlay, &traces);
    ASSERT_EQ(records.size(), 2u);
    ASSERT_EQ(traces.size(), 2u);
    EXPECT_THAT(records[0], ElementsAre(1, 2, 0));
    EXPECT_EQ(traces[1].seed, records[0]);
    EXPECT_TRUE(overlay.IsReset(0, traces[0].steps[0].key));
    ++second_first_feature[records[1][0]];
  }
  // Without the reset the first feature would stay at 1 with probability ~1.
  EXPECT_NEAR(second_first_feature[0] / static_cast<double>(kBlocks), 0.5, 0.04);
}

TEST(PassConditionalTest, HonorsOverlay) {
  const BuildingBlocks blocks = Disintegrate(PointMass(10), 2);
  const Record seed{1, 2, 0};
  const std::uint64_t key = HashRecord(seed, blocks.tables[1].hash);
  const auto plain = PassConditional(blocks, 1, key, 1.0);
  EXPECT_EQ(plain, PerturbedConditional(blocks.tables[1].Find(key), 3, 1.0));
  ResetOverlay overlay(3);
  overlay.Mark(1, key);
  EXPECT_THAT(PassConditional(blocks, 1, key, 1.0, &overlay),
              ElementsAre(1.0 / 3, 1.0 / 3, 1.0 / 3));
  EXPECT_EQ(PassConditional(blocks, 0, key, 1.0, &overlay),
            PassConditional(blocks, 0, key, 1.0));
  EXPECT_EQ(CodeOf([&] { PassConditional(blocks, 3, key, 1.0); }), ErrorCode::kUsage);
}

TEST(ResetOverlayTest, MarkClearAndSize) {
  ResetOverlay overlay(2);
  overlay.Mark(0, 5);
  overlay.Mark(0, 5);
  overlay.Mark(1, 5);
  EXPECT_EQ(overlay.size(), 2u);
  EXPECT_TRUE(overlay.IsReset(1, 5));
  EXPECT_FALSE(overlay.IsReset(1, 6));
  overlay.Clear();
  EXPECT_EQ(overlay.size(), 0u);
}

TEST(SeedPoolTest, DrawsFromRowsOrDomain) {
  const Dataset d = PointMass(4);
  const SeedPool rows = SeedPool::FromDataset(d);
  EXPECT_FALSE(rows.uniform());
  EXPECT_EQ(rows.size(), 4u);
  RngStream rng(0, 0);
  EXPECT_THAT(rows.Draw(rng), ElementsAre(1, 2, 0));
  const SeedPool domain = SeedPool::UniformOverDomain(d.schema_ptr());
  EXPECT_TRUE(domain.uniform());
  std::set<Record> seen;
  for (int t = 0; t < 500; ++t) seen.insert(domain.Draw(rng));
  EXPECT_EQ(seen.size(), 12u);
  EXPECT_EQ(CodeOf([&] { SeedPool::FromDataset(Dataset(d.schema_ptr())); }),
            ErrorCode::kData);
}

class SynthesizeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 gen(12);
    data_ = RandomDataset(MakeSchema({3, 2, 4, 2}), 300, gen);
    blocks_ = Disintegrate(*data_, 2);
  }
  std::optional<Dataset> data_;
  BuildingBlocks blocks_;
};

TEST_F(SynthesizeTest, ShapesAndThreadInvariance) {
  const SeedPool pool = SeedPool::FromDataset(*data_);
  for (const PrivacySpec& privacy :
       {PrivacySpec::DpPerSample(1.0), PrivacySpec::DpPerBlock(5.0, 4),
        PrivacySpec::LDiversity(1.5)}) {
    SynthesisOptions options;
    options.num_samples = 37;
    options.num_datasets = 2;
    options.seed = 99;
    options.keep_traces = true;
    const SynthesisOutput serial = Synthesize(blocks_, privacy, pool, options);
    options.threads = 4;
    const SynthesisOutput parallel = Synthesize(blocks_, privacy, pool, options);
    ASSERT_EQ(serial.datasets.size(), 2u);
    EXPECT_EQ(serial.datasets[0].num_rows(), 37);
    EXPECT_TRUE(Validate(serial.datasets[0]).empty());
    EXPECT_EQ(serial.datasets, parallel.datasets);
    EXPECT_NE(serial.datasets[0], serial.datasets[1]);
    ASSERT_EQ(serial.traces[1].size(), 37u);
    for (int r = 0; r < 37; ++r) {
      const auto row = serial.datasets[1].row(r);
      EXPECT_EQ(serial.traces[1][r].Replay(), Record(row.begin(), row.end()));
    }
  }
}

TEST_F(SynthesizeTest, SmallDatasetsDiffer) {
  SynthesisOptions options;
  options.num_samples = 5;
  options.num_datasets = 2;
  const SynthesisOutput out =
      Synthesize(blocks_, PrivacySpec::DpPerSample(1.0),
                 SeedPool::UniformOverDomain(data_->schema_ptr()), options);
  EXPECT_NE(out.datasets[0], out.datasets[1]);
  EXPECT_TRUE(out.traces[0].empty());
}

TEST_F(SynthesizeTest, SeedChangesOutput) {
  const SeedPool pool = SeedPool::FromDataset(*data_);
  SynthesisOptions a, b;
  a.num_samples = b.num_samples = 50;
  b.seed = 1;
  EXPECT_NE(Synthesize(blocks_, PrivacySpec::DpPerSample(2.0), pool, a).datasets,
            Synthesize(blocks_, PrivacySpec::DpPerSample(2.0), pool, b).datasets);
  EXPECT_EQ(Synthesize(blocks_, PrivacySpec::DpPerSample(2.0), pool, a).datasets,
            Synthesize(blocks_, PrivacySpec::DpPerSample(2.0), pool, a).datasets);
}

TEST_F(SynthesizeTest, ErrorPaths) {
  const SeedPool pool = SeedPool::FromDataset(*data_);
  SynthesisOptions options;
  options.num_samples = 0;
  EXPECT_EQ(CodeOf([&] {
              Synthesize(blocks_, PrivacySpec::DpPerSample(1.0), pool, options);
            }),
            ErrorCode::kUsage);
  options.num_samples = 10;
  options.num_datasets = 0;
  EXPECT_EQ(CodeOf([&] {
              Synthesize(blocks_, PrivacySpec::DpPerSample(1.0), pool, options);
            }),
            ErrorCode::kUsage);
  options.num_datasets = 1;
  EXPECT_EQ(CodeOf([&] {
              Synthesize(blocks_, PrivacySpec::DpPerSample(0.0), pool, options);
            }),
            ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([&] {
              Synthesize(blocks_, PrivacySpec::LDiversity(2.5), pool, options);
            }),
            ErrorCode::kPrivacy);
  const SeedPool wrong = SeedPool({Record{0, 0}});
  EXPECT_EQ(CodeOf([&] {
              Synthesize(blocks_, PrivacySpec::DpPerSample(1.0), wrong, options);
            }),
            ErrorCode::kData);
}

// Property: every stored count row gets an alpha whose conditional reaches
// entropy log l.
TEST_F(SynthesizeTest, LDiversityAlphasReachTarget) {
  const double l = 1.8;
  LDiversityAlphaCache cache(blocks_, l);
  for (int i = 0; i < blocks_.num_features(); ++i) {
    for (const auto& [key, row] : blocks_.tables[i].rows) {
      const auto alpha = cache.Alpha(i, key);
      ASSERT_TRUE(alpha.has_value());
      const auto p = PerturbedConditional(&row, blocks_.schema->num_categories(i), *alpha);
      EXPECT_GE(Entropy(p), std::log(l) - 1e-9);
    }
  }
  EXPECT_FALSE(cache.Alpha(0, blocks_.tables[0].hash.key_space + 1).has_value());
}

}  // namespace
}  // namespace pegs
