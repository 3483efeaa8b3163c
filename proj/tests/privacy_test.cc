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

#include <cmath>
#include <numeric>
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "pegs/error.h"
#include "test_util.h"

namespace pegs {
namespace {

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

TEST(AlphaForEpsilonTest, ReferenceValue) {
  EXPECT_NEAR(AlphaForEpsilon(1.0, 13), 12.50640962432411869622892, 1e-12);
}

TEST(AlphaForEpsilonTest, UnitAlphaAtLogTwoPerFeature) {
  for (int m = 1; m <= 30; ++m) {
    EXPECT_EQ(AlphaForEpsilon(m * std::log(2.0), m), 1.0) << "M=" << m;
  }
}

TEST(AlphaForEpsilonTest, DecreasesWithEpsilon) {
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0}) {
    const double alpha = AlphaForEpsilon(eps, 13);
    EXPECT_GT(alpha, 0.0);
    EXPECT_LT(alpha, previous);
    previous = alpha;
  }
}

TEST(AlphaForEpsilonTest, RejectsNonPositiveEpsilon) {
  for (double eps : {0.0, -1.0, std::nan("")}) {
    try {
      AlphaForEpsilon(eps, 3);
      FAIL();
    } catch (const PegsError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kPrivacy);
      EXPECT_THAT(e.what(), HasSubstr("epsilon must be > 0"));
    }
  }
  EXPECT_EQ(CodeOf([] { AlphaForEpsilon(1.0, 0); }), ErrorCode::kPrivacy);
}

TEST(BlockBudgetTest, SplitsEpsilonAcrossBlock) {
  EXPECT_DOUBLE_EQ(AlphaForBlock(2.0, 4, 10), AlphaForEpsilon(2.0, 4));
  EXPECT_DOUBLE_EQ(PerSampleEpsilon(2.0, 10), 0.2);
  EXPECT_EQ(CodeOf([] { AlphaForBlock(1.0, 3, 0); }), ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([] { PerSampleEpsilon(1.0, -2); }), ErrorCode::kPrivacy);
}

TEST(PrivacySpecTest, DerivedValuesAndJson) {
  const PrivacySpec block = PrivacySpec::DpPerBlock(10.0, 10);
  EXPECT_DOUBLE_EQ(block.DerivedAlpha(5), AlphaForEpsilon(10.0, 5));
  EXPECT_DOUBLE_EQ(block.PerSampleEpsilon(), 1.0);
  for (const PrivacySpec& spec :
       {PrivacySpec::DpPerSample(0.5), block, PrivacySpec::LDiversity(2.5)}) {
    EXPECT_EQ(PrivacySpec::FromJson(spec.ToJson()).ToJson(), spec.ToJson());
  }
  EXPECT_EQ(CodeOf([] { PrivacySpec::LDiversity(2.0).DerivedAlpha(3); }),
            ErrorCode::kUsage);
  EXPECT_EQ(CodeOf([] { PrivacySpec::DpPerSample(0.0).Check(); }),
            ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([] { PrivacySpec::DpPerBlock(1.0, 0).Check(); }),
            ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([] { PrivacySpec::LDiversity(0.5).Check(); }),
            ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([] { PrivacySpec::FromJson({{"criterion", "k-anon"}}); }),
            ErrorCode::kUsage);
}

TEST(EntropyTest, Basics) {
  const std::vector<double> uniform(4, 0.25);
  EXPECT_NEAR(Entropy(uniform), std::log(4.0), 1e-15);
  const std::vector<double> point{0.0, 1.0};
  EXPECT_DOUBLE_EQ(Entropy(point), 0.0);
}

TEST(LDiversityTest, ReferenceValue) {
  const CountRow counts{{3, 1}, 4};
  const double alpha = AlphaForLDiversity(counts, 1.9, 2);
  EXPECT_NEAR(alpha, 1.1493882321780149717, 1e-9);
  const auto p = PerturbedConditional(&counts, 2, alpha);
  EXPECT_NEAR(Entropy(p), std::log(1.9), 1e-12);
}

TEST(LDiversityTest, ZeroWhenAlreadyDiverse) {
  EXPECT_EQ(AlphaForLDiversity({{2, 2, 2}, 6}, 3.0, 3), 0.0);
  EXPECT_EQ(AlphaForLDiversity({{5, 1}, 6}, 1.0, 2), 0.0);
  EXPECT_EQ(AlphaForLDiversity({{0, 0, 0}, 0}, 2.0, 3), 0.0);
}

TEST(LDiversityTest, ErrorPaths) {
  EXPECT_EQ(CodeOf([] { AlphaForLDiversity({{1, 1}, 2}, 3.0, 2); }),
            ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([] { AlphaForLDiversity({{1, 1}, 2}, 0.5, 2); }),
            ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([] { AlphaForLDiversity({{3, 1}, 4}, 2.0, 2); }),
            ErrorCode::kPrivacy);
  EXPECT_EQ(CodeOf([] { AlphaForLDiversity({{3, 1}, 4}, 1.5, 3); }),
            ErrorCode::kUsage);
}

// Property: the solved alpha is minimal, i.e. it reaches log l and slightly
// smaller values do not.
TEST(LDiversityTest, SolvedAlphaIsTight) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = 2 + static_cast<int>(gen() % 5);
    CountRow row;
    row.counts.resize(c);
    for (auto& n : row.counts) {
      n = static_cast<std::int64_t>(gen() % 30);
      row.total += n;
    }
    const double l = 1.0 + (c - 1.0) * 0.95 *
                               std::uniform_real_distribution<double>()(gen);
    const double alpha = AlphaForLDiversity(row, l, c);
    if (row.total == 0) continue;
    const double h = Entropy(PerturbedConditional(&row, c, alpha));
    EXPECT_GE(h, std::log(l) - 1e-9);
    if (alpha > 0.0) {
      const double h_lower =
          Entropy(PerturbedConditional(&row, c, alpha * (1 - 1e-6)));
      EXPECT_LT(h_lower, std::log(l));
    }
  }
}

TEST(NeighborsTest, MultisetSemantics) {
  const SchemaPtr s = MakeSchema({2, 2});
  const Dataset a = MakeDataset(s, {{0, 0}, {1, 1}});
  EXPECT_TRUE(AreNeighbors(a, MakeDataset(s, {{1, 1}, {0, 0}})));
  EXPECT_TRUE(AreNeighbors(a, MakeDataset(s, {{1, 1}, {0, 1}, {0, 0}})));
  EXPECT_TRUE(AreNeighbors(MakeDataset(s, {{1, 1}, {0, 1}, {0, 0}}), a));
  EXPECT_FALSE(AreNeighbors(a, MakeDataset(s, {{1, 1}, {0, 1}})));
  EXPECT_FALSE(AreNeighbors(a, MakeDataset(s, {{1, 1}, {0, 1}, {0, 1}, {0, 0}})));
}

TEST(RecordCodecTest, RoundTrip) {
  const SchemaPtr s = MakeSchema({3, 2, 4});
  for (std::size_t x = 0; x < 24; ++x) {
    EXPECT_EQ(EncodeRecord(*s, DecodeRecord(*s, x)), x);
  }
  const Record r{2, 1, 3};
  EXPECT_EQ(EncodeRecord(*s, r), 23u);
}

TEST(ExactDistributionTest, SumsToOne) {
  std::mt19937_64 gen(2);
  const SchemaPtr s = MakeSchema({2, 3, 2, 2});
  const BuildingBlocks blocks = Disintegrate(RandomDataset(s, 40, gen), 2);
  const Record seed{1, 2, 0, 1};
  for (double alpha : {0.1, 1.0, 10.0}) {
    const auto p = ExactOutputDistribution(blocks, seed, alpha);
    EXPECT_EQ(p.size(), 24u);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(ExactDistributionTest, RejectsHugeDomain) {
  const SchemaPtr s = MakeSchema({100, 100, 101});
  const BuildingBlocks blocks = Disintegrate(Dataset(s), 1);
  const Record seed{0, 0, 0};
  EXPECT_EQ(CodeOf([&] { ExactOutputDistribution(blocks, seed, 1.0); }),
            ErrorCode::kUsage);
}

TEST(DpOracleTest, ReferencePair) {
  const SchemaPtr s = MakeSchema({2, 2});
  const Dataset d1 = MakeDataset(s, {{0, 0}, {0, 1}, {1, 1}});
  const Dataset d2 = MakeDataset(s, {{0, 0}, {0, 1}, {1, 1}, {1, 1}});
  const Record seed{0, 1};
  EXPECT_NEAR(DpRatioOracle(d1, d2, seed, 1.0, 1), 0.30010459245033808075,
              1e-14);
  EXPECT_NEAR(DpRatioOracle(d1, d2, seed, 1.0, 1), std::log(27.0 / 20.0), 1e-14);
  EXPECT_EQ(CodeOf([&] {
              DpRatioOracle(d1, MakeDataset(s, {{0, 0}}), seed, 1.0, 1);
            }),
            ErrorCode::kUsage);
}

// Property: with alpha derived from epsilon, random neighbors never exceed
// epsilon for any seed, whether hashing is exact or shares a tail bit.
TEST(DpOracleTest, RandomNeighborsRespectBound) {
  std::mt19937_64 gen(23);
  const SchemaPtr s = MakeSchema({2, 3, 2});
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = static_cast<int>(gen() % 12);
    const Dataset base = RandomDataset(s, rows, gen);
    Dataset plus = base;
    const Dataset extra = RandomDataset(s, 1, gen);
    plus.AppendRow(extra.row(0));
    const double eps = std::vector<double>{0.3, 1.0, 4.0}[trial % 3];
    const double alpha = AlphaForEpsilon(eps, 3);
    std::vector<HashSpec> shared;
    for (int i = 0; i < 3; ++i) shared.push_back(BuildHashSpec(base, i, 1));
    const BuildingBlocks narrow_base = DisintegrateWithSpecs(base, shared);
    const BuildingBlocks narrow_plus = DisintegrateWithSpecs(plus, shared);
    for (std::size_t x = 0; x < 12; ++x) {
      const Record seed = DecodeRecord(*s, x);
      EXPECT_LE(DpRatioOracle(base, plus, seed, alpha, 2), eps + 1e-9)
          << "trial " << trial;
      EXPECT_LE(MaxLogRatio(narrow_base, narrow_plus, seed, alpha), eps + 1e-9)
          << "trial " << trial;
    }
  }
}

}  // namespace
}  // namespace pegs
