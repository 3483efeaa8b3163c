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

#include "pegs/random.h"

#include <cmath>
#include <set>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "pegs/error.h"

namespace pegs {
namespace {

using ::testing::ElementsAre;

TEST(PhiloxTest, KnownAnswerVectors) {
  EXPECT_THAT(Philox4x32({0, 0, 0, 0}, {0, 0}),
              ElementsAre(0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u));
  EXPECT_THAT(Philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu}),
              ElementsAre(0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu));
  EXPECT_THAT(Philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u}),
              ElementsAre(0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u));
}

TEST(RngStreamTest, DeterministicPerSeedAndStream) {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_NE(va, vd);
}

TEST(RngStreamTest, FirstWordComesFromFirstBlock) {
  RngStream rng(0, 0);
  const auto block = Philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(rng(), (std::uint64_t{block[1]} << 32) | block[0]);
  EXPECT_EQ(rng(), (std::uint64_t{block[3]} << 32) | block[2]);
}

TEST(RngStreamTest, UniformMoments) {
  RngStream rng(1, 2);
  double sum = 0.0, sum_sq = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / kDraws, 0.5, 0.005);
  EXPECT_NEAR(sum_sq / kDraws - 0.25, 1.0 / 12, 0.005);
}

TEST(RngStreamTest, UniformIntCoversRange) {
  RngStream rng(3, 4);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) ++hits[rng.UniformInt(7)];
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
  EXPECT_EQ(rng.UniformInt(1), 0u);
  EXPECT_THROW(rng.UniformInt(0), PegsError);
}

TEST(RngStreamTest, CategoricalFollowsProbabilities) {
  RngStream rng(5, 6);
  const std::vector<double> p{0.1, 0.0, 0.6, 0.3};
  std::vector<int> hits(4, 0);
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) ++hits[rng.Categorical(p)];
  EXPECT_EQ(hits[1], 0);
  // chi-square with 2 degrees of freedom, 99.9% quantile 13.8
  double chi2 = 0.0;
  for (int j : {0, 2, 3}) {
    const double expected = kDraws * p[j];
    chi2 += (hits[j] - expected) * (hits[j] - expected) / expected;
  }
  EXPECT_LT(chi2, 13.8);
  const std::vector<double> point{0.0, 0.0, 1.0};
  EXPECT_EQ(rng.Categorical(point), 2);
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_THROW(rng.Categorical(zero), PegsError);
}

TEST(RngStreamTest, NormalMoments) {
  RngStream rng(9, 9);
  double sum = 0.0, sum_sq = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const double z = rng.Normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / kDraws, 0.0, 0.02);
  EXPECT_NEAR(sum_sq / kDraws, 1.0, 0.02);
}

TEST(StreamIdTest, PacksFieldsAndChecksBounds) {
  EXPECT_EQ(StreamId(StreamPurpose::kSynthesis, 0, 0), std::uint64_t{1} << 56);
  EXPECT_EQ(StreamId(StreamPurpose::kGenerator, 2, 5),
            (std::uint64_t{3} << 56) | (std::uint64_t{2} << 36) | 5);
  std::set<std::uint64_t> ids;
  for (auto purpose : {StreamPurpose::kSynthesis, StreamPurpose::kPmiSynthesis}) {
    for (std::uint64_t k = 0; k < 3; ++k) {
      for (std::uint64_t j = 0; j < 3; ++j) ids.insert(StreamId(purpose, k, j));
    }
  }
  EXPECT_EQ(ids.size(), 18u);
  EXPECT_THROW(StreamId(StreamPurpose::kSynthesis, 1u << 20, 0), PegsError);
  EXPECT_THROW(StreamId(StreamPurpose::kSynthesis, 0, std::uint64_t{1} << 36),
               PegsError);
}

}  // namespace
}  // namespace pegs
