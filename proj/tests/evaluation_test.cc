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

#include "pegs/evaluation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "pegs/blocks.h"
#include "pegs/error.h"
#include "pegs/sampler.h"
#include "oracles.h"
#include "test_util.h"

namespace pegs {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using testutil::CategoricalFeature;
using testutil::ConditionalOracle;
using testutil::IrlsOracle;
using testutil::MakeDataset;
using testutil::MakeSchema;
using testutil::MarginalOracle;
using testutil::NumericFeature;
using testutil::OracleDesign;
using testutil::RandomDataset;
using testutil::RegressionSchema;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const PegsError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a PegsError";
  return ErrorCode::kUsage;
}

TEST(MarginalDistanceTest, TrivialCases) {
  const SchemaPtr s = MakeSchema({2, 2});
  const Dataset a = MakeDataset(s, {{0, 0}, {0, 1}});
  const Dataset b = MakeDataset(s, {{1, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(MarginalDistance(a, a, 0), 0.0);
  EXPECT_DOUBLE_EQ(MarginalDistance(a, b, 0), 2.0);
  EXPECT_EQ(CodeOf([&] { MarginalDistance(a, Dataset(s), 0); }), ErrorCode::kData);
  EXPECT_EQ(CodeOf([&] { MarginalDistance(a, b, 5); }), ErrorCode::kUsage);
  EXPECT_EQ(CodeOf([&] { MarginalDistance(a, MakeDataset(MakeSchema({3, 2}), {{0, 0}}), 0); }),
            ErrorCode::kData);
}

TEST(MarginalDistanceTest, HandCountedToyPair) {
  const SchemaPtr s = MakeSchema({3, 2});
  const Dataset a = MakeDataset(s, {{0, 0}, {0, 1}, {1, 0}, {2, 0}});
  const Dataset b = MakeDataset(s, {{1, 0}, {1, 1}, {1, 0}, {2, 1}});
  // (0 - 1/2)^2 + (3/4 - 1/4)^2 + (1/4 - 1/4)^2
  EXPECT_DOUBLE_EQ(MarginalDistance(a, b, 0), 0.5);
  // (1/2 - 3/4)^2 + (1/2 - 1/4)^2
  EXPECT_DOUBLE_EQ(MarginalDistance(a, b, 1), 0.125);
}

TEST(MarginalDistanceTest, MatchesOracleOnRandomInstances) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 25; ++trial) {
    const SchemaPtr s = MakeSchema({2 + static_cast<int>(trial % 4), 3});
    const Dataset a = RandomDataset(s, 1 + static_cast<int>(gen() % 30), gen);
    const Dataset b = RandomDataset(s, 1 + static_cast<int>(gen() % 30), gen);
    for (int f = 0; f < 2; ++f) {
      const double value = MarginalDistance(a, b, f);
      EXPECT_NEAR(value, MarginalOracle(a, b, f), 1e-12);
      EXPECT_GE(value, 0.0);
      EXPECT_LE(value, 2.0);
    }
  }
}

TEST(ConditionalDistanceTest, MatchesOracleOnRandomInstances) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 25; ++trial) {
    const SchemaPtr s = MakeSchema({3, 4, 2});
    const Dataset a = RandomDataset(s, 1 + static_cast<int>(gen() % 20), gen);
    const Dataset b = RandomDataset(s, 1 + static_cast<int>(gen() % 20), gen);
    for (int t = 0; t < 3; ++t) {
      for (int g = 0; g < 3; ++g) {
        if (t == g) continue;
        EXPECT_NEAR(ConditionalDistance(a, b, t, g), ConditionalOracle(a, b, t, g), 1e-12);
      }
    }
    EXPECT_DOUBLE_EQ(ConditionalDistance(a, a, 0, 1), 0.0);
  }
}

TEST(ConditionalDistanceTest, SkipsAbsentConditioningValues) {
  const SchemaPtr s = MakeSchema({2, 3});
  const Dataset a = MakeDataset(s, {{0, 0}, {1, 1}});
  const Dataset b = MakeDataset(s, {{1, 0}, {1, 2}});
  // Only given = 0 is present in both: (1 - 0)^2 + (0 - 1)^2.
  EXPECT_DOUBLE_EQ(ConditionalDistance(a, b, 0, 1), 2.0);
}

TEST(ConditionalDistanceTest, IndependentProductsAreClose) {
  std::mt19937_64 gen(3);
  const SchemaPtr s = MakeSchema({3, 4});
  const Dataset a = RandomDataset(s, 10000, gen);
  const Dataset b = RandomDataset(s, 10000, gen);
  EXPECT_LT(ConditionalDistance(a, b, 0, 1), 0.05);
  EXPECT_LT(ConditionalDistance(a, b, 1, 0), 0.05);
}

TEST(RegressionSpecTest, ParseAndPrint) {
  const RegressionSpec spec =
      RegressionSpec::Parse("logistic: charge>25000 ~ num(age.yrs) + sev + cat");
  EXPECT_EQ(spec.kind, RegressionSpec::Kind::kLogistic);
  EXPECT_EQ(spec.target, "charge");
  ASSERT_TRUE(spec.threshold.has_value());
  EXPECT_DOUBLE_EQ(*spec.threshold, 25000.0);
  ASSERT_EQ(spec.predictors.size(), 3u);
  EXPECT_TRUE(spec.predictors[0].as_numeric);
  EXPECT_EQ(spec.predictors[0].feature, "age.yrs");
  EXPECT_FALSE(spec.predictors[1].as_numeric);
  EXPECT_EQ(spec.ToString(), "logistic:charge>25000~num(age.yrs)+sev+cat");
  EXPECT_EQ(RegressionSpec::Parse(spec.ToString()).ToString(), spec.ToString());
  for (const char* bad : {"charge~sev", "probit:y~x", "linear:y", "linear:~x",
                          "linear:y~x+", "logistic:y>abc~x"}) {
    EXPECT_EQ(CodeOf([&] { RegressionSpec::Parse(bad); }), ErrorCode::kUsage) << bad;
  }
}

TEST(DesignMatrixTest, OneHotDropsFirstCategory) {
  const Dataset d = MakeDataset(RegressionSchema(), {{0, 2, 2, 1}, {4, 0, 0, 0}});
  const DesignMatrix m = BuildDesignMatrix(d, RegressionSpec::Parse("linear:y~num(x)+g+b"));
  EXPECT_THAT(m.names, ElementsAre("(Intercept)", "x", "g=v1", "g=v2", "b=v1"));
  EXPECT_EQ(m.x, OracleDesign(d));
  EXPECT_DOUBLE_EQ(m.y[0], -1.5);
  EXPECT_DOUBLE_EQ(m.y[1], 10.0);
  const DesignMatrix t = BuildDesignMatrix(d, RegressionSpec::Parse("logistic:y>5~g"));
  EXPECT_DOUBLE_EQ(t.y[0], 0.0);
  EXPECT_DOUBLE_EQ(t.y[1], 1.0);
}

TEST(DesignMatrixTest, ErrorPaths) {
  const Dataset d = MakeDataset(RegressionSchema(), {{0, 2, 2, 1}});
  for (const char* formula : {"linear:y~y", "linear:g~x", "linear:y~num(g)",
                              "logistic:g~x", "linear:y~nope"}) {
    EXPECT_EQ(CodeOf([&] { BuildDesignMatrix(d, RegressionSpec::Parse(formula)); }),
              ErrorCode::kUsage)
        << formula;
  }
  EXPECT_EQ(CodeOf([&] {
              FitRegression(Dataset(d.schema_ptr()), RegressionSpec::Parse("linear:y~x"));
            }),
            ErrorCode::kData);
}

TEST(FitRegressionTest, NoiselessLineIsRecoveredForAnyRowOrder) {
  const SchemaPtr s = std::make_shared<const Schema>(std::vector<FeatureSpec>{
      NumericFeature("y", {2.0, 5.0, 9.5, 14.0}),
      NumericFeature("x", {0.0, 1.0, 2.5, 4.0})});
  std::vector<std::vector<int>> rows;
  for (int r = 0; r < 40; ++r) rows.push_back({r % 4, r % 4});
  std::mt19937_64 gen(4);
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    std::shuffle(rows.begin(), rows.end(), gen);
    const RegressionFit fit =
        FitRegression(MakeDataset(s, rows), RegressionSpec::Parse("linear:y~num(x)"));
    EXPECT_NEAR(fit.coefficients[0], 2.0, 1e-9);
    EXPECT_NEAR(fit.coefficients[1], 3.0, 1e-9);
    EXPECT_TRUE(fit.warnings.empty());
  }
}

TEST(FitRegressionTest, LinearMatchesPseudoInverseOracle) {
  std::mt19937_64 gen(5);
  const RegressionSpec spec = RegressionSpec::Parse("linear:y~num(x)+g+b");
  int checked = 0;
  while (checked < 25) {
    const Dataset d = RandomDataset(RegressionSchema(), 20, gen);
    const Eigen::MatrixXd x = OracleDesign(d);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < x.cols()) continue;
    Eigen::VectorXd y(d.num_rows());
    for (int r = 0; r < d.num_rows(); ++r) {
      y[r] = d.schema().feature(0).numeric_representatives[d.at(r, 0)];
    }
    const Eigen::VectorXd oracle = svd.solve(y);
    const RegressionFit fit = FitRegression(d, spec);
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(fit.coefficients[c], oracle[c], 1e-8);
    const Eigen::VectorXd resid = y - x * oracle;
    const Eigen::MatrixXd cov =
        resid.squaredNorm() / (20 - 5) * (x.transpose() * x).inverse();
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(fit.variances[c], cov(c, c), 1e-8);
    ++checked;
  }
}

TEST(FitRegressionTest, RankDeficientLinearFallsBackWithWarning) {
  // Category g=v2 never occurs, so its column is all zero.
  const Dataset d = MakeDataset(RegressionSchema(),
                                {{0, 0, 0, 0}, {1, 1, 1, 1}, {2, 2, 0, 1}, {3, 3, 1, 0},
                                 {4, 1, 0, 0}, {2, 0, 1, 1}});
  const RegressionFit fit = FitRegression(d, RegressionSpec::Parse("linear:y~num(x)+g+b"));
  ASSERT_EQ(fit.warnings.size(), 1u);
  EXPECT_THAT(fit.warnings[0], HasSubstr("rank deficient"));
  EXPECT_NEAR(fit.coefficients[3], 0.0, 1e-6);
  EXPECT_TRUE(fit.coefficients.allFinite());
}

TEST(FitRegressionTest, LogisticMatchesIrlsOracle) {
  std::mt19937_64 gen(6);
  std::bernoulli_distribution coin(0.5);
  const RegressionSpec spec = RegressionSpec::Parse("logistic:y>1~num(x)+g+b");
  for (int trial = 0; trial < 25; ++trial) {
    Dataset d(RegressionSchema());
    for (int r = 0; r < 200; ++r) {
      const int x = static_cast<int>(gen() % 4);
      const double p = 0.3 + 0.1 * x;
      const int y = std::bernoulli_distribution(p)(gen) ? 2 + static_cast<int>(gen() % 3)
                                                        : static_cast<int>(gen() % 2);
      d.AppendRow(Record{y, x, static_cast<int>(gen() % 3), coin(gen) ? 1 : 0});
    }
    const Eigen::MatrixXd x = OracleDesign(d);
    Eigen::VectorXd y(d.num_rows());
    for (int r = 0; r < d.num_rows(); ++r) y[r] = d.at(r, 0) >= 2 ? 1.0 : 0.0;
    const Eigen::VectorXd oracle = IrlsOracle(x, y);
    const RegressionFit fit = FitRegression(d, spec);
    EXPECT_TRUE(fit.converged);
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(fit.coefficients[c], oracle[c], 1e-4);
  }
}

TEST(FitRegressionTest, BalancedLogisticHasZeroCoefficients) {
  Dataset d(RegressionSchema());
  for (int x = 0; x < 4; ++x) {
    for (int g = 0; g < 3; ++g) {
      for (int b = 0; b < 2; ++b) d.AppendRow(Record{1, x, g, b});
    }
  }
  const SchemaPtr s = std::make_shared<const Schema>(std::vector<FeatureSpec>{
      CategoricalFeature("t", 2), NumericFeature("x", {0.0, 1.0, 2.5, 4.0}),
      CategoricalFeature("g", 3)});
  Dataset balanced(s);
  for (int x = 0; x < 4; ++x) {
    for (int g = 0; g < 3; ++g) {
      for (int t = 0; t < 2; ++t) balanced.AppendRow(Record{t, x, g});
    }
  }
  const RegressionFit fit = FitRegression(balanced, RegressionSpec::Parse("logistic:t~num(x)+g"));
  EXPECT_TRUE(fit.converged);
  for (Eigen::Index c = 0; c < fit.coefficients.size(); ++c) {
    EXPECT_NEAR(fit.coefficients[c], 0.0, 1e-9);
  }
}

TEST(FitRegressionTest, SeparationWarnsAndReturnsIterate) {
  const SchemaPtr s = std::make_shared<const Schema>(std::vector<FeatureSpec>{
      CategoricalFeature("t", 2), NumericFeature("x", {0.0, 1.0, 2.5, 4.0})});
  const Dataset d = MakeDataset(s, {{0, 0}, {0, 1}, {1, 2}, {1, 3}, {0, 0}, {1, 3}});
  const RegressionFit fit = FitRegression(d, RegressionSpec::Parse("logistic:t~num(x)"));
  ASSERT_FALSE(fit.warnings.empty());
  EXPECT_THAT(fit.warnings.back(), HasSubstr("separation"));
  EXPECT_TRUE(fit.coefficients.allFinite());
  EXPECT_GT(fit.coefficients[1], 0.0);
}

TEST(RegressionDistanceTest, Examples) {
  const std::vector<double> o{1.0, 2.0}, s{2.0, 1.0};
  EXPECT_DOUBLE_EQ(RegressionDistance(o, o).value, 0.0);
  EXPECT_DOUBLE_EQ(RegressionDistance(s, o).value, 1.5);
  const std::vector<double> near_zero{1.0, 1e-13}, other{2.0, 5.0};
  const auto guarded = RegressionDistance(other, near_zero);
  EXPECT_DOUBLE_EQ(guarded.value, 1.0);
  EXPECT_THAT(guarded.skipped, ElementsAre(1));
  EXPECT_EQ(guarded.warnings.size(), 1u);
  const std::vector<double> longer{1.0, 2.0, 3.0};
  EXPECT_EQ(CodeOf([&] { RegressionDistance(longer, o); }), ErrorCode::kData);
}

TEST(CombineEstimatesTest, HandWorkedExamples) {
  {
    const std::vector<double> q{1, 3}, v{1, 1};
    const auto e = CombineEstimates(q, v);
    EXPECT_EQ(e.q_bar, 2.0);
    EXPECT_EQ(e.b, 2.0);
    EXPECT_EQ(e.v_bar, 1.0);
    EXPECT_EQ(e.t_s, 2.0);
  }
  {
    const std::vector<double> q{4, 4, 4}, v{1, 2, 6};
    const auto e = CombineEstimates(q, v);
    EXPECT_EQ(e.b, 0.0);
    EXPECT_EQ(e.t_s, -3.0);
    EXPECT_TRUE(e.negative_variance());
  }
  {
    const std::vector<double> q{0, 0, 6}, v{1, 2, 3};
    const auto e = CombineEstimates(q, v);
    EXPECT_EQ(e.q_bar, 2.0);
    EXPECT_EQ(e.b, 12.0);
    EXPECT_EQ(e.v_bar, 2.0);
    EXPECT_EQ(e.t_s, 14.0);
  }
  const std::vector<double> one{1.0};
  EXPECT_EQ(CodeOf([&] { CombineEstimates(one, one); }), ErrorCode::kUsage);
  const std::vector<double> two{1.0, 2.0};
  EXPECT_EQ(CodeOf([&] { CombineEstimates(two, one); }), ErrorCode::kUsage);
}

// Property: shifting every estimate moves the mean and leaves T_s alone.
TEST(CombineEstimatesTest, ShiftInvariance) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(gen() % 8);
    std::vector<double> q(k), v(k), shifted(k);
    const double shift = normal(gen) * 10;
    for (int i = 0; i < k; ++i) {
      q[i] = normal(gen);
      v[i] = std::abs(normal(gen));
      shifted[i] = q[i] + shift;
    }
    const auto a = CombineEstimates(q, v);
    const auto b = CombineEstimates(shifted, v);
    EXPECT_NEAR(b.q_bar, a.q_bar + shift, 1e-9);
    EXPECT_NEAR(b.t_s, a.t_s, 1e-9);
  }
}

TEST(UniquenessTest, Examples) {
  const SchemaPtr s = MakeSchema({3, 2});
  const std::vector<int> qi{0};
  const auto u = PopulationUniqueness(MakeDataset(s, {{0, 0}, {0, 1}, {1, 0}}), qi);
  EXPECT_EQ(u.count, 1);
  EXPECT_DOUBLE_EQ(u.fraction, 1.0 / 3);
  const auto same = PopulationUniqueness(MakeDataset(s, {{2, 1}, {2, 1}, {2, 1}}), qi);
  EXPECT_EQ(same.count, 0);
  EXPECT_DOUBLE_EQ(same.fraction, 0.0);
  const std::vector<int> none;
  EXPECT_EQ(CodeOf([&] { PopulationUniqueness(Dataset(s), none); }), ErrorCode::kUsage);
}

TEST(UniquenessTest, MatchesGroupByOracle) {
  std::mt19937_64 gen(8);
  const SchemaPtr s = MakeSchema({4, 3, 5, 2});
  const Dataset d = RandomDataset(s, 100, gen);
  const std::vector<int> qi{0, 2, 3};
  std::map<std::vector<int>, int> groups;
  for (int r = 0; r < 100; ++r) ++groups[{d.at(r, 0), d.at(r, 2), d.at(r, 3)}];
  int expected = 0;
  for (const auto& [key, n] : groups) expected += n == 1;
  const auto u = PopulationUniqueness(d, qi);
  EXPECT_EQ(u.count, expected);
  EXPECT_DOUBLE_EQ(u.fraction, expected / 100.0);
}

Category ModalOracle(const Dataset& orig, int r, const Dataset& synth, int target,
                     const std::vector<int>& given) {
  const int c = synth.schema().num_categories(target);
  std::vector<int> counts(c, 0), global(c, 0);
  bool any = false;
  for (int s = 0; s < synth.num_rows(); ++s) {
    ++global[synth.at(s, target)];
    bool match = true;
    for (int g : given) match &= synth.at(s, g) == orig.at(r, g);
    if (match) {
      ++counts[synth.at(s, target)];
      any = true;
    }
  }
  const auto& use = any ? counts : global;
  Category best = 0;
  for (int j = 1; j < c; ++j) {
    if (use[j] > use[best]) best = j;
  }
  return best;
}

TEST(AttackTest, CategoricalMatchesNestedLoopOracle) {
  std::mt19937_64 gen(9);
  const SchemaPtr s = MakeSchema({4, 3, 2, 3});
  const std::vector<int> given{1, 2};
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset orig = RandomDataset(s, 30, gen);
    const Dataset synth = RandomDataset(s, 1 + static_cast<int>(gen() % 25), gen);
    int wrong = 0;
    for (int r = 0; r < orig.num_rows(); ++r) {
      wrong += ModalOracle(orig, r, synth, 0, given) != orig.at(r, 0);
    }
    EXPECT_DOUBLE_EQ(AttackCategorical(orig, synth, 0, given), wrong / 30.0);
  }
}

TEST(AttackTest, CategoricalEdgeCases) {
  const SchemaPtr s = MakeSchema({3, 3});
  const std::vector<int> given{1};
  const Dataset deterministic = MakeDataset(s, {{0, 0}, {1, 1}, {2, 2}, {1, 1}});
  EXPECT_DOUBLE_EQ(AttackCategorical(deterministic, deterministic, 0, given), 0.0);
  // Tie between categories 1 and 2 resolves to 1.
  const Dataset tie = MakeDataset(s, {{2, 0}, {1, 0}});
  const Dataset probe = MakeDataset(s, {{1, 0}});
  EXPECT_DOUBLE_EQ(AttackCategorical(probe, tie, 0, given), 0.0);
  EXPECT_EQ(CodeOf([&] { AttackCategorical(probe, Dataset(s), 0, given); }), ErrorCode::kData);
  const std::vector<int> none, self{0};
  EXPECT_EQ(CodeOf([&] { AttackCategorical(probe, tie, 0, none); }), ErrorCode::kUsage);
  EXPECT_EQ(CodeOf([&] { AttackCategorical(probe, tie, 0, self); }), ErrorCode::kUsage);
}

TEST(AttackTest, CategoricalChanceLevel) {
  std::mt19937_64 gen(10);
  const SchemaPtr s = MakeSchema({4, 3});
  const Dataset orig = RandomDataset(s, 10000, gen);
  const Dataset synth = RandomDataset(s, 10000, gen);
  const std::vector<int> given{1};
  EXPECT_NEAR(AttackCategorical(orig, synth, 0, given), 0.75, 0.05);
}

TEST(AttackTest, NumericMatchesNestedLoopOracle) {
  std::mt19937_64 gen(11);
  const SchemaPtr s = RegressionSchema();
  const auto& reps = s->feature(0).numeric_representatives;
  const std::vector<int> given{2, 3};
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset orig = RandomDataset(s, 25, gen);
    const Dataset synth = RandomDataset(s, 1 + static_cast<int>(gen() % 20), gen);
    double global = 0.0;
    for (int t = 0; t < synth.num_rows(); ++t) global += reps[synth.at(t, 0)];
    global /= synth.num_rows();
    double total = 0.0;
    for (int r = 0; r < orig.num_rows(); ++r) {
      double sum = 0.0;
      int n = 0;
      for (int t = 0; t < synth.num_rows(); ++t) {
        if (synth.at(t, 2) == orig.at(r, 2) && synth.at(t, 3) == orig.at(r, 3)) {
          sum += reps[synth.at(t, 0)];
          ++n;
        }
      }
      total += std::abs(reps[orig.at(r, 0)] - (n ? sum / n : global));
    }
    EXPECT_NEAR(AttackNumeric(orig, synth, 0, given), total / 25, 1e-12);
  }
}

TEST(AttackTest, NumericClosedForms) {
  const SchemaPtr s = RegressionSchema();
  const std::vector<int> given{2};
  const Dataset orig = MakeDataset(s, {{0, 0, 0, 0}, {3, 0, 1, 0}, {4, 0, 2, 1}});
  EXPECT_DOUBLE_EQ(AttackNumeric(orig, orig, 0, given), 0.0);
  const Dataset constant = MakeDataset(s, {{2, 0, 0, 0}, {2, 1, 2, 1}});
  // |-1.5 - 2| + |7.5 - 2| + |10 - 2|, averaged
  EXPECT_DOUBLE_EQ(AttackNumeric(orig, constant, 0, given), (3.5 + 5.5 + 8.0) / 3);
  EXPECT_EQ(CodeOf([&] { AttackNumeric(orig, orig, 2, std::vector<int>{1}); }),
            ErrorCode::kUsage);
}

// Property: releasing the original data is the attacker's best case, so
// perturbed synthetic data never lowers the mean absolute error on average.
TEST(AttackTest, OriginalDataIsLowerEnvelope) {
  std::mt19937_64 gen(12);
  const SchemaPtr s = RegressionSchema();
  Dataset orig(s);
  for (int r = 0; r < 400; ++r) {
    const int g = static_cast<int>(gen() % 3);
    const int y = std::min(4, g + static_cast<int>(gen() % 2));
    orig.AppendRow(Record{y, static_cast<int>(gen() % 4), g, static_cast<int>(gen() % 2)});
  }
  const std::vector<int> given{2, 3};
  const double baseline = AttackNumeric(orig, orig, 0, given);
  const BuildingBlocks blocks = Disintegrate(orig, 2);
  double mean_mae = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthesisOptions options;
    options.num_samples = 400;
    options.seed = seed;
    const auto out = Synthesize(blocks, PrivacySpec::DpPerSample(1.0),
                                SeedPool::FromDataset(orig), options);
    mean_mae += AttackNumeric(orig, out.datasets[0], 0, given) / 10;
  }
  EXPECT_GE(mean_mae, baseline);
}

TEST(EvaluateTest, IdenticalDataScoresZero) {
  std::mt19937_64 gen(13);
  const Dataset orig = RandomDataset(RegressionSchema(), 200, gen);
  const std::vector<Dataset> synth{orig, orig};
  EvalOptions options;
  options.regressions = {RegressionSpec::Parse("linear:y~num(x)+g")};
  options.quasi_identifiers = {1, 2};
  options.categorical_attack_target = 2;
  options.categorical_attack_given = {1, 3};
  options.numeric_attack_target = 0;
  options.numeric_attack_given = {1, 2};
  const EvalReport report = Evaluate(orig, synth, options);
  EXPECT_EQ(*report.Find("marginal/y"), 0.0);
  EXPECT_EQ(*report.Find("marginal_sum"), 0.0);
  EXPECT_EQ(*report.Find("conditional/y|x"), 0.0);
  EXPECT_EQ(*report.Find("conditional_sum"), 0.0);
  EXPECT_NEAR(*report.Find("regression/linear:y~num(x)+g"), 0.0, 1e-12);
  EXPECT_TRUE(report.Find("regression/linear:y~num(x)+g/t_s_mean").has_value());
  EXPECT_DOUBLE_EQ(*report.Find("uniqueness_fraction"),
                   PopulationUniqueness(orig, options.quasi_identifiers).fraction);
  EXPECT_TRUE(report.Find("attack_misclassification/g").has_value());
  EXPECT_TRUE(report.Find("attack_mae/y").has_value());
  EXPECT_FALSE(report.Find("nothing").has_value());
  for (const auto& [name, value] : report.metrics) {
    if (!name.ends_with("t_s_mean")) EXPECT_GE(value, 0.0) << name;
  }
  const std::vector<Dataset> none;
  EXPECT_EQ(CodeOf([&] { Evaluate(orig, none, options); }), ErrorCode::kUsage);
}

TEST(EvaluateTest, ConditionalPairsRestrictOutput) {
  std::mt19937_64 gen(14);
  const Dataset orig = RandomDataset(MakeSchema({2, 3, 2}), 50, gen);
  const std::vector<Dataset> synth{RandomDataset(orig.schema_ptr(), 50, gen)};
  EvalOptions options;
  options.marginal = false;
  options.conditional_pairs = {{0, 1}};
  const EvalReport report = Evaluate(orig, synth, options);
  ASSERT_EQ(report.metrics.size(), 2u);
  EXPECT_EQ(report.metrics[0].first, "conditional/f0|f1");
  EXPECT_DOUBLE_EQ(report.metrics[0].second, ConditionalOracle(orig, synth[0], 0, 1));
}

EvalReport MakeReport(std::string algorithm, double epsilon,
                      std::vector<std::pair<std::string, double>> metrics) {
  EvalReport r;
  r.algorithm = std::move(algorithm);
  r.epsilon = epsilon;
  r.metrics = std::move(metrics);
  return r;
}

TEST(RuMapTest, OneRowPerAlgorithmEpsilonMetric) {
  std::vector<EvalReport> reports;
  for (const char* alg : {"pegs", "pegs.rs", "pmi"}) {
    for (double eps : {0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0}) {
      reports.push_back(MakeReport(alg, eps, {{"marginal_sum", eps / 3}}));
    }
  }
  const std::string csv = RuMapCsv(reports);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "algorithm,epsilon,metric,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 21);
  EXPECT_THAT(csv, HasSubstr("pegs.rs,0.10000000000000001,marginal_sum,"));
}

TEST(RuMapTest, HeaderOnlyAndAppendedDuplicates) {
  const std::vector<EvalReport> empty{MakeReport("pegs", 1.0, {})};
  EXPECT_EQ(RuMapCsv(empty), "algorithm,epsilon,metric,value\n");
  const std::vector<EvalReport> dup{MakeReport("pegs", 1.0, {{"m", 1.0}}),
                                    MakeReport("pegs", 1.0, {{"m", 2.0}})};
  EXPECT_EQ(RuMapCsv(dup), "algorithm,epsilon,metric,value\npegs,1,m,1\npegs,1,m,2\n");
  const std::vector<EvalReport> none;
  EXPECT_EQ(CodeOf([&] { RuMapCsv(none); }), ErrorCode::kUsage);
  const std::vector<EvalReport> quoted{MakeReport("a,b", 1.0, {{"x|y", 0.5}})};
  EXPECT_THAT(RuMapCsv(quoted), HasSubstr("\"a,b\",1,x|y,0.5"));
}

TEST(EvalReportTest, JsonAndFileRoundTrip) {
  EvalReport r = MakeReport("pegs.rs", 0.5, {{"b", 2.0}, {"a", 1.0}});
  r.seed = 3;
  r.warnings = {"careful"};
  const EvalReport back = EvalReportFromJson(EvalReportToJson(r));
  EXPECT_EQ(back.metrics, r.metrics);
  EXPECT_EQ(back.warnings, r.warnings);
  EXPECT_EQ(back.seed, 3u);
  testutil::TempDir dir;
  SaveEvalReport(r, dir.File("r.json"));
  EXPECT_EQ(LoadEvalReport(dir.File("r.json")).metrics, r.metrics);
  EXPECT_EQ(CodeOf([] { EvalReportFromJson({{"algorithm", 1}}); }), ErrorCode::kData);
  EXPECT_EQ(CodeOf([] { LoadEvalReport("/nonexistent/r.json"); }), ErrorCode::kIo);
  WriteRuMap(std::vector<EvalReport>{r}, dir.File("ru.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir.File("ru.csv")));
}

}  // namespace
}  // namespace pegs
