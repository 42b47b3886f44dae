/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rankfuse/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "oracles.h"
#include "rankfuse/error.h"
#include "rankfuse/predictor.h"
#include "rankfuse/random.h"

namespace rankfuse {
namespace {

Ranking R(std::vector<int> ranks) {
  const auto d = ranks.size();
  return Ranking(FeatureSchema::Numeric(d), std::move(ranks));
}

Explanation E(std::vector<double> s) {
  const auto d = s.size();
  return Explanation(FeatureSchema::Numeric(d), std::move(s), "t");
}

FunctionPredictor Linear(std::vector<double> w) {
  const auto d = w.size();
  return FunctionPredictor(FeatureSchema::Numeric(d), [w](std::span<const double> x) {
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
  });
}

TEST(NrcTest, Examples) {
  EXPECT_NEAR(Nrc(R({1, 2, 3})), 11.0 / 6.0 * std::log(4.0) * (1 + 0.5 * std::sqrt(2.0 / 3.0)),
              1e-12);
  EXPECT_NEAR(Nrc(R({1, 2, 3})), 3.5791, 5e-5);
  EXPECT_NEAR(Nrc(R({1, 1, 1})), 3 * std::log(4.0), 1e-12);
  EXPECT_NEAR(Nrc(R({1})), std::log(2.0), 1e-15);
  EXPECT_NEAR(Nrc(R({1}), {3.0}), std::log(2.0), 1e-15);
  EXPECT_THROW(Nrc(R({1, 2}), {-0.1}), Error);
}

TEST(NrcTest, MatchesOracleOnRandomRankings) {
  Rng rng(1);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 20;
    std::vector<double> s(d);
    for (auto& v : s) v = coarse(rng);
    const auto ranks = oracle::CompetitionRanks(s);
    for (double alpha : {0.0, 0.5, 2.0}) {
      ASSERT_NEAR(Nrc(R(ranks), {alpha}), static_cast<double>(oracle::Nrc(ranks, alpha)), 1e-10);
    }
  }
}

TEST(NrcTest, ConstantForTieFreeRankings) {
  std::vector<int> base(11);
  std::iota(base.begin(), base.end(), 1);
  const double ref = Nrc(R(base));
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    std::shuffle(base.begin(), base.end(), rng);
    ASSERT_EQ(Nrc(R(base)), ref);
  }
}

TEST(NrcTest, NondecreasingInAlpha) {
  const auto r = R({1, 1, 3, 4, 4});
  double prev = -1;
  for (double a = 0; a <= 3; a += 0.25) {
    const double v = Nrc(r, {a});
    ASSERT_GE(v, prev);
    prev = v;
  }
}

TEST(RankFaithfulnessTest, LinearExample) {
  const auto f = Linear({0.6, 0.3, 0.1});
  const std::vector<double> x{1, 1, 1}, base{0, 0, 0};
  const double ref = oracle::Pearson({1, 0.5, 1.0 / 3.0}, {0.6, 0.3, 0.1});
  EXPECT_NEAR(RankFaithfulness(f, R({1, 2, 3}), x, base), ref, 1e-12);
  EXPECT_NEAR(ref, 0.98624, 5e-5);
}

TEST(RankFaithfulnessTest, PerfectAndDegenerate) {
  // delta_i = 0.2 / R_i
  const std::vector<int> ranks{2, 1, 4, 3};
  std::vector<double> w;
  for (int r : ranks) w.push_back(0.2 / r);
  const std::vector<double> x{1, 1, 1, 1}, base{0, 0, 0, 0};
  EXPECT_NEAR(RankFaithfulness(Linear(w), R(ranks), x, base), 1.0, 1e-12);
  EXPECT_EQ(RankFaithfulness(Linear({0.1, 0.1, 0.1, 0.1}), R(ranks), x, base), 0.0);
}

TEST(RankFaithfulnessTest, RankLevelInvariance) {
  const auto f = Linear({0.5, -0.2, 0.05, 0.3});
  const std::vector<double> x{0.3, 1.2, -0.7, 0.4}, base{0, 0, 0, 0};
  const std::vector<double> s{0.4, -0.1, 0.05, 0.2};
  std::vector<double> scaled;
  for (double v : s) scaled.push_back(7.5 * v);
  const double a = RankFaithfulness(f, RankFeatures(E(s)), x, base);
  const double b = RankFaithfulness(f, RankFeatures(E(scaled)), x, base);
  EXPECT_EQ(a, b);
  EXPECT_GE(a, -1.0);
  EXPECT_LE(a, 1.0);
}

TEST(RankStabilityTest, Examples) {
  const auto e1 = E({0.9, 0.5, 0.1, 0.3});
  EXPECT_DOUBLE_EQ(RankStability(e1, e1), 1.0);
  EXPECT_NEAR(RankStability(E({1, 2, 3, 4}), E({4, 3, 2, 1})), -1.0, 1e-12);
  EXPECT_NEAR(RankStability(e1, E({0.8, 0.6, 0.2, 0.1})), 0.8, 1e-12);
  EXPECT_EQ(RankStability(E({1, 1, 1}), E({3, 2, 1})), 0.0);
  EXPECT_THROW(RankStability(E({1, 2}), E({1, 2, 3})), Error);
}

TEST(RankStabilityTest, SymmetricBoundedAndScaleInvariant) {
  Rng rng(8);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 10;
    std::vector<double> a(d), b(d), b2(d);
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = n(rng);
      b[i] = n(rng);
      b2[i] = 3.0 * b[i];
    }
    const double s = RankStability(E(a), E(b));
    ASSERT_EQ(s, RankStability(E(b), E(a)));
    ASSERT_EQ(s, RankStability(E(a), E(b2)));
    ASSERT_GE(s, -1.0 - 1e-12);
    ASSERT_LE(s, 1.0 + 1e-12);
    ASSERT_NEAR(s, oracle::Spearman(a, b), 1e-12);
  }
}

TEST(TraditionalTest, Complexity) {
  EXPECT_EQ(TraditionalComplexity(E({0, 0.7, 0})), 0.0);
  EXPECT_NEAR(TraditionalComplexity(E({0.2, -0.2, 0.2, 0.2})), std::log(4.0), 1e-12);
  EXPECT_NEAR(TraditionalComplexity(E({0.5, 0.5, 1.0})),
              -(0.5 * std::log(0.25) + 0.5 * std::log(0.5)), 1e-12);
  EXPECT_NEAR(TraditionalComplexity(E({0.5, 0.5, 1.0})), 1.0397, 5e-5);
  EXPECT_THROW(TraditionalComplexity(E({0, 0})), Error);
}

TEST(TraditionalTest, Faithfulness) {
  const std::vector<double> x{1, 1, 1}, base{0, 0, 0};
  EXPECT_NEAR(TraditionalFaithfulness(Linear({0.6, 0.3, 0.1}), E({0.6, 0.3, 0.1}), x, base), 1.0,
              1e-12);
  EXPECT_NEAR(TraditionalFaithfulness(Linear({0.6, -0.3, 0.1}), E({1.2, 0.6, -0.2}), x, base),
              1.0, 1e-12);
  EXPECT_EQ(TraditionalFaithfulness(Linear({0.2, 0.2, 0.2}), E({0.6, 0.3, 0.1}), x, base), 0.0);
}

TEST(TraditionalTest, Sensitivity) {
  const auto e = E({0.1, 0.4, 0.9});
  EXPECT_EQ(TraditionalSensitivity(e, e), 0.0);
  // Normalized [0, 1, 0] vs [0, 0, 1]: difference norm sqrt(2).
  EXPECT_NEAR(TraditionalSensitivity(E({0, 2, 0}), E({0, 0, 5})), std::sqrt(2.0), 1e-12);
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(6), b(6);
    for (std::size_t i = 0; i < 6; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
    }
    auto norm = [](std::vector<double> v) {
      const double lo = *std::min_element(v.begin(), v.end());
      const double hi = *std::max_element(v.begin(), v.end());
      for (auto& x : v) x = (x - lo) / (hi - lo);
      return v;
    };
    const auto na = norm(a), nb = norm(b);
    double ss = 0;
    for (std::size_t i = 0; i < 6; ++i) ss += (na[i] - nb[i]) * (na[i] - nb[i]);
    ASSERT_NEAR(TraditionalSensitivity(E(a), E(b)), std::sqrt(ss), 1e-12);
  }
}

}  // namespace
}  // namespace rankfuse
