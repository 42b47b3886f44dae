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

#include "rankfuse/mcdm.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "oracles.h"
#include "rankfuse/error.h"
#include "rankfuse/random.h"

namespace rankfuse::mcdm {
namespace {

DecisionMatrix Dm(const oracle::Mat& rows, std::vector<Direction> dirs) {
  const std::size_t n = rows[0].size();
  return {Matrix::FromRows(rows), std::move(dirs), Weights::Uniform(n)};
}

std::vector<bool> Benefit(const std::vector<Direction>& dirs) {
  std::vector<bool> out;
  for (auto d : dirs) out.push_back(d == Direction::kBenefit);
  return out;
}

oracle::Mat ToRows(const Matrix& m) {
  oracle::Mat out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

const std::vector<Direction> kAllBenefit(3, Direction::kBenefit);

TEST(TopsisTest, Examples) {
  auto r = Topsis(Dm({{1}, {3}}, {Direction::kBenefit}));
  EXPECT_NEAR(r.scores[0], 0.0, 1e-15);
  EXPECT_NEAR(r.scores[1], 1.0, 1e-15);
  r = Topsis(Dm({{0.2, 0.3}, {0.2, 0.3}, {0.2, 0.3}}, {Direction::kBenefit, Direction::kCost}));
  for (double s : r.scores) EXPECT_EQ(s, 0.5);
  EXPECT_FALSE(r.notes.empty());
}

TEST(TopsisTest, ThreeByThreeMatchesTranscription) {
  const oracle::Mat x{{7, 9, 9}, {8, 7, 8}, {9, 6, 8}};
  const auto r = Topsis(Dm(x, kAllBenefit));
  const auto ref = oracle::Topsis(x, {true, true, true}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.scores[i], ref[i], 1e-9);
}

TEST(TopsisTest, NegativeColumnShiftAndZeroColumn) {
  const oracle::Mat x{{-0.2, 0.0, 3.1}, {0.5, 0.0, 2.0}, {0.1, 0.0, 4.2}};
  const std::vector<Direction> dirs{Direction::kBenefit, Direction::kBenefit, Direction::kCost};
  const auto r = Topsis(Dm(x, dirs));
  const auto ref = oracle::Topsis(x, Benefit(dirs), {1.0 / 3, 1.0 / 3, 1.0 / 3}, kShiftEpsilon);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.scores[i], ref[i], 1e-12);
  EXPECT_EQ(r.notes.size(), 2u);
}

TEST(EdasTest, Examples) {
  auto r = Edas(Dm({{1, 2}, {1, 2}}, {Direction::kBenefit, Direction::kCost}));
  EXPECT_EQ(r.scores, (std::vector<double>{0.5, 0.5}));
  r = Edas(Dm({{3, 5, 2}, {1, 4, 1}}, kAllBenefit));
  EXPECT_NEAR(r.scores[0], 1.0, 1e-15);
  EXPECT_NEAR(r.scores[1], 0.0, 1e-15);
  const oracle::Mat x{{7, 9, 9}, {8, 7, 8}, {9, 6, 8}};
  r = Edas(Dm(x, kAllBenefit));
  const auto ref = oracle::Edas(x, {true, true, true}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.scores[i], ref[i], 1e-9);
}

TEST(EdasTest, ShiftInvariant) {
  const oracle::Mat x{{-0.3, 0.4, 2.0}, {0.1, 0.9, 1.0}, {0.6, -0.2, 1.5}, {0.2, 0.1, 0.7}};
  const std::vector<Direction> dirs{Direction::kBenefit, Direction::kBenefit, Direction::kCost};
  auto shifted = x;
  for (auto& row : shifted) {
    row[0] += 5;
    row[2] -= 2;
  }
  const auto a = Edas(Dm(x, dirs)), b = Edas(Dm(shifted, dirs));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a.scores[i], b.scores[i], 1e-12);
}

TEST(McdmPropertyTest, RandomMatrices) {
  Rng rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> pos(0.01, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + trial % 5, n = 1 + trial % 4;
    Matrix x(m, n);
    for (auto& v : x.data()) v = u(rng);
    std::vector<Direction> dirs(n);
    for (std::size_t j = 0; j < n; ++j) dirs[j] = (trial + j) % 2 ? Direction::kCost : Direction::kBenefit;
    // Row 1 dominates row 0.
    bool strict = false;
    for (std::size_t j = 0; j < n; ++j) {
      const double gap = std::abs(u(rng)) * (j == 0 ? 1.0 : (trial % 3 == 0 ? 0.0 : 1.0));
      strict = strict || gap > 0;
      x(1, j) = dirs[j] == Direction::kBenefit ? x(0, j) + gap : x(0, j) - gap;
    }
    ASSERT_TRUE(strict);
    std::vector<double> w(n);
    for (auto& v : w) v = pos(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= total;
    const DecisionMatrix dm{x, dirs, Weights(w)};
    for (Method method : {Method::kTopsis, Method::kEdas}) {
      const auto r = Score(method, dm);
      ASSERT_EQ(r.scores.size(), m);
      for (double s : r.scores) {
        ASSERT_GE(s, 0.0);
        ASSERT_LE(s, 1.0);
      }
      ASSERT_GE(r.scores[1], r.scores[0] - 1e-12) << MethodName(method) << " trial " << trial;
      const auto weights = ScoresToWeights(r);
      ASSERT_NEAR(std::accumulate(weights.values().begin(), weights.values().end(), 0.0), 1.0,
                  1e-12);
      // Reordering alternatives permutes scores.
      std::vector<std::size_t> perm(m);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      const DecisionMatrix pdm{x.SelectRows(perm), dirs, Weights(w)};
      const auto pr = Score(method, pdm);
      for (std::size_t i = 0; i < m; ++i) ASSERT_NEAR(pr.scores[i], r.scores[perm[i]], 1e-12);
    }
    const auto ref = oracle::Topsis(ToRows(x), Benefit(dirs), w, kShiftEpsilon);
    const auto got = Topsis(dm);
    for (std::size_t i = 0; i < m; ++i) ASSERT_NEAR(got.scores[i], ref[i], 1e-9);
    const auto eref = oracle::Edas(ToRows(x), Benefit(dirs), w);
    const auto egot = Edas(dm);
    for (std::size_t i = 0; i < m; ++i) ASSERT_NEAR(egot.scores[i], eref[i], 1e-9);
  }
}

TEST(TopsisTest, ColumnScaleInvariance) {
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix x(4, 3);
    for (auto& v : x.data()) v = u(rng);
    Matrix y = x;
    for (std::size_t j = 0; j < 3; ++j) {
      const double c = u(rng) * 10;
      for (std::size_t i = 0; i < 4; ++i) y(i, j) *= c;
    }
    const std::vector<Direction> dirs{Direction::kBenefit, Direction::kCost, Direction::kBenefit};
    const auto a = Topsis({x, dirs, Weights::Uniform(3)});
    const auto b = Topsis({y, dirs, Weights::Uniform(3)});
    for (std::size_t i = 0; i < 4; ++i) ASSERT_NEAR(a.scores[i], b.scores[i], 1e-9);
  }
}

TEST(ScoresToWeightsTest, Examples) {
  McdmResult r;
  r.scores = {0.2, 0.3, 0.5};
  auto w = ScoresToWeights(r);
  EXPECT_NEAR(w[0], 0.2, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  r.scores = {0, 0, 0};
  w = ScoresToWeights(r);
  for (double v : w.values()) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  r.scores = {0.5, 1.0};
  w = ScoresToWeights(r);
  EXPECT_NEAR(w[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w[1], 2.0 / 3.0, 1e-15);
  r.scores = {0.5, -0.1};
  EXPECT_THROW(ScoresToWeights(r), Error);
}

TEST(DecisionMatrixTest, Validation) {
  DecisionMatrix dm{Matrix(1, 2, 1.0), {Direction::kBenefit, Direction::kCost}, Weights::Uniform(2)};
  EXPECT_THROW(dm.Validate(), Error);
  dm.values = Matrix(3, 2, 1.0);
  dm.directions.pop_back();
  EXPECT_THROW(dm.Validate(), Error);
  dm.directions.push_back(Direction::kCost);
  dm.values(0, 0) = std::nan("");
  EXPECT_THROW(Topsis(dm), Error);
  EXPECT_EQ(ParseMethod("edas"), Method::kEdas);
  EXPECT_EQ(ParseDirection("cost"), Direction::kCost);
  EXPECT_THROW(ParseMethod("vikor"), Error);
}

}  // namespace
}  // namespace rankfuse::mcdm
