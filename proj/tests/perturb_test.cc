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

#include "rankfuse/perturb.h"

#include <cmath>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "oracles.h"
#include "rankfuse/error.h"
#include "rankfuse/random.h"
#include "test_util.h"

namespace rankfuse {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

Dataset TwoClusters(std::size_t per_cluster, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0, 0.2);
  Matrix x(2 * per_cluster, 4);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double center = r < per_cluster ? -2.0 : 2.0;
    for (std::size_t c = 0; c < 4; ++c) x(r, c) = center + g(rng);
  }
  return MakeDataset(FeatureSchema::Numeric(4), std::move(x));
}

// Every cell distinct across the whole matrix.
Dataset DistinctValues(std::size_t n, std::size_t d) {
  Matrix x(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) x(r, c) = 0.01 * static_cast<double>(r * d + c) - 1.0;
  }
  return MakeDataset(FeatureSchema::Numeric(d), std::move(x));
}

AutoencoderConfig Cfg(std::size_t q, int epochs, std::uint64_t seed) {
  AutoencoderConfig c;
  c.latent_dim = q;
  c.epochs = epochs;
  c.seed = seed;
  return c;
}

TEST(AutoencoderTest, ConstantDataIsReconstructed) {
  Matrix x(200, 4);
  for (std::size_t r = 0; r < 200; ++r) {
    for (std::size_t c = 0; c < 4; ++c) x(r, c) = 0.5 - 0.3 * c;
  }
  const auto data = MakeDataset(FeatureSchema::Numeric(4), x);
  const auto model = TrainAutoencoder(data, Cfg(1, 500, 3));
  const auto& trace = model.loss_trace();
  ASSERT_EQ(trace.size(), 500u);
  EXPECT_LT(trace.back(), 1e-3 * trace.front());
}

TEST(AutoencoderTest, LineInR5) {
  const auto data = testing::LineDataset(300, 2);
  const auto model = TrainAutoencoder(data, Cfg(1, 500, 1));
  const auto& trace = model.loss_trace();
  for (double l : trace) ASSERT_TRUE(std::isfinite(l));
  EXPECT_LT(trace.back(), 0.1 * trace.front());
  EXPECT_NEAR(model.ReconstructionLoss(data.x), trace.back(), 0.05 * trace.front());
}

TEST(AutoencoderTest, DeterministicAndSerializable) {
  const auto data = testing::PlantedDataset(150, 4);
  const auto a = TrainAutoencoder(data, Cfg(3, 40, 9));
  const auto b = TrainAutoencoder(data, Cfg(3, 40, 9));
  EXPECT_EQ(a.loss_trace(), b.loss_trace());
  EXPECT_EQ(a, b);
  EXPECT_LE(a.loss_trace().back(), a.loss_trace().front());
  const auto c = AutoencoderModel::FromJson(a.ToJson());
  EXPECT_EQ(c, a);
  EXPECT_EQ(c.Encode(data.x), a.Encode(data.x));
  EXPECT_EQ(a.latent_dim(), 3u);
  EXPECT_EQ(a.hidden_dim(), 6u);  // ceil((8 + 3) / 2)
  EXPECT_EQ(TrainAutoencoder(data, Cfg(0, 2, 1)).latent_dim(), 4u);
}

TEST(AutoencoderTest, Errors) {
  const auto data = testing::PlantedDataset(20, 1);
  EXPECT_EQ(CodeOf([&] { TrainAutoencoder(data, Cfg(8, 10, 1)); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([&] { TrainAutoencoder(data, Cfg(2, 0, 1)); }), ErrorCode::kConfig);
  AutoencoderConfig wild = Cfg(2, 50, 1);
  wild.learning_rate = 1e300;
  Matrix big(20, 8, 1e200);
  const auto huge = MakeDataset(FeatureSchema::Numeric(8), big);
  EXPECT_EQ(CodeOf([&] { TrainAutoencoder(huge, wild); }), ErrorCode::kComputation);
  EXPECT_EQ(CodeOf([] { AutoencoderModel::FromJson("{\"format\": \"nope\"}"); }), ErrorCode::kData);
}

TEST(LatentNeighborsTest, SelfExclusionAndClusters) {
  const auto data = TwoClusters(40, 5);
  const auto model = TrainAutoencoder(data, Cfg(2, 300, 2));
  const auto nn = LatentNeighbors(model, data, data.x.row(7), 1);
  ASSERT_EQ(nn.size(), 1u);
  EXPECT_NE(nn[0], 7u);
  oracle::Mat rows;
  for (std::size_t r = 0; r < data.size(); ++r) rows.emplace_back(data.x.row(r).begin(), data.x.row(r).end());
  for (std::size_t q : {0, 13, 39, 40, 66, 79}) {
    const bool first = q < 40;
    for (auto i : oracle::BruteNearest(rows, q, 5)) ASSERT_EQ(i < 40, first);
    for (auto i : LatentNeighbors(model, data, data.x.row(q), 5)) ASSERT_EQ(i < 40, first) << q;
  }
  EXPECT_THROW(LatentNeighbors(model, data, data.x.row(0), 0), Error);
  EXPECT_THROW(LatentNeighbors(model, data, data.x.row(0), 80), Error);
}

TEST(LatentNeighborsTest, TiesGoToLowestIndex) {
  Matrix x(10, 3, 0.25);
  const auto data = MakeDataset(FeatureSchema::Numeric(3), x);
  const auto model = TrainAutoencoder(data, Cfg(1, 5, 1));
  std::vector<double> probe(3, 0.25);
  // The probe equals every row; one self-match is excluded.
  EXPECT_EQ(LatentNeighbors(model, data, probe, 3), (std::vector<std::size_t>{1, 2, 3}));
}

TEST(PerturbTest, SwapsExactlyMCellsFromOneDonor) {
  const auto data = DistinctValues(60, 8);
  const auto model = TrainAutoencoder(data, Cfg(3, 30, 1));
  NoiseConfig cfg;
  cfg.k_neighbors = 4;
  cfg.m_features = 3;
  cfg.seed = 10;
  const auto noisy = PerturbDataset(data, model, cfg);
  ASSERT_EQ(noisy.x.rows(), data.x.rows());
  ASSERT_EQ(noisy.x.cols(), data.x.cols());
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto nn = LatentNeighbors(model, data, data.x.row(r), 4);
    int changed = 0;
    std::set<std::size_t> donors;
    for (std::size_t c = 0; c < 8; ++c) {
      if (noisy.x(r, c) == data.x(r, c)) continue;
      ++changed;
      for (auto n : nn) {
        if (data.x(n, c) == noisy.x(r, c)) donors.insert(n);
      }
    }
    ASSERT_EQ(changed, 3) << r;
    ASSERT_EQ(donors.size(), 1u) << r;
  }
  EXPECT_EQ(PerturbDataset(data, model, cfg).x, noisy.x);
  cfg.seed = 11;
  EXPECT_NE(PerturbDataset(data, model, cfg).x, noisy.x);
}

TEST(PerturbTest, FullSwapAndDuplicates) {
  const auto data = DistinctValues(30, 4);
  const auto model = TrainAutoencoder(data, Cfg(2, 20, 1));
  NoiseConfig cfg;
  cfg.m_features = 4;
  cfg.k_neighbors = 3;
  cfg.seed = 1;
  const auto noisy = PerturbDataset(data, model, cfg);
  for (std::size_t r = 0; r < 30; ++r) {
    bool from_one_row = false;
    for (std::size_t n = 0; n < 30 && !from_one_row; ++n) {
      from_one_row = n != r && std::equal(noisy.x.row(r).begin(), noisy.x.row(r).end(),
                                          data.x.row(n).begin());
    }
    ASSERT_TRUE(from_one_row) << r;
  }
  Matrix dup(25, 4);
  for (std::size_t r = 0; r < 25; ++r) {
    for (std::size_t c = 0; c < 4; ++c) dup(r, c) = 0.1 * c;
  }
  const auto dup_data = MakeDataset(FeatureSchema::Numeric(4), dup);
  const auto dup_model = TrainAutoencoder(dup_data, Cfg(2, 10, 1));
  EXPECT_EQ(PerturbDataset(dup_data, dup_model, cfg).x, dup);
}

TEST(PerturbTest, CategoricalValuesStayInColumn) {
  Rng rng(4);
  std::uniform_int_distribution<int> cat(0, 4);
  std::normal_distribution<double> g(0, 1);
  Matrix x(80, 5);
  for (std::size_t r = 0; r < 80; ++r) {
    x(r, 0) = g(rng);
    x(r, 1) = cat(rng);
    x(r, 2) = r % 2;
    x(r, 3) = 1 - x(r, 2);
    x(r, 4) = g(rng);
  }
  FeatureSchema schema({"a", "b", "c=0", "c=1", "e"},
                       {FeatureKind::kNumeric, FeatureKind::kCategorical, FeatureKind::kCategorical,
                        FeatureKind::kCategorical, FeatureKind::kNumeric});
  const auto data = MakeDataset(schema, x);
  const auto model = TrainAutoencoder(data, Cfg(2, 50, 3));
  NoiseConfig cfg;
  cfg.m_features = 2;
  cfg.seed = 3;
  const auto noisy = PerturbDataset(data, model, cfg);
  for (std::size_t c = 0; c < 5; ++c) {
    const auto col = data.x.column(c);
    const std::set<double> values(col.begin(), col.end());
    for (std::size_t r = 0; r < 80; ++r) ASSERT_TRUE(values.count(noisy.x(r, c)));
  }
}

TEST(PerturbTest, ConfigValidation) {
  EXPECT_EQ(ResolveNoiseConfig({}, 100, 9).m_features, 3u);
  EXPECT_EQ(ResolveNoiseConfig({}, 100, 9).k_neighbors, 5u);
  NoiseConfig bad;
  bad.m_features = 10;
  EXPECT_EQ(CodeOf([&] { ResolveNoiseConfig(bad, 100, 9); }), ErrorCode::kConfig);
  bad.m_features = 2;
  bad.k_neighbors = 100;
  EXPECT_EQ(CodeOf([&] { ResolveNoiseConfig(bad, 100, 9); }), ErrorCode::kConfig);
  const auto a = testing::PlantedDataset(30, 1);
  const auto b = MakeDataset(FeatureSchema({"x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"},
                                           std::vector<FeatureKind>(8, FeatureKind::kNumeric)),
                             a.x);
  const auto model = TrainAutoencoder(a, Cfg(2, 5, 1));
  EXPECT_THROW(PerturbDataset(b, model, {}), Error);
}

}  // namespace
}  // namespace rankfuse
