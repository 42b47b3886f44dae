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

// Small synthetic datasets shared by the tests.

#ifndef RANKFUSE_TESTS_TEST_UTIL_H_
#define RANKFUSE_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/core.h"
#include "rankfuse/dataset.h"
#include "rankfuse/matrix.h"
#include "rankfuse/random.h"

namespace rankfuse::testing {

inline double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Gaussian features, label = Bernoulli(sigmoid(w . x)).
inline Dataset LinearDataset(std::size_t n, const std::vector<double>& w, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = w.size();
  Matrix x(n, d);
  std::vector<int> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    double z = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      x(r, c) = normal(rng);
      z += w[c] * x(r, c);
    }
    labels[r] = unit(rng) < Sigmoid(z) ? 1 : 0;
  }
  return MakeDataset(FeatureSchema::Numeric(d), std::move(x), std::move(labels));
}

// Eight Gaussian features; the label depends nonlinearly on the first five
// (interaction, periodic and quadratic terms) and not at all on the rest.
inline double PlantedLogit(std::span<const double> x) {
  return 2.0 * x[0] * x[1] + 1.5 * std::sin(2.0 * x[2]) + (x[3] * x[3] - 1.0) + 0.8 * x[4];
}

inline Dataset PlantedDataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix x(n, 8);
  std::vector<int> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 8; ++c) x(r, c) = normal(rng);
    labels[r] = unit(rng) < Sigmoid(2.0 * PlantedLogit(x.row(r))) ? 1 : 0;
  }
  return MakeDataset(FeatureSchema::Numeric(8), std::move(x), std::move(labels));
}

// Points t * direction + tiny jitter along a line in R^5.
inline Dataset LineDataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> t(-2.0, 2.0);
  std::normal_distribution<double> jitter(0.0, 0.01);
  const double dir[5] = {0.5, -0.3, 0.7, 0.2, -0.4};
  Matrix x(n, 5);
  for (std::size_t r = 0; r < n; ++r) {
    const double s = t(rng);
    for (std::size_t c = 0; c < 5; ++c) x(r, c) = s * dir[c] + jitter(rng);
  }
  return MakeDataset(FeatureSchema::Numeric(5), std::move(x));
}

inline std::string SourceDir() { return RANKFUSE_SOURCE_DIR; }

}  // namespace rankfuse::testing

#endif  // RANKFUSE_TESTS_TEST_UTIL_H_
