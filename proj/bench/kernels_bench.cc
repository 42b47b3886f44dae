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

// Serial reference vs OpenMP kernel timings. The thread count is the second
// benchmark argument; set OMP_NUM_THREADS or pass --benchmark_filter to narrow.

#include <benchmark/benchmark.h>

#include <random>

#include "rankfuse/forest.h"
#include "rankfuse/kernels.h"
#include "rankfuse/matrix.h"
#include "rankfuse/predictor.h"
#include "rankfuse/random.h"

namespace rankfuse {
namespace {

Matrix Gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, d);
  for (auto& v : m.data()) v = g(rng);
  return m;
}

const ForestModel& BenchForest() {
  static const ForestModel model = [] {
    const Matrix x = Gaussian(2000, 16, 1);
    std::vector<int> y(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) y[r] = x(r, 0) * x(r, 1) + x(r, 2) > 0;
    ForestConfig cfg;
    cfg.n_trees = 100;
    cfg.max_depth = 8;
    cfg.seed = 1;
    return TrainForest(FeatureSchema::Numeric(16), x, y, cfg);
  }();
  return model;
}

template <bool kParallel>
void BM_ForestPredict(benchmark::State& state) {
  const auto& model = BenchForest();
  const Matrix rows = Gaussian(static_cast<std::size_t>(state.range(0)), 16, 2);
  kernels::SetNumThreads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto out = kParallel ? kernels::parallel::ForestPredict(model.trees(), rows)
                         : kernels::serial::ForestPredict(model.trees(), rows);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool kParallel>
void BM_AllNearest(benchmark::State& state) {
  const Matrix points = Gaussian(static_cast<std::size_t>(state.range(0)), 8, 3);
  kernels::SetNumThreads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto out = kParallel ? kernels::parallel::AllNearest(points, 5) : kernels::serial::AllNearest(points, 5);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool kParallel>
void BM_CoalitionValues(benchmark::State& state) {
  const auto& model = BenchForest();
  const Matrix bg = Gaussian(50, 16, 4);
  const Matrix x = Gaussian(1, 16, 5);
  // Only the first d features vary; the rest come from x.
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  FunctionPredictor sub(FeatureSchema::Numeric(d), [&](std::span<const double> z) {
    std::vector<double> full(x.row(0).begin(), x.row(0).end());
    std::copy(z.begin(), z.end(), full.begin());
    return model.PredictOne(full);
  });
  Matrix sub_bg(bg.rows(), d);
  for (std::size_t r = 0; r < bg.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) sub_bg(r, c) = bg(r, c);
  }
  const std::vector<double> sub_x(x.row(0).begin(), x.row(0).begin() + static_cast<std::ptrdiff_t>(d));
  kernels::SetNumThreads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto out = kParallel ? kernels::parallel::CoalitionValues(sub, sub_x, sub_bg)
                         : kernels::serial::CoalitionValues(sub, sub_x, sub_bg);
    benchmark::DoNotOptimize(out.data());
  }
}

BENCHMARK(BM_ForestPredict<false>)->Args({10000, 1});
BENCHMARK(BM_ForestPredict<true>)->Args({10000, 1})->Args({10000, 2})->Args({10000, 4});
BENCHMARK(BM_AllNearest<false>)->Args({2000, 1});
BENCHMARK(BM_AllNearest<true>)->Args({2000, 1})->Args({2000, 2})->Args({2000, 4});
BENCHMARK(BM_CoalitionValues<false>)->Args({8, 1});
BENCHMARK(BM_CoalitionValues<true>)->Args({8, 1})->Args({8, 2})->Args({8, 4});

}  // namespace
}  // namespace rankfuse

BENCHMARK_MAIN();
