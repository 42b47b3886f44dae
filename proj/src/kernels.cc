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

#include "rankfuse/kernels.h"

#include <algorithm>
#include <atomic>
#include <numeric>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "rankfuse/error.h"

namespace rankfuse::kernels {
namespace {

std::atomic<int> g_num_threads{1};

// Threads for a kernel region; nested regions collapse to one.
int RegionThreads() {
#if defined(_OPENMP)
  if (omp_in_parallel()) return 1;
#endif
  return g_num_threads.load();
}

double TreeMean(std::span<const DecisionTree> trees, std::span<const double> x) {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.Predict(x);
  return sum / static_cast<double>(trees.size());
}

double Distance2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

Matrix CoalitionRows(std::span<const double> x, const Matrix& background,
                     std::size_t mask) {
  Matrix rows = background;
  for (std::size_t b = 0; b < rows.rows(); ++b) {
    auto r = rows.row(b);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (mask & (std::size_t{1} << j)) r[j] = x[j];
    }
  }
  return rows;
}

double MeanPrediction(const Predictor& model, const Matrix& rows) {
  const auto p = model.PredictProba(rows);
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

void CheckCoalitionInput(std::span<const double> x, const Matrix& background) {
  Require(!background.empty(), "CoalitionValues: empty background");
  Require(background.cols() == x.size(), "CoalitionValues: width mismatch");
  Require(x.size() <= 20, "CoalitionValues: exhaustive enumeration limited to d <= 20");
}

}  // namespace

void SetNumThreads(int n) { g_num_threads.store(std::max(1, n)); }
int NumThreads() { return g_num_threads.load(); }

std::vector<std::size_t> SelectNearest(std::span<const double> distances_sq,
                                       std::size_t k, std::size_t exclude) {
  std::vector<std::size_t> idx;
  idx.reserve(distances_sq.size());
  for (std::size_t i = 0; i < distances_sq.size(); ++i) {
    if (i != exclude) idx.push_back(i);
  }
  Require(k <= idx.size(), "SelectNearest: k exceeds candidate count");
  auto less = [&](std::size_t a, std::size_t b) {
    if (distances_sq[a] != distances_sq[b]) return distances_sq[a] < distances_sq[b];
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                    idx.end(), less);
  idx.resize(k);
  return idx;
}

namespace serial {

std::vector<double> ForestPredict(std::span<const DecisionTree> trees,
                                  const Matrix& rows) {
  Require(!trees.empty(), "ForestPredict: empty forest");
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = TreeMean(trees, rows.row(i));
  return out;
}

std::vector<double> SquaredDistances(const Matrix& points,
                                     std::span<const double> query) {
  Require(points.cols() == query.size(), "SquaredDistances: width mismatch");
  std::vector<double> out(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) out[i] = Distance2(points.row(i), query);
  return out;
}

std::vector<std::vector<std::size_t>> AllNearest(const Matrix& points,
                                                 std::size_t k) {
  Require(k >= 1 && k < points.rows(), "AllNearest: k out of range");
  std::vector<std::vector<std::size_t>> out(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    out[i] = SelectNearest(SquaredDistances(points, points.row(i)), k, i);
  }
  return out;
}

std::vector<double> CoalitionValues(const Predictor& model,
                                    std::span<const double> x,
                                    const Matrix& background) {
  CheckCoalitionInput(x, background);
  const std::size_t n_masks = std::size_t{1} << x.size();
  std::vector<double> v(n_masks);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    v[mask] = MeanPrediction(model, CoalitionRows(x, background, mask));
  }
  return v;
}

}  // namespace serial

namespace parallel {

std::vector<double> ForestPredict(std::span<const DecisionTree> trees,
                                  const Matrix& rows) {
  Require(!trees.empty(), "ForestPredict: empty forest");
  const auto n = static_cast<std::ptrdiff_t>(rows.rows());
  std::vector<double> out(rows.rows());
#pragma omp parallel for num_threads(RegionThreads()) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = TreeMean(trees, rows.row(i));
  return out;
}

std::vector<double> SquaredDistances(const Matrix& points,
                                     std::span<const double> query) {
  Require(points.cols() == query.size(), "SquaredDistances: width mismatch");
  const auto n = static_cast<std::ptrdiff_t>(points.rows());
  std::vector<double> out(points.rows());
#pragma omp parallel for num_threads(RegionThreads()) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = Distance2(points.row(i), query);
  return out;
}

std::vector<std::vector<std::size_t>> AllNearest(const Matrix& points,
                                                 std::size_t k) {
  Require(k >= 1 && k < points.rows(), "AllNearest: k out of range");
  const auto n = static_cast<std::ptrdiff_t>(points.rows());
  std::vector<std::vector<std::size_t>> out(points.rows());
#pragma omp parallel for num_threads(RegionThreads()) schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = SelectNearest(serial::SquaredDistances(points, points.row(i)), k,
                           static_cast<std::size_t>(i));
  }
  return out;
}

std::vector<double> CoalitionValues(const Predictor& model,
                                    std::span<const double> x,
                                    const Matrix& background) {
  CheckCoalitionInput(x, background);
  const auto n_masks = static_cast<std::ptrdiff_t>(std::size_t{1} << x.size());
  std::vector<double> v(static_cast<std::size_t>(n_masks));
#pragma omp parallel for num_threads(RegionThreads()) schedule(dynamic, 1)
  for (std::ptrdiff_t mask = 0; mask < n_masks; ++mask) {
    v[mask] = MeanPrediction(
        model, CoalitionRows(x, background, static_cast<std::size_t>(mask)));
  }
  return v;
}

}  // namespace parallel
}  // namespace rankfuse::kernels
