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

#ifndef RANKFUSE_KERNELS_H_
#define RANKFUSE_KERNELS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "rankfuse/forest.h"
#include "rankfuse/matrix.h"
#include "rankfuse/predictor.h"

// Data-parallel inner loops. Every kernel has a plain serial reference and
// an OpenMP version that must return bit-identical results; tests compare
// the two and bench/ times them.
namespace rankfuse::kernels {

// Thread count used by the OpenMP kernels (default 1). Kernels invoked from
// inside an enclosing parallel region run on the calling thread.
void SetNumThreads(int n);
int NumThreads();

struct Neighbor {
  std::size_t index;
  double distance_sq;
};

namespace serial {

std::vector<double> ForestPredict(std::span<const DecisionTree> trees,
                                  const Matrix& rows);

std::vector<double> SquaredDistances(const Matrix& points,
                                     std::span<const double> query);

// K nearest rows of `points` to row i for every i (self excluded), ordered by
// (distance, index).
std::vector<std::vector<std::size_t>> AllNearest(const Matrix& points,
                                                 std::size_t k);

// v(S) = mean over background rows b of f(x on S, b elsewhere), for every
// coalition mask S in [0, 2^d).
std::vector<double> CoalitionValues(const Predictor& model,
                                    std::span<const double> x,
                                    const Matrix& background);

}  // namespace serial

namespace parallel {

std::vector<double> ForestPredict(std::span<const DecisionTree> trees,
                                  const Matrix& rows);
std::vector<double> SquaredDistances(const Matrix& points,
                                     std::span<const double> query);
std::vector<std::vector<std::size_t>> AllNearest(const Matrix& points,
                                                 std::size_t k);
std::vector<double> CoalitionValues(const Predictor& model,
                                    std::span<const double> x,
                                    const Matrix& background);

}  // namespace parallel

// Shared selection rule: the k smallest (distance, index) pairs, skipping
// `exclude` (pass points.rows() to exclude nothing).
std::vector<std::size_t> SelectNearest(std::span<const double> distances_sq,
                                       std::size_t k, std::size_t exclude);

}  // namespace rankfuse::kernels

#endif  // RANKFUSE_KERNELS_H_
