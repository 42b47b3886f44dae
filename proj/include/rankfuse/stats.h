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

#ifndef RANKFUSE_STATS_H_
#define RANKFUSE_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "rankfuse/matrix.h"

namespace rankfuse::stats {

// Ascending ranks with ties sharing their average rank (1-based).
std::vector<double> AverageRanks(std::span<const double> values);

// Correlations return 0 when either input is constant.
double Pearson(std::span<const double> xs, std::span<const double> ys);
double Spearman(std::span<const double> xs, std::span<const double> ys);

double PopulationStd(std::span<const double> values);

// Upper tail of the chi-square distribution.
double ChiSquareSurvival(double statistic, double dof);

// Two-sided p-value of a standard normal statistic.
double NormalTwoSidedP(double z);

struct FriedmanResult {
  double chi_square = 0.0;
  double p_value = 1.0;
  std::vector<double> average_ranks;  // lower = better
  std::size_t n_blocks = 0;
  std::size_t k_methods = 0;
};

// `values` is n_blocks x k_methods; within each block the smallest value
// receives rank 1 (pass ranks or already direction-resolved values).
FriedmanResult FriedmanTest(const Matrix& values);

// Step-down Finner adjustment of m = |p_values| comparisons.
std::vector<double> FinnerAdjust(std::span<const double> p_values);

// Number of methods significantly worse than `method` (Friedman-gated,
// Finner-adjusted comparisons of average ranks, alpha = 0.05).
int CountSignificantlyWorse(const Matrix& values, std::size_t method,
                            double alpha = 0.05);

// Same, for every method at once.
std::vector<int> CountSignificantlyWorseAll(const Matrix& values,
                                            double alpha = 0.05);

}  // namespace rankfuse::stats

#endif  // RANKFUSE_STATS_H_
