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

#include "rankfuse/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "rankfuse/error.h"

namespace rankfuse::stats {

std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // Positions start..end-1 hold ranks start+1..end.
    const double avg = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = avg;
    start = end;
  }
  return ranks;
}

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  Require(xs.size() == ys.size(), "Pearson: length mismatch");
  Require(xs.size() >= 2, "Pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double Spearman(std::span<const double> xs, std::span<const double> ys) {
  Require(xs.size() == ys.size(), "Spearman: length mismatch");
  const auto rx = AverageRanks(xs);
  const auto ry = AverageRanks(ys);
  return Pearson(rx, ry);
}

double PopulationStd(std::span<const double> values) {
  Require(!values.empty(), "PopulationStd: empty input");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

double ChiSquareSurvival(double statistic, double dof) {
  Require(dof > 0.0, "ChiSquareSurvival: dof must be positive");
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double NormalTwoSidedP(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

FriedmanResult FriedmanTest(const Matrix& values) {
  const std::size_t n = values.rows();
  const std::size_t k = values.cols();
  Require(n >= 2 && k >= 2, "FriedmanTest: need n >= 2 blocks and k >= 2 methods");
  FriedmanResult result;
  result.n_blocks = n;
  result.k_methods = k;
  result.average_ranks.assign(k, 0.0);
  for (std::size_t b = 0; b < n; ++b) {
    const auto ranks = AverageRanks(values.row(b));
    for (std::size_t j = 0; j < k; ++j) result.average_ranks[j] += ranks[j];
  }
  double sum_sq = 0.0;
  for (double& r : result.average_ranks) {
    r /= static_cast<double>(n);
    sum_sq += r * r;
  }
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const double chi =
      12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  // All-tied input lands a few ulps either side of zero.
  result.chi_square = std::abs(chi) < 1e-9 ? 0.0 : std::max(chi, 0.0);
  result.p_value = ChiSquareSurvival(result.chi_square, kd - 1.0);
  return result;
}

std::vector<double> FinnerAdjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    Require(p >= 0.0 && p <= 1.0, "FinnerAdjust: p-value outside [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double p = p_values[order[j]];
    const double exponent = static_cast<double>(m) / static_cast<double>(j + 1);
    // Rounding in 1 - (1 - p)^e can dip a hair below p itself.
    const double adj = std::max(p, 1.0 - std::pow(1.0 - p, exponent));
    running = std::max(running, std::min(adj, 1.0));
    adjusted[order[j]] = running;
  }
  return adjusted;
}

namespace {

std::vector<int> CountWorse(const FriedmanResult& fr, double alpha) {
  const std::size_t k = fr.k_methods;
  std::vector<int> counts(k, 0);
  if (fr.p_value >= alpha) return counts;
  const double se = std::sqrt(static_cast<double>(k * (k + 1)) /
                              (6.0 * static_cast<double>(fr.n_blocks)));
  for (std::size_t m = 0; m < k; ++m) {
    std::vector<std::size_t> others;
    std::vector<double> raw;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == m) continue;
      others.push_back(j);
      const double z = (fr.average_ranks[j] - fr.average_ranks[m]) / se;
      raw.push_back(NormalTwoSidedP(z));
    }
    const auto adj = FinnerAdjust(raw);
    for (std::size_t c = 0; c < others.size(); ++c) {
      if (adj[c] < alpha && fr.average_ranks[others[c]] > fr.average_ranks[m]) {
        ++counts[m];
      }
    }
  }
  return counts;
}

}  // namespace

int CountSignificantlyWorse(const Matrix& values, std::size_t method, double alpha) {
  Require(method < values.cols(), "CountSignificantlyWorse: method out of range");
  return CountWorse(FriedmanTest(values), alpha)[method];
}

std::vector<int> CountSignificantlyWorseAll(const Matrix& values, double alpha) {
  return CountWorse(FriedmanTest(values), alpha);
}

}  // namespace rankfuse::stats
