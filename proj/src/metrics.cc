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

#include "rankfuse/error.h"
#include "rankfuse/stats.h"

namespace rankfuse {

double Nrc(const Ranking& ranking, const NrcConfig& config) {
  Require(config.alpha >= 0.0, "Nrc: alpha must be nonnegative");
  const std::size_t d = ranking.size();
  Require(d >= 1, "Nrc: empty ranking");
  // Summing in sorted order makes the value a function of the rank multiset
  // alone, so equal multisets compare equal bit for bit.
  std::vector<double> ranks(ranking.ranks().begin(), ranking.ranks().end());
  std::sort(ranks.begin(), ranks.end());
  double inverse_sum = 0.0;
  for (double r : ranks) inverse_sum += 1.0 / r;
  const double dispersion = stats::PopulationStd(ranks);
  return inverse_sum * std::log(static_cast<double>(d) + 1.0) *
         (1.0 + config.alpha * dispersion);
}

std::vector<double> PredictionDeltas(const Predictor& model,
                                     std::span<const double> x,
                                     std::span<const double> baseline) {
  const std::size_t d = x.size();
  Require(baseline.size() == d, "PredictionDeltas: baseline width mismatch");
  Require(model.schema().size() == d, "PredictionDeltas: schema width mismatch");
  // Row 0 is x itself, row i+1 has feature i replaced.
  Matrix rows(d + 1, d);
  for (std::size_t r = 0; r <= d; ++r) {
    std::copy(x.begin(), x.end(), rows.row(r).begin());
  }
  for (std::size_t i = 0; i < d; ++i) rows(i + 1, i) = baseline[i];
  const auto p = model.PredictProba(rows);
  std::vector<double> delta(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(p[i + 1])) {
      Fail(ErrorCode::kComputation, "PredictionDeltas: non-finite prediction");
    }
    delta[i] = std::abs(p[0] - p[i + 1]);
  }
  return delta;
}

double RankFaithfulness(const Predictor& model, const Ranking& ranking,
                        std::span<const double> x,
                        std::span<const double> baseline) {
  Require(ranking.size() == x.size(), "RankFaithfulness: ranking width mismatch");
  const auto delta = PredictionDeltas(model, x, baseline);
  if (delta.size() < 2) return 0.0;
  std::vector<double> inverse(ranking.size());
  for (std::size_t i = 0; i < inverse.size(); ++i) inverse[i] = 1.0 / ranking[i];
  return stats::Pearson(inverse, delta);
}

double RankStability(const Explanation& original, const Explanation& noisy) {
  Require(original.schema() == noisy.schema(), "RankStability: schema mismatch");
  if (original.size() < 2) return 0.0;
  return stats::Spearman(original.scores(), noisy.scores());
}

double TraditionalComplexity(const Explanation& explanation) {
  double total = 0.0;
  for (double s : explanation.scores()) total += std::abs(s);
  Require(total > 0.0, "TraditionalComplexity: all scores are zero");
  double entropy = 0.0;
  for (double s : explanation.scores()) {
    const double p = std::abs(s) / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return entropy;
}

double TraditionalFaithfulness(const Predictor& model,
                               const Explanation& explanation,
                               std::span<const double> x,
                               std::span<const double> baseline) {
  Require(explanation.size() == x.size(),
          "TraditionalFaithfulness: explanation width mismatch");
  const auto delta = PredictionDeltas(model, x, baseline);
  if (delta.size() < 2) return 0.0;
  std::vector<double> magnitude(explanation.size());
  for (std::size_t i = 0; i < magnitude.size(); ++i) {
    magnitude[i] = std::abs(explanation.scores()[i]);
  }
  return stats::Pearson(magnitude, delta);
}

double TraditionalSensitivity(const Explanation& original,
                              const Explanation& noisy) {
  Require(original.schema() == noisy.schema(),
          "TraditionalSensitivity: schema mismatch");
  const auto a = MinMaxNormalize(original.scores());
  const auto b = MinMaxNormalize(noisy.scores());
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss);
}

}  // namespace rankfuse
