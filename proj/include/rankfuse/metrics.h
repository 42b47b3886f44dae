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

#ifndef RANKFUSE_METRICS_H_
#define RANKFUSE_METRICS_H_

#include <span>

#include "rankfuse/core.h"
#include "rankfuse/predictor.h"

namespace rankfuse {

// Rank-based quality of one explanation. NRC is a cost (lower is better);
// stability and faithfulness are benefits in [-1, 1].
struct MetricVector {
  double nrc = 0.0;
  double stability = 0.0;
  double faithfulness = 0.0;
};

struct NrcConfig {
  double alpha = 0.5;  // weight of the rank-dispersion penalty
};

// (sum_i 1/R_i) * ln(d + 1) * (1 + alpha * std_pop(R)).
double Nrc(const Ranking& ranking, const NrcConfig& config = {});

// |f(x) - f(x with x_i := baseline_i)| for every feature i.
std::vector<double> PredictionDeltas(const Predictor& model,
                                     std::span<const double> x,
                                     std::span<const double> baseline);

// Pearson(1 / R_i, delta_i).
double RankFaithfulness(const Predictor& model, const Ranking& ranking,
                        std::span<const double> x,
                        std::span<const double> baseline);

// Spearman between an explanation from the original fit and one from the
// noisy fit.
double RankStability(const Explanation& original, const Explanation& noisy);

// Entropy of |score_i| / sum_j |score_j|.
double TraditionalComplexity(const Explanation& explanation);

// Pearson(|score_i|, delta_i).
double TraditionalFaithfulness(const Predictor& model,
                               const Explanation& explanation,
                               std::span<const double> x,
                               std::span<const double> baseline);

// Euclidean distance between the min-max normalized score vectors.
double TraditionalSensitivity(const Explanation& original,
                              const Explanation& noisy);

}  // namespace rankfuse

#endif  // RANKFUSE_METRICS_H_
