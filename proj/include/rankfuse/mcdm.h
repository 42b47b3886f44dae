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

#ifndef RANKFUSE_MCDM_H_
#define RANKFUSE_MCDM_H_

#include <string>
#include <vector>

#include "rankfuse/core.h"
#include "rankfuse/matrix.h"

namespace rankfuse::mcdm {

enum class Direction { kBenefit, kCost };

const char* DirectionName(Direction d);
Direction ParseDirection(const std::string& name);

// Alternatives (explainers) x criteria (metrics).
struct DecisionMatrix {
  Matrix values;
  std::vector<Direction> directions;
  Weights criterion_weights;

  void Validate() const;
};

enum class Method { kTopsis, kEdas };

const char* MethodName(Method m);
Method ParseMethod(const std::string& name);

struct McdmResult {
  Method method = Method::kTopsis;
  std::vector<double> scores;  // one per alternative, in [0, 1], higher better
  std::vector<std::string> notes;  // degeneracy conventions that fired
};

// Columns holding negative values are shifted to min + kShiftEpsilon before
// vector normalization.
inline constexpr double kShiftEpsilon = 1e-6;

McdmResult Topsis(const DecisionMatrix& dm);
McdmResult Edas(const DecisionMatrix& dm);
McdmResult Score(Method method, const DecisionMatrix& dm);

// scores / sum(scores); uniform when the sum is zero.
Weights ScoresToWeights(const McdmResult& result);

}  // namespace rankfuse::mcdm

#endif  // RANKFUSE_MCDM_H_
