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

#ifndef RANKFUSE_RANKAGG_H_
#define RANKFUSE_RANKAGG_H_

#include <string>
#include <vector>

#include "rankfuse/core.h"

namespace rankfuse::rankagg {

enum class Method { kWsum, kBorda, kCondorcet };

const char* MethodName(Method m);
Method ParseMethod(const std::string& name);

struct AggregationInput {
  std::vector<Ranking> rankings;
  Weights weights;

  void Validate() const;
};

// Relative tolerance under which aggregate scores count as tied.
inline constexpr double kTieTolerance = 1e-12;

// Weighted sum of min-max normalized squared-inverse-rank scores.
Ranking WsumAggregate(const AggregationInput& in);

// Weighted Borda points sum_e w_e * (d - rank_e).
Ranking BordaAggregate(const AggregationInput& in);

// Weighted pairwise majority; features ordered by Copeland score, then by
// weighted Borda total.
Ranking CondorcetAggregate(const AggregationInput& in);

Ranking Aggregate(Method method, const AggregationInput& in);

}  // namespace rankfuse::rankagg

#endif  // RANKFUSE_RANKAGG_H_
