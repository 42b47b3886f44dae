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

#include "rankfuse/rankagg.h"

#include <algorithm>
#include <numeric>

#include "rankfuse/error.h"

namespace rankfuse::rankagg {

const char* MethodName(Method m) {
  switch (m) {
    case Method::kWsum:
      return "wsum";
    case Method::kBorda:
      return "borda";
    case Method::kCondorcet:
      return "condorcet";
  }
  return "unknown";
}

Method ParseMethod(const std::string& name) {
  if (name == "wsum") return Method::kWsum;
  if (name == "borda") return Method::kBorda;
  if (name == "condorcet") return Method::kCondorcet;
  Fail(ErrorCode::kConfig, "unknown aggregation method '" + name + "'");
}

void AggregationInput::Validate() const {
  Require(!rankings.empty(), "AggregationInput: no rankings");
  Require(weights.size() == rankings.size(), "AggregationInput: weight count mismatch");
  for (const auto& r : rankings) {
    Require(r.schema() == rankings.front().schema(), "AggregationInput: schema mismatch");
  }
}

namespace {

std::vector<double> BordaTotals(const AggregationInput& in) {
  const std::size_t d = in.rankings.front().size();
  std::vector<double> total(d, 0.0);
  for (std::size_t e = 0; e < in.rankings.size(); ++e) {
    for (std::size_t j = 0; j < d; ++j) {
      total[j] += in.weights[e] * static_cast<double>(static_cast<int>(d) - in.rankings[e][j]);
    }
  }
  return total;
}

}  // namespace

Ranking WsumAggregate(const AggregationInput& in) {
  in.Validate();
  const std::size_t d = in.rankings.front().size();
  std::vector<double> total(d, 0.0);
  for (std::size_t e = 0; e < in.rankings.size(); ++e) {
    const auto scores = MinMaxNormalize(SquaredInverseScores(in.rankings[e]));
    for (std::size_t j = 0; j < d; ++j) total[j] += in.weights[e] * scores[j];
  }
  return Ranking(in.rankings.front().schema(), CompetitionRanks(total, kTieTolerance));
}

Ranking BordaAggregate(const AggregationInput& in) {
  in.Validate();
  return Ranking(in.rankings.front().schema(), CompetitionRanks(BordaTotals(in), kTieTolerance));
}

Ranking CondorcetAggregate(const AggregationInput& in) {
  in.Validate();
  const std::size_t d = in.rankings.front().size();
  std::vector<int> copeland(d, 0);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      double margin = 0.0;  // > 0: a beats b
      for (std::size_t e = 0; e < in.rankings.size(); ++e) {
        const int ra = in.rankings[e][a];
        const int rb = in.rankings[e][b];
        margin += in.weights[e] * static_cast<double>((rb > ra) - (rb < ra));
      }
      if (std::abs(margin) <= kTieTolerance) continue;
      copeland[a] += margin > 0 ? 1 : -1;
      copeland[b] += margin > 0 ? -1 : 1;
    }
  }
  const auto borda = BordaTotals(in);
  // Lexicographic (Copeland, Borda) key; equal keys share a rank.
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  auto tied = [&](std::size_t a, std::size_t b) {
    return copeland[a] == copeland[b] &&
           std::abs(borda[a] - borda[b]) <=
               kTieTolerance * std::max(1.0, std::abs(borda[a]));
  };
  auto better = [&](std::size_t a, std::size_t b) {
    if (copeland[a] != copeland[b]) return copeland[a] > copeland[b];
    if (tied(a, b)) return false;
    return borda[a] > borda[b];
  };
  std::stable_sort(order.begin(), order.end(), better);
  std::vector<int> ranks(d);
  std::size_t group_start = 0;
  for (std::size_t pos = 0; pos < d; ++pos) {
    if (pos > 0 && !tied(order[group_start], order[pos])) group_start = pos;
    ranks[order[pos]] = static_cast<int>(group_start) + 1;
  }
  return Ranking(in.rankings.front().schema(), std::move(ranks));
}

Ranking Aggregate(Method method, const AggregationInput& in) {
  switch (method) {
    case Method::kWsum:
      return WsumAggregate(in);
    case Method::kBorda:
      return BordaAggregate(in);
    case Method::kCondorcet:
      return CondorcetAggregate(in);
  }
  Fail(ErrorCode::kConfig, "unknown aggregation method");
}

}  // namespace rankfuse::rankagg
