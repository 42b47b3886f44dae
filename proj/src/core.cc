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

#include "rankfuse/core.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rankfuse/error.h"

namespace rankfuse {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kConfig:
      return "config";
    case ErrorCode::kData:
      return "data";
    case ErrorCode::kComputation:
      return "computation";
    case ErrorCode::kBridge:
      return "bridge";
  }
  return "unknown";
}

const char* FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kNumeric ? "numeric" : "categorical";
}

FeatureKind ParseFeatureKind(const std::string& name) {
  if (name == "numeric") return FeatureKind::kNumeric;
  if (name == "categorical") return FeatureKind::kCategorical;
  Fail(ErrorCode::kInvalidArgument, "unknown feature kind '" + name + "'");
}

FeatureSchema::FeatureSchema(std::vector<std::string> names,
                             std::vector<FeatureKind> kinds)
    : names_(std::move(names)), kinds_(std::move(kinds)) {
  Require(!names_.empty(), "FeatureSchema: at least one feature required");
  Require(names_.size() == kinds_.size(),
          "FeatureSchema: names and kinds differ in length");
  std::set<std::string> seen(names_.begin(), names_.end());
  Require(seen.size() == names_.size(), "FeatureSchema: duplicate names");
}

FeatureSchema FeatureSchema::Numeric(std::size_t d) {
  std::vector<std::string> names(d);
  for (std::size_t i = 0; i < d; ++i) names[i] = "f" + std::to_string(i);
  return FeatureSchema(std::move(names),
                       std::vector<FeatureKind>(d, FeatureKind::kNumeric));
}

std::uint64_t FeatureSchema::Hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (char c : names_[i]) mix(static_cast<unsigned char>(c));
    mix(0);
    mix(kinds_[i] == FeatureKind::kNumeric ? 'n' : 'c');
  }
  return h;
}

Explanation::Explanation(FeatureSchema schema, std::vector<double> scores,
                         std::string source)
    : schema_(std::move(schema)),
      scores_(std::move(scores)),
      source_(std::move(source)) {
  Require(scores_.size() == schema_.size(),
          "Explanation: score count does not match schema");
  for (double s : scores_) {
    Require(std::isfinite(s), "Explanation: non-finite score");
  }
}

Ranking::Ranking(FeatureSchema schema, std::vector<int> ranks)
    : schema_(std::move(schema)), ranks_(std::move(ranks)) {
  Require(ranks_.size() == schema_.size(),
          "Ranking: rank count does not match schema");
  Require(IsCompetitionRanking(ranks_),
          "Ranking: ranks are not a min-competition ranking");
}

Weights::Weights(std::vector<double> values) : values_(std::move(values)) {
  Require(!values_.empty(), "Weights: empty");
  double sum = 0.0;
  for (double v : values_) {
    Require(std::isfinite(v) && v >= 0.0, "Weights: negative or non-finite");
    sum += v;
  }
  Require(std::abs(sum - 1.0) <= kSumTolerance, "Weights: do not sum to 1");
}

Weights Weights::Uniform(std::size_t n) {
  Require(n > 0, "Weights: empty");
  return Weights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::vector<int> CompetitionRanks(std::span<const double> keys,
                                  double rel_tol) {
  const std::size_t n = keys.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
  std::vector<int> ranks(n);
  std::size_t group_start = 0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const double head = keys[order[group_start]];
    const double tol = rel_tol * std::max(1.0, std::abs(head));
    if (pos == 0 || head - keys[order[pos]] > tol) group_start = pos;
    ranks[order[pos]] = static_cast<int>(group_start) + 1;
  }
  return ranks;
}

bool IsCompetitionRanking(std::span<const int> ranks) {
  std::vector<int> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t pos = 0; pos < sorted.size(); ++pos) {
    const bool continues_tie = pos > 0 && sorted[pos] == sorted[pos - 1];
    if (!continues_tie && sorted[pos] != static_cast<int>(pos) + 1) {
      return false;
    }
  }
  return true;
}

Ranking RankFeatures(const Explanation& explanation) {
  std::vector<double> magnitude(explanation.size());
  for (std::size_t i = 0; i < magnitude.size(); ++i) {
    magnitude[i] = std::abs(explanation.scores()[i]);
  }
  return Ranking(explanation.schema(), CompetitionRanks(magnitude));
}

std::vector<double> SquaredInverseScores(const Ranking& ranking) {
  std::vector<double> out(ranking.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = ranking[i];
    out[i] = 1.0 / (r * r);
  }
  return out;
}

std::vector<double> MinMaxNormalize(std::span<const double> scores) {
  Require(!scores.empty(), "MinMaxNormalize: empty input");
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double range = *hi - *lo;
  std::vector<double> out(scores.size(), 0.0);
  if (range == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (scores[i] - *lo) / range;
  }
  return out;
}

}  // namespace rankfuse
