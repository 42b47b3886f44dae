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

#ifndef RANKFUSE_CORE_H_
#define RANKFUSE_CORE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rankfuse {

enum class FeatureKind { kNumeric, kCategorical };

const char* FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(const std::string& name);

// Names and kinds of the (encoded) feature columns a predictor consumes.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<std::string> names, std::vector<FeatureKind> kinds);

  // All-numeric schema with names f0..f{d-1}.
  static FeatureSchema Numeric(std::size_t d);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<FeatureKind>& kinds() const { return kinds_; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  FeatureKind kind(std::size_t i) const { return kinds_[i]; }
  bool is_categorical(std::size_t i) const {
    return kinds_[i] == FeatureKind::kCategorical;
  }

  // Stable FNV-1a digest of names and kinds.
  std::uint64_t Hash() const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<FeatureKind> kinds_;
};

// Signed per-feature importance scores; |score| is the importance magnitude.
class Explanation {
 public:
  Explanation() = default;
  Explanation(FeatureSchema schema, std::vector<double> scores,
              std::string source);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<double>& scores() const { return scores_; }
  const std::string& source() const { return source_; }
  std::size_t size() const { return scores_.size(); }

  bool operator==(const Explanation&) const = default;

 private:
  FeatureSchema schema_;
  std::vector<double> scores_;
  std::string source_;
};

// Min-competition ("1224") feature ranking; rank 1 is the most important.
class Ranking {
 public:
  Ranking() = default;
  Ranking(FeatureSchema schema, std::vector<int> ranks);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<int>& ranks() const { return ranks_; }
  int operator[](std::size_t i) const { return ranks_[i]; }
  std::size_t size() const { return ranks_.size(); }

  bool operator==(const Ranking&) const = default;

 private:
  FeatureSchema schema_;
  std::vector<int> ranks_;
};

// Nonnegative weights summing to one.
class Weights {
 public:
  static constexpr double kSumTolerance = 1e-9;

  Weights() = default;
  explicit Weights(std::vector<double> values);

  static Weights Uniform(std::size_t n);

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

// Min-competition ranks of `keys` in descending order. Keys within
// `rel_tol * max(1, |key|)` of the first key of a tie group share its rank.
std::vector<int> CompetitionRanks(std::span<const double> keys,
                                  double rel_tol = 0.0);

// Checks the exact min-competition shape: sorted ranks read 1,1,3,4,4,6...
bool IsCompetitionRanking(std::span<const int> ranks);

Ranking RankFeatures(const Explanation& explanation);

std::vector<double> SquaredInverseScores(const Ranking& ranking);

// (s - min) / (max - min); a constant input maps to all zeros.
std::vector<double> MinMaxNormalize(std::span<const double> scores);

}  // namespace rankfuse

#endif  // RANKFUSE_CORE_H_
