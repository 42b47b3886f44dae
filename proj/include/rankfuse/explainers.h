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

#ifndef RANKFUSE_EXPLAINERS_H_
#define RANKFUSE_EXPLAINERS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/core.h"
#include "rankfuse/dataset.h"
#include "rankfuse/predictor.h"

namespace rankfuse {

// Free-form numbers and flags attached to an explanation.
struct Diagnostics {
  std::map<std::string, double> values;
  std::vector<std::string> flags;

  void Merge(const Diagnostics& other, const std::string& prefix);
};

struct ExplainOutput {
  Explanation explanation;
  Diagnostics diagnostics;
};

// Background statistics of the dataset an explainer was fit to. Rebuilt for
// the original and for the noisy training data.
struct ExplainerFitState {
  Dataset data;
  std::vector<double> means;
  std::vector<double> stds;  // population std, 1 for constant columns
  // Categorical columns: distinct values and their empirical frequencies.
  std::vector<std::vector<double>> category_values;
  std::vector<std::vector<double>> category_freqs;
  // alias[j] = first column identical to column j over all rows (or j).
  std::vector<std::size_t> alias;
  Matrix background;
};

ExplainerFitState BuildFitState(const Dataset& data, std::size_t max_background,
                                std::uint64_t seed);

class FittedExplainer {
 public:
  virtual ~FittedExplainer() = default;
  virtual ExplainOutput Explain(const Predictor& model, std::span<const double> x,
                                std::uint64_t seed) const = 0;
};

class Explainer {
 public:
  virtual ~Explainer() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<FittedExplainer> Fit(const Dataset& data,
                                               std::uint64_t seed) const = 0;
};

// ---------------------------------------------------------------- lime ---

struct LimeParams {
  std::size_t n_samples = 1000;
  double kernel_width = 0.0;  // 0 selects 0.75 * sqrt(d)
  double ridge = 1e-6;        // used only when the weighted design is singular
};

ExplainOutput LimeExplain(const Predictor& model, std::span<const double> x,
                          const ExplainerFitState& fit, const LimeParams& params,
                          std::uint64_t seed);

// ------------------------------------------------------------- shapley ---

struct ShapParams {
  std::size_t n_permutations = 64;
  std::size_t max_background = 100;
};

struct ShapleyEstimate {
  std::vector<double> phi;
  std::vector<double> standard_error;  // zero for the exact computation
  // |sum(phi) - (f(x) - mean_b f(b))| over the full background.
  double efficiency_residual = 0.0;
  double base_value = 0.0;  // mean_b f(b)
};

// Permutation sampling with single-reference substitution from a uniformly
// drawn background row per permutation.
ShapleyEstimate ShapleySample(const Predictor& model, std::span<const double> x,
                              const Matrix& background, std::size_t n_permutations,
                              std::uint64_t seed);

// Exact enumeration over all 2^d coalitions of the same value function
// v(S) = mean_b f(x_S, b_rest).
ShapleyEstimate ShapleyExact(const Predictor& model, std::span<const double> x,
                             const Matrix& background);

// --------------------------------------------------------------- anchor ---

struct AnchorCondition {
  std::size_t feature = 0;
  bool categorical = false;
  double lower = 0.0;  // numeric: lower < v <= upper (infinite at the ends)
  double upper = 0.0;
  double value = 0.0;  // categorical: v == value

  bool Satisfied(double v) const {
    return categorical ? v == value : (v > lower && v <= upper);
  }
};

struct AnchorRule {
  std::vector<AnchorCondition> conditions;  // in the order they were added
  double precision = 0.0;
  std::vector<std::size_t> coverage_counts;  // n_range per condition
  bool reached_precision = false;
};

struct AnchorParams {
  double epsilon = 0.05;
};

// Condition for feature i around x_i: decile bin for numeric columns, exact
// value for categorical ones.
AnchorCondition MakeAnchorCondition(const Dataset& data, std::size_t feature,
                                    double value);

// C_i = 1 - n_range_i / n for conditioned features, 0 otherwise.
std::vector<double> AnchorImportance(const AnchorRule& rule, const Dataset& data);

struct AnchorOutput {
  AnchorRule rule;
  ExplainOutput output;
};

AnchorOutput AnchorExplain(const Predictor& model, std::span<const double> x,
                           const Dataset& data, const AnchorParams& params);

// ------------------------------------------------------------ builtins ---

std::unique_ptr<Explainer> MakeLimeExplainer(LimeParams params = {});
std::unique_ptr<Explainer> MakeShapExplainer(ShapParams params = {});
std::unique_ptr<Explainer> MakeAnchorExplainer(AnchorParams params = {});

}  // namespace rankfuse

#endif  // RANKFUSE_EXPLAINERS_H_
