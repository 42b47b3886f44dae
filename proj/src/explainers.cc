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

#include "rankfuse/explainers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "rankfuse/error.h"
#include "rankfuse/kernels.h"
#include "rankfuse/random.h"

namespace rankfuse {

void Diagnostics::Merge(const Diagnostics& other, const std::string& prefix) {
  for (const auto& [k, v] : other.values) values[prefix + k] = v;
  for (const auto& f : other.flags) flags.push_back(prefix + f);
}

ExplainerFitState BuildFitState(const Dataset& data, std::size_t max_background,
                                std::uint64_t seed) {
  if (data.size() == 0) Fail(ErrorCode::kInvalidArgument, "BuildFitState: empty dataset");
  const std::size_t n = data.size();
  const std::size_t d = data.width();
  ExplainerFitState fit;
  fit.data = data;
  fit.means.assign(d, 0.0);
  fit.stds.assign(d, 1.0);
  fit.category_values.resize(d);
  fit.category_freqs.resize(d);
  fit.alias.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = data.x.column(j);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    fit.means[j] = mean;
    fit.stds[j] = sd > 0.0 ? sd : 1.0;
    if (data.schema.is_categorical(j)) {
      std::map<double, std::size_t> counts;
      for (double v : col) ++counts[v];
      for (const auto& [v, c] : counts) {
        fit.category_values[j].push_back(v);
        fit.category_freqs[j].push_back(static_cast<double>(c) / static_cast<double>(n));
      }
    }
    fit.alias[j] = j;
    for (std::size_t k = 0; k < j; ++k) {
      if (fit.alias[k] != k) continue;
      bool same = true;
      for (std::size_t r = 0; r < n && same; ++r) same = data.x(r, k) == data.x(r, j);
      if (same) {
        fit.alias[j] = k;
        break;
      }
    }
  }
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  if (n > max_background) {
    Rng rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(max_background);
    std::sort(rows.begin(), rows.end());
  }
  fit.background = data.x.SelectRows(rows);
  return fit;
}

// ---------------------------------------------------------------- lime ---

ExplainOutput LimeExplain(const Predictor& model, std::span<const double> x,
                          const ExplainerFitState& fit, const LimeParams& params,
                          std::uint64_t seed) {
  const std::size_t d = x.size();
  Require(d == fit.means.size(), "LimeExplain: width mismatch");
  Require(params.n_samples >= d + 2, "LimeExplain: n_samples must be >= d + 2");
  const double width =
      params.kernel_width > 0.0 ? params.kernel_width : 0.75 * std::sqrt(static_cast<double>(d));

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix samples(params.n_samples, d);
  std::copy(x.begin(), x.end(), samples.row(0).begin());
  for (std::size_t s = 1; s < params.n_samples; ++s) {
    auto row = samples.row(s);
    for (std::size_t j = 0; j < d; ++j) {
      if (fit.alias[j] != j) continue;
      if (fit.data.schema.is_categorical(j)) {
        const auto& freqs = fit.category_freqs[j];
        std::discrete_distribution<std::size_t> pick(freqs.begin(), freqs.end());
        row[j] = fit.category_values[j][pick(rng)];
      } else {
        row[j] = fit.means[j] + fit.stds[j] * normal(rng);
      }
    }
    for (std::size_t j = 0; j < d; ++j) row[j] = row[fit.alias[j]];
  }
  const auto y = model.PredictProba(samples);

  const auto n = static_cast<Eigen::Index>(params.n_samples);
  const auto p = static_cast<Eigen::Index>(d + 1);
  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd w(n), target(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto row = samples.row(static_cast<std::size_t>(s));
    design(s, 0) = 1.0;
    double dist2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      design(s, static_cast<Eigen::Index>(j) + 1) = (row[j] - fit.means[j]) / fit.stds[j];
      const double dz = (row[j] - x[j]) / fit.stds[j];
      dist2 += dz * dz;
    }
    w(s) = std::exp(-dist2 / (width * width));
    target(s) = y[static_cast<std::size_t>(s)];
  }

  const Eigen::MatrixXd weighted = design.array().colwise() * w.array();
  Eigen::MatrixXd normal_matrix = design.transpose() * weighted;
  const Eigen::VectorXd rhs = weighted.transpose() * target;

  ExplainOutput out;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w.cwiseSqrt().asDiagonal() * design);
  qr.setThreshold(1e-10);
  Eigen::VectorXd beta;
  if (qr.rank() < p) {
    for (Eigen::Index j = 1; j < p; ++j) normal_matrix(j, j) += params.ridge;
    beta = normal_matrix.ldlt().solve(rhs);
    out.diagnostics.flags.push_back("ridge_fallback");
  } else {
    beta = normal_matrix.ldlt().solve(rhs);
  }

  const Eigen::VectorXd fitted = design * beta;
  const double wsum = w.sum();
  const double ybar = w.dot(target) / wsum;
  const double ss_res = (w.array() * (target - fitted).array().square()).sum();
  const double ss_tot = (w.array() * (target.array() - ybar).square()).sum();
  out.diagnostics.values["surrogate_r2"] = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  std::vector<double> scores(d);
  for (std::size_t j = 0; j < d; ++j) {
    scores[j] = beta(static_cast<Eigen::Index>(j) + 1);
    if (!std::isfinite(scores[j])) {
      Fail(ErrorCode::kComputation, "LimeExplain: non-finite surrogate coefficient");
    }
  }
  out.explanation = Explanation(fit.data.schema, std::move(scores), "lime");
  return out;
}

// ------------------------------------------------------------- shapley ---

namespace {

double MeanOf(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

ShapleyEstimate ShapleySample(const Predictor& model, std::span<const double> x,
                              const Matrix& background, std::size_t n_permutations,
                              std::uint64_t seed) {
  const std::size_t d = x.size();
  Require(!background.empty(), "ShapleySample: empty background");
  Require(background.cols() == d, "ShapleySample: background width mismatch");
  Require(n_permutations >= 1, "ShapleySample: need at least one permutation");

  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_row(0, background.rows() - 1);
  std::vector<double> sum(d, 0.0), sum_sq(d, 0.0);
  std::vector<std::size_t> order(d);
  Matrix walk(d + 1, d);
  for (std::size_t t = 0; t < n_permutations; ++t) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto ref = background.row(pick_row(rng));
    // Row k holds x on the first k features of the permutation.
    std::copy(ref.begin(), ref.end(), walk.row(0).begin());
    for (std::size_t k = 0; k < d; ++k) {
      std::copy(walk.row(k).begin(), walk.row(k).end(), walk.row(k + 1).begin());
      walk(k + 1, order[k]) = x[order[k]];
    }
    const auto f = model.PredictProba(walk);
    for (std::size_t k = 0; k < d; ++k) {
      const double contribution = f[k + 1] - f[k];
      sum[order[k]] += contribution;
      sum_sq[order[k]] += contribution * contribution;
    }
  }

  ShapleyEstimate est;
  const double t = static_cast<double>(n_permutations);
  est.phi.resize(d);
  est.standard_error.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    est.phi[j] = sum[j] / t;
    if (n_permutations > 1) {
      const double var = std::max(0.0, (sum_sq[j] - t * est.phi[j] * est.phi[j]) / (t - 1.0));
      est.standard_error[j] = std::sqrt(var / t);
    }
  }
  est.base_value = MeanOf(model.PredictProba(background));
  const double fx = model.PredictOne(x);
  est.efficiency_residual = std::abs(std::accumulate(est.phi.begin(), est.phi.end(), 0.0) -
                                     (fx - est.base_value));
  return est;
}

ShapleyEstimate ShapleyExact(const Predictor& model, std::span<const double> x,
                             const Matrix& background) {
  const std::size_t d = x.size();
  const auto v = kernels::parallel::CoalitionValues(model, x, background);
  // weight(s) = s! (d - s - 1)! / d! = 1 / (d * C(d - 1, s)).
  std::vector<double> weight(d);
  double binom = 1.0;
  for (std::size_t s = 0; s < d; ++s) {
    weight[s] = 1.0 / (static_cast<double>(d) * binom);
    binom = binom * static_cast<double>(d - 1 - s) / static_cast<double>(s + 1);
  }
  ShapleyEstimate est;
  est.phi.assign(d, 0.0);
  est.standard_error.assign(d, 0.0);
  const std::size_t n_masks = std::size_t{1} << d;
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
      est.phi[i] += weight[size] * (v[mask | bit] - v[mask]);
    }
  }
  est.base_value = v[0];
  est.efficiency_residual =
      std::abs(std::accumulate(est.phi.begin(), est.phi.end(), 0.0) - (v[n_masks - 1] - v[0]));
  return est;
}

// --------------------------------------------------------------- anchor ---

AnchorCondition MakeAnchorCondition(const Dataset& data, std::size_t feature, double value) {
  Require(feature < data.width(), "MakeAnchorCondition: feature out of range");
  AnchorCondition c;
  c.feature = feature;
  if (data.schema.is_categorical(feature)) {
    c.categorical = true;
    c.value = value;
    return c;
  }
  auto col = data.x.column(feature);
  std::sort(col.begin(), col.end());
  // Decile edges (linear interpolation between order statistics).
  std::vector<double> edges;
  for (int q = 1; q <= 9; ++q) {
    const double pos = 0.1 * q * static_cast<double>(col.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, col.size() - 1);
    edges.push_back(col[lo] + (pos - static_cast<double>(lo)) * (col[hi] - col[lo]));
  }
  c.lower = -std::numeric_limits<double>::infinity();
  c.upper = std::numeric_limits<double>::infinity();
  for (double e : edges) {
    if (e < value) {
      c.lower = e;
    } else {
      c.upper = e;
      break;
    }
  }
  return c;
}

std::vector<double> AnchorImportance(const AnchorRule& rule, const Dataset& data) {
  const double n = static_cast<double>(data.size());
  Require(n > 0, "AnchorImportance: empty dataset");
  std::vector<double> importance(data.width(), 0.0);
  for (const auto& c : rule.conditions) {
    std::size_t in_range = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
      in_range += static_cast<std::size_t>(c.Satisfied(data.x(r, c.feature)));
    }
    importance[c.feature] = 1.0 - static_cast<double>(in_range) / n;
  }
  return importance;
}

AnchorOutput AnchorExplain(const Predictor& model, std::span<const double> x,
                           const Dataset& data, const AnchorParams& params) {
  Require(data.size() > 0, "AnchorExplain: empty dataset");
  Require(x.size() == data.width(), "AnchorExplain: width mismatch");
  Require(params.epsilon > 0.0 && params.epsilon < 1.0, "AnchorExplain: epsilon must lie in (0, 1)");
  const std::size_t n = data.size();
  const std::size_t d = data.width();
  const bool target = model.PredictOne(x) >= 0.5;
  const auto probs = model.PredictProba(data.x);
  std::vector<char> agrees(n);
  for (std::size_t r = 0; r < n; ++r) agrees[r] = (probs[r] >= 0.5) == target;

  std::vector<AnchorCondition> candidates(d);
  for (std::size_t j = 0; j < d; ++j) candidates[j] = MakeAnchorCondition(data, j, x[j]);

  std::vector<char> covered(n, 1);
  auto precision_of = [&](const std::vector<char>& mask) {
    std::size_t cov = 0, hit = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (!mask[r]) continue;
      ++cov;
      hit += static_cast<std::size_t>(agrees[r]);
    }
    return cov == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(cov);
  };

  AnchorOutput result;
  AnchorRule& rule = result.rule;
  rule.precision = precision_of(covered);
  std::vector<char> used(d, 0);
  const double goal = 1.0 - params.epsilon;
  while (rule.precision < goal && rule.conditions.size() < d) {
    std::size_t best = d;
    double best_precision = -1.0;
    std::vector<char> trial(n);
    for (std::size_t j = 0; j < d; ++j) {
      if (used[j]) continue;
      for (std::size_t r = 0; r < n; ++r) {
        trial[r] = covered[r] && candidates[j].Satisfied(data.x(r, j));
      }
      const double p = precision_of(trial);
      if (p > best_precision) {
        best_precision = p;
        best = j;
      }
    }
    used[best] = 1;
    for (std::size_t r = 0; r < n; ++r) {
      covered[r] = covered[r] && candidates[best].Satisfied(data.x(r, best));
    }
    rule.conditions.push_back(candidates[best]);
    rule.precision = best_precision;
  }
  rule.reached_precision = rule.precision >= goal;
  for (const auto& c : rule.conditions) {
    std::size_t in_range = 0;
    for (std::size_t r = 0; r < n; ++r) in_range += static_cast<std::size_t>(c.Satisfied(data.x(r, c.feature)));
    rule.coverage_counts.push_back(in_range);
  }

  result.output.explanation = Explanation(data.schema, AnchorImportance(rule, data), "anchor");
  result.output.diagnostics.values["anchor_precision"] = rule.precision;
  result.output.diagnostics.values["anchor_conditions"] = static_cast<double>(rule.conditions.size());
  if (!rule.reached_precision) result.output.diagnostics.flags.push_back("precision_not_reached");
  return result;
}

// ------------------------------------------------------------ builtins ---

namespace {

class FittedLime final : public FittedExplainer {
 public:
  FittedLime(ExplainerFitState fit, LimeParams params)
      : fit_(std::move(fit)), params_(params) {}
  ExplainOutput Explain(const Predictor& model, std::span<const double> x,
                        std::uint64_t seed) const override {
    return LimeExplain(model, x, fit_, params_, DeriveSeed(seed, SeedStream::kLime));
  }

 private:
  ExplainerFitState fit_;
  LimeParams params_;
};

class FittedShap final : public FittedExplainer {
 public:
  FittedShap(ExplainerFitState fit, ShapParams params)
      : fit_(std::move(fit)), params_(params) {}
  ExplainOutput Explain(const Predictor& model, std::span<const double> x,
                        std::uint64_t seed) const override {
    const auto est = ShapleySample(model, x, fit_.background, params_.n_permutations,
                                   DeriveSeed(seed, SeedStream::kShap));
    ExplainOutput out;
    out.explanation = Explanation(fit_.data.schema, est.phi, "shap");
    out.diagnostics.values["efficiency_residual"] = est.efficiency_residual;
    return out;
  }

 private:
  ExplainerFitState fit_;
  ShapParams params_;
};

class FittedAnchor final : public FittedExplainer {
 public:
  FittedAnchor(Dataset data, AnchorParams params) : data_(std::move(data)), params_(params) {}
  ExplainOutput Explain(const Predictor& model, std::span<const double> x,
                        std::uint64_t) const override {
    return AnchorExplain(model, x, data_, params_).output;
  }

 private:
  Dataset data_;
  AnchorParams params_;
};

class LimeExplainer final : public Explainer {
 public:
  explicit LimeExplainer(LimeParams p) : params_(p) {}
  std::string name() const override { return "lime"; }
  std::unique_ptr<FittedExplainer> Fit(const Dataset& data, std::uint64_t seed) const override {
    return std::make_unique<FittedLime>(BuildFitState(data, 0, seed), params_);
  }

 private:
  LimeParams params_;
};

class ShapExplainer final : public Explainer {
 public:
  explicit ShapExplainer(ShapParams p) : params_(p) {}
  std::string name() const override { return "shap"; }
  std::unique_ptr<FittedExplainer> Fit(const Dataset& data, std::uint64_t seed) const override {
    return std::make_unique<FittedShap>(BuildFitState(data, params_.max_background, seed),
                                        params_);
  }

 private:
  ShapParams params_;
};

class AnchorExplainer final : public Explainer {
 public:
  explicit AnchorExplainer(AnchorParams p) : params_(p) {}
  std::string name() const override { return "anchor"; }
  std::unique_ptr<FittedExplainer> Fit(const Dataset& data, std::uint64_t) const override {
    if (data.size() == 0) Fail(ErrorCode::kInvalidArgument, "anchor: empty dataset");
    return std::make_unique<FittedAnchor>(data, params_);
  }

 private:
  AnchorParams params_;
};

}  // namespace

std::unique_ptr<Explainer> MakeLimeExplainer(LimeParams params) {
  return std::make_unique<LimeExplainer>(params);
}
std::unique_ptr<Explainer> MakeShapExplainer(ShapParams params) {
  return std::make_unique<ShapExplainer>(params);
}
std::unique_ptr<Explainer> MakeAnchorExplainer(AnchorParams params) {
  return std::make_unique<AnchorExplainer>(params);
}

}  // namespace rankfuse
