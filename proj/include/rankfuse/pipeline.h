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

#ifndef RANKFUSE_PIPELINE_H_
#define RANKFUSE_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/core.h"
#include "rankfuse/dataset.h"
#include "rankfuse/explainers.h"
#include "rankfuse/forest.h"
#include "rankfuse/mcdm.h"
#include "rankfuse/metrics.h"
#include "rankfuse/perturb.h"
#include "rankfuse/predictor.h"
#include "rankfuse/rankagg.h"

namespace rankfuse {

enum class BaselineMode {
  kMeanMode,  // training mean (numeric) / mode (categorical)
  kZero,
};

struct PipelineConfig {
  std::vector<std::string> explainers = {"lime", "shap", "anchor"};
  LimeParams lime;
  ShapParams shap;
  AnchorParams anchor;
  NrcConfig nrc;
  BaselineMode baseline = BaselineMode::kMeanMode;
  NoiseConfig noise;
  AutoencoderConfig autoencoder;
  ForestConfig forest;
  double train_ratio = 0.8;
  mcdm::Method mcdm = mcdm::Method::kTopsis;
  rankagg::Method aggregator = rankagg::Method::kWsum;
  // Criteria order: nrc, stability, faithfulness.
  std::vector<mcdm::Direction> directions = {
      mcdm::Direction::kCost, mcdm::Direction::kBenefit, mcdm::Direction::kBenefit};
  std::vector<double> criterion_weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::uint64_t seed = 0;
  int jobs = 1;

  void Validate() const;
};

inline constexpr const char* kMetricNames[3] = {"nrc", "stability", "faithfulness"};

struct ComponentRecord {
  std::string source;
  Explanation explanation;        // explainer fit to the training data
  Explanation noisy_explanation;  // explainer fit to the perturbed data
  Ranking ranking;
  MetricVector metrics;
  Diagnostics diagnostics;
};

struct AggregationReport {
  std::size_t instance_id = 0;
  std::vector<double> instance;
  double prediction = 0.0;
  std::vector<ComponentRecord> components;
  std::string mcdm_method;
  std::vector<double> mcdm_scores;
  std::vector<std::string> mcdm_notes;
  std::vector<double> weights;
  std::string aggregator;
  std::optional<Ranking> aggregate;
  std::optional<Ranking> aggregate_noisy;
  MetricVector aggregate_metrics;
  // Empty on success; otherwise the stage that failed and its message.
  std::string failed_stage;
  std::string error;

  bool ok() const { return failed_stage.empty(); }
};

// Resolves an explainer name to an implementation; built-ins by default.
using ExplainerFactory = std::function<std::unique_ptr<Explainer>(const std::string& name)>;

ExplainerFactory BuiltinExplainerFactory(const PipelineConfig& config);

// Everything explain-instance needs that does not depend on the instance:
// the perturbed training data and every explainer fit twice.
class PipelineContext {
 public:
  PipelineContext(const PipelineConfig& config, const Predictor& model, const Dataset& train,
                  const ExplainerFactory& factory = {});

  AggregationReport ExplainInstance(std::span<const double> x, std::size_t instance_id) const;

  const PipelineConfig& config() const { return config_; }
  const Dataset& noisy_train() const { return noisy_; }
  const std::vector<double>& baseline() const { return baseline_; }
  const AutoencoderModel& autoencoder() const { return autoencoder_; }

  // Component explanations only (no metrics); used by the RQ1 study.
  struct ComponentPair {
    ExplainOutput original;
    ExplainOutput noisy;
  };
  ComponentPair ExplainComponent(std::size_t explainer, std::span<const double> x,
                                 std::size_t instance_id) const;
  std::size_t explainer_count() const { return names_.size(); }
  const std::string& explainer_name(std::size_t i) const { return names_[i]; }
  const Predictor& model() const { return model_; }

 private:
  std::uint64_t InstanceSeed(std::size_t instance_id) const;

  PipelineConfig config_;
  const Predictor& model_;
  Dataset train_;
  Dataset noisy_;
  AutoencoderModel autoencoder_;
  std::vector<double> baseline_;
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<FittedExplainer>> original_;
  std::vector<std::unique_ptr<FittedExplainer>> noisy_fit_;
};

std::vector<double> ComputeBaseline(const Dataset& train, BaselineMode mode);

// Convenience wrapper that builds the context for a single instance. Errors
// while building the context come back as a report failed at stage "fit".
AggregationReport ExplainInstance(const PipelineConfig& config, const Predictor& model,
                                  const Dataset& train, std::span<const double> x,
                                  const ExplainerFactory& factory = {},
                                  std::size_t instance_id = 0);

// Split, standardize on the training part, train the reference forest.
struct PreparedData {
  Dataset train;
  Dataset test;
  ForestModel model;
  double test_accuracy = 0.0;
  double majority_rate = 0.0;
};

PreparedData PrepareData(const PipelineConfig& config, const Dataset& data);

struct ExperimentReport {
  std::vector<std::string> methods;  // "aggregate" first, then explainers
  std::vector<std::size_t> instance_rows;  // rows of the test split
  // methods x 3 (nrc, stability, faithfulness); lower rank = better.
  std::vector<std::vector<double>> average_ranks;
  std::vector<std::vector<int>> significance_counts;
  std::vector<double> friedman_p;
  std::vector<AggregationReport> instances;
  std::vector<std::string> failures;
  double test_accuracy = 0.0;
};

// Per-instance ranks of the method roster for one metric (NRC ascending,
// the others descending, average ties).
std::vector<double> RankMethods(std::span<const double> values, std::size_t metric);

ExperimentReport RunExperiment(const PipelineConfig& config, const Dataset& data,
                               std::size_t n_instances, const ExplainerFactory& factory = {});

// Same, with an already trained model and an already split dataset.
ExperimentReport RunExperiment(const PipelineConfig& config, const Predictor& model,
                               const Dataset& train, const Dataset& test,
                               std::size_t n_instances, const ExplainerFactory& factory = {});

// Builds the experiment summary from already-computed instance reports.
ExperimentReport SummarizeExperiment(std::vector<std::string> methods,
                                     std::vector<AggregationReport> instances);

struct Rq1Report {
  // Spearman(traditional, rank-based) per criterion: complexity,
  // faithfulness, sensitivity-vs-stability.
  double complexity = 0.0;
  double faithfulness = 0.0;
  double sensitivity_stability = 0.0;
  std::size_t n_explanations = 0;
  std::size_t skipped_all_zero = 0;  // complexity undefined for them
  struct Pair {
    std::string source;
    std::size_t instance = 0;
    double traditional_complexity = 0.0, nrc = 0.0;
    double traditional_faithfulness = 0.0, rank_faithfulness = 0.0;
    double sensitivity = 0.0, stability = 0.0;
    bool complexity_defined = true;
  };
  std::vector<Pair> pairs;
};

Rq1Report RunRq1(const PipelineConfig& config, const Dataset& data, std::size_t n_samples,
                 const ExplainerFactory& factory = {});
Rq1Report RunRq1(const PipelineConfig& config, const Predictor& model, const Dataset& train,
                 const Dataset& test, std::size_t n_samples, const ExplainerFactory& factory = {});

std::string RenderExperimentTable(const ExperimentReport& report);
std::string RenderRq1Table(const Rq1Report& report);

}  // namespace rankfuse

#endif  // RANKFUSE_PIPELINE_H_
