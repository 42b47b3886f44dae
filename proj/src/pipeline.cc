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

#include "rankfuse/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "rankfuse/error.h"
#include "rankfuse/ingest.h"
#include "rankfuse/kernels.h"
#include "rankfuse/random.h"
#include "rankfuse/stats.h"

namespace rankfuse {

void PipelineConfig::Validate() const {
  if (explainers.empty()) Fail(ErrorCode::kConfig, "pipeline: no explainers configured");
  if (directions.size() != 3 || criterion_weights.size() != 3) {
    Fail(ErrorCode::kConfig, "pipeline: need exactly three criterion directions and weights");
  }
  try {
    Weights w(criterion_weights);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, std::string("pipeline: criterion weights: ") + e.what());
  }
  if (train_ratio <= 0.0 || train_ratio >= 1.0) Fail(ErrorCode::kConfig, "pipeline: train_ratio must lie in (0, 1)");
  if (jobs < 1) Fail(ErrorCode::kConfig, "pipeline: jobs must be >= 1");
  if (nrc.alpha < 0.0) Fail(ErrorCode::kConfig, "pipeline: nrc alpha must be >= 0");
}

ExplainerFactory BuiltinExplainerFactory(const PipelineConfig& config) {
  return [config](const std::string& name) -> std::unique_ptr<Explainer> {
    if (name == "lime") return MakeLimeExplainer(config.lime);
    if (name == "shap") return MakeShapExplainer(config.shap);
    if (name == "anchor") return MakeAnchorExplainer(config.anchor);
    Fail(ErrorCode::kConfig, "unknown explainer '" + name + "'");
  };
}

std::vector<double> ComputeBaseline(const Dataset& train, BaselineMode mode) {
  const std::size_t d = train.width();
  std::vector<double> baseline(d, 0.0);
  if (mode == BaselineMode::kZero) return baseline;
  Require(train.size() > 0, "ComputeBaseline: empty training data");
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = train.x.column(j);
    if (train.schema.is_categorical(j)) {
      std::map<double, std::size_t> counts;
      for (double v : col) ++counts[v];
      std::size_t best = 0;
      for (const auto& [v, c] : counts) {
        if (c > best) {
          best = c;
          baseline[j] = v;
        }
      }
    } else {
      baseline[j] = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    }
  }
  return baseline;
}

PipelineContext::PipelineContext(const PipelineConfig& config, const Predictor& model,
                                 const Dataset& train, const ExplainerFactory& factory)
    : config_(config), model_(model), train_(train) {
  config_.Validate();
  Require(model.schema() == train.schema, "PipelineContext: model schema does not match data");
  AutoencoderConfig ae = config_.autoencoder;
  ae.seed = DeriveSeed(config_.seed, SeedStream::kAutoencoder);
  autoencoder_ = TrainAutoencoder(train_, ae);
  NoiseConfig noise = config_.noise;
  noise.seed = DeriveSeed(config_.seed, SeedStream::kNoise);
  noisy_ = PerturbDataset(train_, autoencoder_, noise);
  baseline_ = ComputeBaseline(train_, config_.baseline);

  const ExplainerFactory make = factory ? factory : BuiltinExplainerFactory(config_);
  const std::uint64_t fit_seed = DeriveSeed(config_.seed, SeedStream::kShap);
  for (const auto& name : config_.explainers) {
    auto explainer = make(name);
    names_.push_back(explainer->name());
    // Same seed for both fits: differences come from the data alone.
    original_.push_back(explainer->Fit(train_, fit_seed));
    noisy_fit_.push_back(explainer->Fit(noisy_, fit_seed));
  }
}

std::uint64_t PipelineContext::InstanceSeed(std::size_t instance_id) const {
  return DeriveSeed(DeriveSeed(config_.seed, SeedStream::kExplainInstance), instance_id);
}

PipelineContext::ComponentPair PipelineContext::ExplainComponent(
    std::size_t explainer, std::span<const double> x, std::size_t instance_id) const {
  const std::uint64_t seed = DeriveSeed(InstanceSeed(instance_id), explainer);
  ComponentPair pair{original_[explainer]->Explain(model_, x, seed),
                     noisy_fit_[explainer]->Explain(model_, x, seed)};
  return pair;
}

AggregationReport PipelineContext::ExplainInstance(std::span<const double> x,
                                                   std::size_t instance_id) const {
  AggregationReport report;
  report.instance_id = instance_id;
  report.instance.assign(x.begin(), x.end());
  report.mcdm_method = mcdm::MethodName(config_.mcdm);
  report.aggregator = rankagg::MethodName(config_.aggregator);
  std::string stage = "validate";
  try {
    Require(x.size() == train_.width(), "instance width does not match the schema");
    report.prediction = model_.PredictOne(x);

    stage = "explain";
    for (std::size_t e = 0; e < names_.size(); ++e) {
      auto pair = ExplainComponent(e, x, instance_id);
      ComponentRecord rec;
      rec.source = names_[e];
      rec.explanation = std::move(pair.original.explanation);
      rec.noisy_explanation = std::move(pair.noisy.explanation);
      rec.diagnostics = std::move(pair.original.diagnostics);
      rec.diagnostics.Merge(pair.noisy.diagnostics, "noisy_");
      report.components.push_back(std::move(rec));
    }

    stage = "evaluate";
    for (auto& rec : report.components) {
      rec.ranking = RankFeatures(rec.explanation);
      rec.metrics.nrc = Nrc(rec.ranking, config_.nrc);
      rec.metrics.stability = RankStability(rec.explanation, rec.noisy_explanation);
      rec.metrics.faithfulness = RankFaithfulness(model_, rec.ranking, x, baseline_);
    }

    stage = "mcdm";
    const std::size_t m = report.components.size();
    Weights weights;
    if (m == 1) {
      report.mcdm_scores = {1.0};
      report.mcdm_notes.push_back("single component; weight 1");
      weights = Weights({1.0});
    } else {
      mcdm::DecisionMatrix dm;
      dm.values = Matrix(m, 3);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& mv = report.components[i].metrics;
        dm.values(i, 0) = mv.nrc;
        dm.values(i, 1) = mv.stability;
        dm.values(i, 2) = mv.faithfulness;
      }
      dm.directions = config_.directions;
      dm.criterion_weights = Weights(config_.criterion_weights);
      auto result = mcdm::Score(config_.mcdm, dm);
      weights = mcdm::ScoresToWeights(result);
      report.mcdm_scores = std::move(result.scores);
      report.mcdm_notes = std::move(result.notes);
    }
    report.weights = weights.values();

    stage = "aggregate";
    rankagg::AggregationInput original{{}, weights};
    rankagg::AggregationInput noisy{{}, weights};
    for (const auto& rec : report.components) {
      original.rankings.push_back(rec.ranking);
      noisy.rankings.push_back(RankFeatures(rec.noisy_explanation));
    }
    report.aggregate = rankagg::Aggregate(config_.aggregator, original);
    report.aggregate_noisy = rankagg::Aggregate(config_.aggregator, noisy);

    stage = "validate_aggregate";
    // Same metric code paths as the components; rank vectors stand in for
    // scores (negated so that larger means more important).
    auto as_scores = [](const Ranking& r) {
      std::vector<double> s(r.size());
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = -static_cast<double>(r[i]);
      return Explanation(r.schema(), std::move(s), "aggregate");
    };
    report.aggregate_metrics.nrc = Nrc(*report.aggregate, config_.nrc);
    report.aggregate_metrics.stability =
        RankStability(as_scores(*report.aggregate), as_scores(*report.aggregate_noisy));
    report.aggregate_metrics.faithfulness =
        RankFaithfulness(model_, *report.aggregate, x, baseline_);
  } catch (const std::exception& e) {
    report.failed_stage = stage;
    report.error = e.what();
  }
  return report;
}

AggregationReport ExplainInstance(const PipelineConfig& config, const Predictor& model,
                                  const Dataset& train, std::span<const double> x,
                                  const ExplainerFactory& factory, std::size_t instance_id) {
  std::optional<PipelineContext> ctx;
  try {
    ctx.emplace(config, model, train, factory);
  } catch (const std::exception& e) {
    // Setup failures (autoencoder, perturbation, explainer fits) are reported
    // like any other stage so a remote error keeps its raw line.
    AggregationReport report;
    report.instance_id = instance_id;
    report.instance.assign(x.begin(), x.end());
    report.mcdm_method = mcdm::MethodName(config.mcdm);
    report.aggregator = rankagg::MethodName(config.aggregator);
    report.failed_stage = "fit";
    report.error = e.what();
    return report;
  }
  return ctx->ExplainInstance(x, instance_id);
}

PreparedData PrepareData(const PipelineConfig& config, const Dataset& data) {
  config.Validate();
  auto split = Split(data, config.train_ratio, DeriveSeed(config.seed, SeedStream::kSplit),
                     /*stratified=*/true);
  StandardizeFromTraining(split.train, {&split.test});
  PreparedData out;
  ForestConfig forest = config.forest;
  forest.seed = DeriveSeed(config.seed, SeedStream::kForest);
  out.model = TrainForest(split.train.schema, split.train.x, split.train.labels, forest);
  out.test_accuracy = split.test.labels.empty() ? 0.0
                                                : Accuracy(out.model, split.test.x, split.test.labels);
  const double pos = std::accumulate(split.test.labels.begin(), split.test.labels.end(), 0.0);
  const double n = static_cast<double>(split.test.labels.size());
  out.majority_rate = n > 0 ? std::max(pos, n - pos) / n : 0.0;
  out.train = std::move(split.train);
  out.test = std::move(split.test);
  return out;
}

std::vector<double> RankMethods(std::span<const double> values, std::size_t metric) {
  Require(metric < 3, "RankMethods: metric index out of range");
  if (metric == 0) return stats::AverageRanks(values);
  std::vector<double> negated(values.begin(), values.end());
  for (double& v : negated) v = -v;
  return stats::AverageRanks(negated);
}

namespace {

std::vector<std::size_t> SampleInstances(const Dataset& test, std::size_t n, std::uint64_t seed) {
  if (n == 0 || n > test.size()) {
    Fail(ErrorCode::kConfig, "requested " + std::to_string(n) + " instances but the test split has " +
                                 std::to_string(test.size()) + " rows");
  }
  std::vector<std::size_t> rows(test.size());
  std::iota(rows.begin(), rows.end(), 0);
  Rng rng(DeriveSeed(seed, SeedStream::kInstances));
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(n);
  return rows;
}

std::vector<double> MetricRow(const AggregationReport& r, std::size_t metric) {
  auto pick = [metric](const MetricVector& mv) {
    return metric == 0 ? mv.nrc : metric == 1 ? mv.stability : mv.faithfulness;
  };
  std::vector<double> row{pick(r.aggregate_metrics)};
  for (const auto& c : r.components) row.push_back(pick(c.metrics));
  return row;
}

}  // namespace

ExperimentReport SummarizeExperiment(std::vector<std::string> methods,
                                     std::vector<AggregationReport> instances) {
  ExperimentReport report;
  report.methods = std::move(methods);
  report.instances = std::move(instances);
  const std::size_t k = report.methods.size();
  std::vector<const AggregationReport*> ok;
  for (const auto& r : report.instances) {
    if (r.ok()) {
      ok.push_back(&r);
    } else {
      report.failures.push_back("instance " + std::to_string(r.instance_id) + ": stage " +
                                r.failed_stage + ": " + r.error);
    }
  }
  report.average_ranks.assign(k, std::vector<double>(3, 0.0));
  report.significance_counts.assign(k, std::vector<int>(3, 0));
  report.friedman_p.assign(3, 1.0);
  if (ok.empty()) return report;
  for (std::size_t metric = 0; metric < 3; ++metric) {
    Matrix ranks(ok.size(), k);
    for (std::size_t b = 0; b < ok.size(); ++b) {
      const auto r = RankMethods(MetricRow(*ok[b], metric), metric);
      Require(r.size() == k, "SummarizeExperiment: roster size mismatch");
      for (std::size_t j = 0; j < k; ++j) {
        ranks(b, j) = r[j];
        report.average_ranks[j][metric] += r[j] / static_cast<double>(ok.size());
      }
    }
    if (ok.size() >= 2 && k >= 2) {
      const auto fr = stats::FriedmanTest(ranks);
      report.friedman_p[metric] = fr.p_value;
      const auto counts = stats::CountSignificantlyWorseAll(ranks);
      for (std::size_t j = 0; j < k; ++j) report.significance_counts[j][metric] = counts[j];
    }
  }
  return report;
}

ExperimentReport RunExperiment(const PipelineConfig& config, const Predictor& model,
                               const Dataset& train, const Dataset& test,
                               std::size_t n_instances, const ExplainerFactory& factory) {
  kernels::SetNumThreads(config.jobs);
  const PipelineContext ctx(config, model, train, factory);
  const auto rows = SampleInstances(test, n_instances, config.seed);

  std::vector<AggregationReport> reports(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for num_threads(config.jobs) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::size_t row = rows[static_cast<std::size_t>(i)];
    reports[static_cast<std::size_t>(i)] = ctx.ExplainInstance(test.x.row(row), row);
  }

  std::vector<std::string> methods{"aggregate"};
  for (std::size_t e = 0; e < ctx.explainer_count(); ++e) methods.push_back(ctx.explainer_name(e));
  ExperimentReport report = SummarizeExperiment(std::move(methods), std::move(reports));
  report.instance_rows = rows;
  return report;
}

ExperimentReport RunExperiment(const PipelineConfig& config, const Dataset& data,
                               std::size_t n_instances, const ExplainerFactory& factory) {
  const PreparedData prep = PrepareData(config, data);
  ExperimentReport report =
      RunExperiment(config, prep.model, prep.train, prep.test, n_instances, factory);
  report.test_accuracy = prep.test_accuracy;
  return report;
}

Rq1Report RunRq1(const PipelineConfig& config, const Dataset& data, std::size_t n_samples,
                 const ExplainerFactory& factory) {
  const PreparedData prep = PrepareData(config, data);
  return RunRq1(config, prep.model, prep.train, prep.test, n_samples, factory);
}

Rq1Report RunRq1(const PipelineConfig& config, const Predictor& model, const Dataset& train,
                 const Dataset& test, std::size_t n_samples, const ExplainerFactory& factory) {
  kernels::SetNumThreads(config.jobs);
  const PipelineContext ctx(config, model, train, factory);
  const auto rows = SampleInstances(test, n_samples, config.seed);
  const std::size_t m = ctx.explainer_count();

  std::vector<Rq1Report::Pair> pairs(rows.size() * m);
  std::vector<std::exception_ptr> errors(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for num_threads(config.jobs) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) try {
    const std::size_t row = rows[static_cast<std::size_t>(i)];
    const auto x = test.x.row(row);
    for (std::size_t e = 0; e < m; ++e) {
      const auto comp = ctx.ExplainComponent(e, x, row);
      const Explanation& orig = comp.original.explanation;
      const Explanation& noisy = comp.noisy.explanation;
      auto& p = pairs[static_cast<std::size_t>(i) * m + e];
      p.source = ctx.explainer_name(e);
      p.instance = row;
      const Ranking ranking = RankFeatures(orig);
      p.nrc = Nrc(ranking, config.nrc);
      const bool any_nonzero =
          std::any_of(orig.scores().begin(), orig.scores().end(), [](double s) { return s != 0.0; });
      p.complexity_defined = any_nonzero;
      p.traditional_complexity = any_nonzero ? TraditionalComplexity(orig) : 0.0;
      p.rank_faithfulness = RankFaithfulness(ctx.model(), ranking, x, ctx.baseline());
      p.traditional_faithfulness = TraditionalFaithfulness(ctx.model(), orig, x, ctx.baseline());
      p.stability = RankStability(orig, noisy);
      p.sensitivity = TraditionalSensitivity(orig, noisy);
    }
  } catch (...) {
    errors[static_cast<std::size_t>(i)] = std::current_exception();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Rq1Report report;
  report.pairs = std::move(pairs);
  report.n_explanations = report.pairs.size();
  std::vector<double> tc, nrc, tf, rf, sens, stab;
  for (const auto& p : report.pairs) {
    if (p.complexity_defined) {
      tc.push_back(p.traditional_complexity);
      nrc.push_back(p.nrc);
    } else {
      ++report.skipped_all_zero;
    }
    tf.push_back(p.traditional_faithfulness);
    rf.push_back(p.rank_faithfulness);
    sens.push_back(p.sensitivity);
    stab.push_back(p.stability);
  }
  if (tc.size() >= 2) report.complexity = stats::Spearman(tc, nrc);
  if (tf.size() >= 2) {
    report.faithfulness = stats::Spearman(tf, rf);
    report.sensitivity_stability = stats::Spearman(sens, stab);
  }
  return report;
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string DisplayName(const std::string& method) {
  if (method == "aggregate") return "Aggregate Explainer";
  std::string upper = method;
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return upper;
}

}  // namespace

std::string RenderExperimentTable(const ExperimentReport& report) {
  std::ostringstream out;
  out << "| Methods | NRC | stability | faithfulness |\n";
  out << "|---|---|---|---|\n";
  for (std::size_t j = 0; j < report.methods.size(); ++j) {
    out << "| " << DisplayName(report.methods[j]);
    for (std::size_t metric = 0; metric < 3; ++metric) {
      out << " | " << Fixed(report.average_ranks[j][metric], 1) << " ("
          << report.significance_counts[j][metric] << ")";
    }
    out << " |\n";
  }
  return out.str();
}

std::string RenderRq1Table(const Rq1Report& report) {
  std::ostringstream out;
  out << "| Complexity | Faithfulness | Sensitivity/Stability |\n";
  out << "|---|---|---|\n";
  out << "| " << Fixed(report.complexity, 2) << " | " << Fixed(report.faithfulness, 2) << " | "
      << Fixed(report.sensitivity_stability, 2) << " |\n";
  return out.str();
}

}  // namespace rankfuse
