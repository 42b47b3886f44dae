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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.h"
#include "rankfuse/error.h"
#include "rankfuse/ingest.h"
#include "rankfuse/json_io.h"
#include "test_util.h"

namespace rankfuse {
namespace {

PipelineConfig FastConfig(std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.seed = seed;
  cfg.forest.n_trees = 20;
  cfg.forest.max_depth = 5;
  cfg.autoencoder.epochs = 60;
  cfg.lime.n_samples = 300;
  cfg.shap.n_permutations = 16;
  cfg.shap.max_background = 30;
  return cfg;
}

Dataset Linear5() {
  PreprocessOptions opt;
  opt.label_column = "y";
  opt.positive_label = "1";
  opt.standardize = false;
  return Preprocess(LoadCsv(testing::SourceDir() + "/tests/fixtures/linear5.csv"), opt);
}

// Explainer returning the same fixed scores whatever it is fit to.
class FixedExplainer final : public Explainer {
 public:
  FixedExplainer(std::string name, std::vector<double> scores)
      : name_(std::move(name)), scores_(std::move(scores)) {}
  std::string name() const override { return name_; }
  std::unique_ptr<FittedExplainer> Fit(const Dataset& data, std::uint64_t) const override {
    return std::make_unique<Fitted>(data.schema, name_, scores_);
  }

 private:
  class Fitted final : public FittedExplainer {
   public:
    Fitted(FeatureSchema s, std::string n, std::vector<double> v)
        : schema_(std::move(s)), name_(std::move(n)), scores_(std::move(v)) {}
    ExplainOutput Explain(const Predictor&, std::span<const double>, std::uint64_t) const override {
      return {Explanation(schema_, scores_, name_), {}};
    }

   private:
    FeatureSchema schema_;
    std::string name_;
    std::vector<double> scores_;
  };
  std::string name_;
  std::vector<double> scores_;
};

class ThrowingExplainer final : public Explainer {
 public:
  std::string name() const override { return "broken"; }
  std::unique_ptr<FittedExplainer> Fit(const Dataset&, std::uint64_t) const override {
    Fail(ErrorCode::kComputation, "broken explainer");
  }
};

TEST(PipelineTest, SingleExplainerIsDictator) {
  const auto prep = PrepareData(FastConfig(1), Linear5());
  for (const char* name : {"lime", "shap", "anchor"}) {
    auto cfg = FastConfig(1);
    cfg.explainers = {name};
    const auto r = ExplainInstance(cfg, prep.model, prep.train, prep.test.x.row(0));
    ASSERT_TRUE(r.ok()) << r.error;
    EXPECT_EQ(r.aggregate->ranks(), r.components[0].ranking.ranks()) << name;
    EXPECT_EQ(r.weights, std::vector<double>{1.0});
  }
}

TEST(PipelineTest, IdenticalExplainersGetEqualWeights) {
  const auto prep = PrepareData(FastConfig(2), Linear5());
  auto cfg = FastConfig(2);
  cfg.explainers = {"a", "b", "c"};
  const std::vector<double> s{0.1, -0.5, 0.3, 0.05, 0.2};
  const ExplainerFactory factory = [&s](const std::string& name) {
    return std::make_unique<FixedExplainer>(name, s);
  };
  for (auto method : {mcdm::Method::kTopsis, mcdm::Method::kEdas}) {
    for (auto agg : {rankagg::Method::kWsum, rankagg::Method::kBorda, rankagg::Method::kCondorcet}) {
      cfg.mcdm = method;
      cfg.aggregator = agg;
      const auto r = ExplainInstance(cfg, prep.model, prep.train, prep.test.x.row(1), factory);
      ASSERT_TRUE(r.ok()) << r.error;
      for (double w : r.weights) EXPECT_NEAR(w, 1.0 / 3.0, 1e-9);
      EXPECT_EQ(r.aggregate->ranks(), (std::vector<int>{4, 1, 2, 5, 3}));
    }
  }
}

TEST(PipelineTest, StageFailureIsReported) {
  const auto prep = PrepareData(FastConfig(3), Linear5());
  auto cfg = FastConfig(3);
  cfg.explainers = {"broken"};
  const ExplainerFactory factory = [](const std::string&) {
    return std::make_unique<ThrowingExplainer>();
  };
  EXPECT_THROW(PipelineContext(cfg, prep.model, prep.train, factory), Error);
  cfg.explainers = {"lime"};
  PipelineContext ctx(cfg, prep.model, prep.train);
  const std::vector<double> short_row{1.0, 2.0};
  const auto r = ctx.ExplainInstance(short_row, 5);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.failed_stage, "validate");
  EXPECT_TRUE(r.components.empty());
}

// Recompute every stage of a report from its own recorded inputs.
void AuditReport(const AggregationReport& r, const Predictor& model,
                 const std::vector<double>& baseline, const PipelineConfig& cfg) {
  ASSERT_TRUE(r.ok()) << r.error;
  const std::size_t m = r.components.size();
  oracle::Mat metrics;
  std::vector<double> delta(r.instance.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    auto z = r.instance;
    z[i] = baseline[i];
    delta[i] = std::abs(model.PredictOne(r.instance) - model.PredictOne(z));
  }
  for (const auto& c : r.components) {
    const auto ranks = oracle::CompetitionRanks(c.explanation.scores());
    ASSERT_EQ(c.ranking.ranks(), ranks);
    ASSERT_NEAR(c.metrics.nrc, static_cast<double>(oracle::Nrc(ranks, cfg.nrc.alpha)), 1e-10);
    ASSERT_NEAR(c.metrics.stability,
                oracle::Spearman(c.explanation.scores(), c.noisy_explanation.scores()), 1e-12);
    std::vector<double> inv;
    for (int rk : ranks) inv.push_back(1.0 / rk);
    ASSERT_NEAR(c.metrics.faithfulness, oracle::Pearson(inv, delta), 1e-12);
    metrics.push_back({c.metrics.nrc, c.metrics.stability, c.metrics.faithfulness});
  }
  const auto scores = oracle::Topsis(metrics, {false, true, true}, cfg.criterion_weights);
  double total = 0;
  for (double s : scores) total += s;
  for (std::size_t i = 0; i < m; ++i) {
    ASSERT_NEAR(r.mcdm_scores[i], scores[i], 1e-9);
    ASSERT_NEAR(r.weights[i], scores[i] / total, 1e-9);
  }
  // WSUM over min-max-normalised squared inverse ranks.
  const std::size_t d = r.instance.size();
  std::vector<double> agg(d, 0.0);
  for (std::size_t e = 0; e < m; ++e) {
    std::vector<double> sq;
    for (int rk : r.components[e].ranking.ranks()) sq.push_back(1.0 / (double(rk) * rk));
    const double lo = *std::min_element(sq.begin(), sq.end());
    const double hi = *std::max_element(sq.begin(), sq.end());
    for (std::size_t j = 0; j < d; ++j) agg[j] += r.weights[e] * (hi > lo ? (sq[j] - lo) / (hi - lo) : 0.0);
  }
  ASSERT_EQ(r.aggregate->ranks(), oracle::CompetitionRanks(agg));
  std::vector<double> inv;
  for (int rk : r.aggregate->ranks()) inv.push_back(1.0 / rk);
  ASSERT_NEAR(r.aggregate_metrics.faithfulness, oracle::Pearson(inv, delta), 1e-12);
  double wsum = 0;
  for (double w : r.weights) wsum += w;
  ASSERT_NEAR(wsum, 1.0, 1e-12);
}

TEST(PipelineTest, GoldenReportOnLinearFixture) {
  const auto cfg = FastConfig(42);
  const auto prep = PrepareData(cfg, Linear5());
  PipelineContext ctx(cfg, prep.model, prep.train);
  const auto report = ctx.ExplainInstance(prep.test.x.row(0), 0);
  AuditReport(report, prep.model, ctx.baseline(), cfg);

  const std::string text = io::Dump(io::ToJson(report));
  const auto golden = testing::SourceDir() + "/tests/golden/linear5_explain.json";
  if (std::getenv("RANKFUSE_UPDATE_GOLDEN")) io::WriteTextFile(golden, text);
  std::ifstream in(golden);
  ASSERT_TRUE(in) << "missing golden file " << golden;
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(text, buf.str());
}

TEST(PipelineTest, ExperimentShapesAndRanks) {
  const auto cfg = FastConfig(7);
  const auto report = RunExperiment(cfg, Linear5(), 4);
  ASSERT_TRUE(report.failures.empty());
  ASSERT_EQ(report.methods, (std::vector<std::string>{"aggregate", "lime", "shap", "anchor"}));
  ASSERT_EQ(report.instances.size(), 4u);
  for (std::size_t metric = 0; metric < 3; ++metric) {
    double sum = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double a = report.average_ranks[j][metric];
      EXPECT_GE(a, 1.0);
      EXPECT_LE(a, 4.0);
      sum += a;
    }
    EXPECT_NEAR(sum, 10.0, 1e-12);
  }
  for (const auto& inst : report.instances) {
    double wsum = 0;
    for (double w : inst.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-12);
  }
  EXPECT_GT(report.test_accuracy, 0.6);
}

TEST(PipelineTest, SingleInstanceAverageIsItsRanks) {
  const auto cfg = FastConfig(8);
  const auto report = RunExperiment(cfg, Linear5(), 1);
  const auto& inst = report.instances[0];
  std::vector<double> nrc{inst.aggregate_metrics.nrc};
  for (const auto& c : inst.components) nrc.push_back(c.metrics.nrc);
  const auto ranks = RankMethods(nrc, 0);
  for (std::size_t j = 0; j < ranks.size(); ++j) EXPECT_EQ(report.average_ranks[j][0], ranks[j]);
}

TEST(PipelineTest, IdenticalMethodsTie) {
  const auto prep = PrepareData(FastConfig(9), Linear5());
  auto cfg = FastConfig(9);
  cfg.explainers = {"anchor", "anchor"};  // seed-free, so the two entries agree
  const auto report = RunExperiment(cfg, prep.model, prep.train, prep.test, 3);
  for (std::size_t metric = 0; metric < 3; ++metric) {
    EXPECT_EQ(report.average_ranks[1][metric], report.average_ranks[2][metric]);
  }
}

TEST(PipelineTest, DeterministicAcrossJobs) {
  auto cfg = FastConfig(10);
  const auto a = io::Dump(io::ToJson(RunExperiment(cfg, Linear5(), 3)));
  cfg.jobs = 3;
  const auto b = io::Dump(io::ToJson(RunExperiment(cfg, Linear5(), 3)));
  EXPECT_EQ(a, b);
}

TEST(PipelineTest, RankMethodsDirections) {
  EXPECT_EQ(RankMethods(std::vector<double>{3.0, 1.0, 2.0}, 0), (std::vector<double>{3, 1, 2}));
  EXPECT_EQ(RankMethods(std::vector<double>{0.9, 0.1, 0.9}, 1), (std::vector<double>{1.5, 3, 1.5}));
  EXPECT_THROW(RankMethods(std::vector<double>{1.0}, 3), Error);
}

TEST(PipelineTest, Rq1Shape) {
  const auto cfg = FastConfig(11);
  const auto r = RunRq1(cfg, Linear5(), 6);
  EXPECT_EQ(r.n_explanations, 18u);
  EXPECT_EQ(r.pairs.size(), 18u);
  for (double v : {r.complexity, r.faithfulness, r.sensitivity_stability}) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  std::vector<double> nrc;
  for (const auto& p : r.pairs) nrc.push_back(p.nrc);
  EXPECT_NEAR(oracle::Spearman(nrc, nrc), 1.0, 1e-12);
  EXPECT_NE(RenderRq1Table(r).find("Complexity"), std::string::npos);
}

TEST(PipelineTest, ConfigValidation) {
  PipelineConfig cfg;
  cfg.explainers.clear();
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = PipelineConfig{};
  cfg.criterion_weights = {0.5, 0.5, 0.5};
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = PipelineConfig{};
  cfg.explainers = {"grad-cam"};
  const auto data = Linear5();
  EXPECT_THROW(RunExperiment(cfg, data, 2), Error);
  cfg = FastConfig(1);
  EXPECT_THROW(RunExperiment(cfg, data, 100000), Error);
}

}  // namespace
}  // namespace rankfuse
