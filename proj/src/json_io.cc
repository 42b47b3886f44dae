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

#include "rankfuse/json_io.h"

#include <fstream>
#include <set>
#include <sstream>

#include "rankfuse/error.h"
#include "rankfuse/ingest.h"

namespace rankfuse::io {
namespace {

FeatureSchema SchemaFromJson(const json& j) {
  const auto names = j.at("features").get<std::vector<std::string>>();
  std::vector<FeatureKind> kinds(names.size(), FeatureKind::kNumeric);
  if (j.contains("kinds")) {
    const auto k = j.at("kinds").get<std::vector<std::string>>();
    Require(k.size() == names.size(), "kinds and features differ in length");
    for (std::size_t i = 0; i < k.size(); ++i) kinds[i] = ParseFeatureKind(k[i]);
  }
  return FeatureSchema(names, kinds);
}

json KindsJson(const FeatureSchema& s) {
  json kinds = json::array();
  for (auto k : s.kinds()) kinds.push_back(FeatureKindName(k));
  return kinds;
}

template <typename F>
auto Parse(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kData, std::string(what) + ": " + e.what());
  }
}

}  // namespace

json ToJson(const Explanation& e) {
  return {{"features", e.schema().names()},
          {"kinds", KindsJson(e.schema())},
          {"scores", e.scores()}, {"source", e.source()}};
}

json ToJson(const Ranking& r) {
  return {{"features", r.schema().names()}, {"kinds", KindsJson(r.schema())}, {"ranks", r.ranks()}};
}

json ToJson(const MetricVector& m) {
  return {{"nrc", m.nrc}, {"stability", m.stability}, {"faithfulness", m.faithfulness}};
}

json ToJson(const Diagnostics& d) {
  json values = json::object();
  for (const auto& [k, v] : d.values) values[k] = v;
  return {{"values", values}, {"flags", d.flags}};
}

json ToJson(const AggregationReport& r) {
  json components = json::array();
  for (const auto& c : r.components) {
    json jc = {{"source", c.source},
               {"explanation", ToJson(c.explanation)},
               {"noisy_explanation", ToJson(c.noisy_explanation)},
               {"diagnostics", ToJson(c.diagnostics)}};
    if (c.ranking.size() > 0) {
      jc["ranking"] = ToJson(c.ranking);
      jc["metrics"] = ToJson(c.metrics);
    }
    components.push_back(std::move(jc));
  }
  json j = {{"instance_id", r.instance_id},
            {"instance", r.instance},
            {"prediction", r.prediction},
            {"components", components},
            {"mcdm", {{"method", r.mcdm_method}, {"scores", r.mcdm_scores}, {"notes", r.mcdm_notes}}},
            {"weights", r.weights},
            {"aggregator", r.aggregator},
            {"status", r.ok() ? "ok" : "failed"}};
  if (r.aggregate) {
    j["aggregate"] = {{"ranking", ToJson(*r.aggregate)},
                      {"noisy_ranking", ToJson(*r.aggregate_noisy)},
                      {"metrics", ToJson(r.aggregate_metrics)}};
  }
  if (!r.ok()) j["failure"] = {{"stage", r.failed_stage}, {"error", r.error}};
  return j;
}

json ToJson(const ExperimentReport& r) {
  json rows = json::array();
  for (std::size_t j = 0; j < r.methods.size(); ++j) {
    json per_metric = json::object();
    for (std::size_t m = 0; m < 3; ++m) {
      per_metric[kMetricNames[m]] = {{"average_rank", r.average_ranks[j][m]},
                                     {"significantly_worse", r.significance_counts[j][m]}};
    }
    rows.push_back({{"method", r.methods[j]}, {"metrics", per_metric}});
  }
  json friedman = json::object();
  for (std::size_t m = 0; m < 3; ++m) friedman[kMetricNames[m]] = r.friedman_p[m];
  json instances = json::array();
  for (const auto& inst : r.instances) instances.push_back(ToJson(inst));
  return {{"methods", r.methods},
          {"table", rows},
          {"friedman_p", friedman},
          {"instance_rows", r.instance_rows},
          {"instances", instances},
          {"failures", r.failures},
          {"test_accuracy", r.test_accuracy}};
}

json ToJson(const Rq1Report& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"source", p.source},
                     {"instance", p.instance},
                     {"traditional_complexity", p.traditional_complexity},
                     {"complexity_defined", p.complexity_defined},
                     {"nrc", p.nrc},
                     {"traditional_faithfulness", p.traditional_faithfulness},
                     {"rank_faithfulness", p.rank_faithfulness},
                     {"sensitivity", p.sensitivity},
                     {"stability", p.stability}});
  }
  return {{"spearman",
           {{"complexity", r.complexity},
            {"faithfulness", r.faithfulness},
            {"sensitivity_stability", r.sensitivity_stability}}},
          {"n_explanations", r.n_explanations},
          {"skipped_all_zero", r.skipped_all_zero},
          {"pairs", pairs}};
}

json ToJson(const PipelineConfig& c) {
  json directions = json::array();
  for (auto d : c.directions) directions.push_back(mcdm::DirectionName(d));
  return {
      {"explainers", c.explainers},
      {"lime", {{"n_samples", c.lime.n_samples}, {"kernel_width", c.lime.kernel_width}, {"ridge", c.lime.ridge}}},
      {"shap", {{"n_permutations", c.shap.n_permutations}, {"max_background", c.shap.max_background}}},
      {"anchor", {{"epsilon", c.anchor.epsilon}}},
      {"nrc", {{"alpha", c.nrc.alpha}}},
      {"baseline", c.baseline == BaselineMode::kZero ? "zero" : "mean_mode"},
      {"noise", {{"k_neighbors", c.noise.k_neighbors}, {"m_features", c.noise.m_features}}},
      {"autoencoder",
       {{"latent_dim", c.autoencoder.latent_dim},
        {"epochs", c.autoencoder.epochs},
        {"learning_rate", c.autoencoder.learning_rate}}},
      {"forest",
       {{"n_trees", c.forest.n_trees},
        {"max_depth", c.forest.max_depth},
        {"min_samples_leaf", c.forest.min_samples_leaf},
        {"max_features", c.forest.max_features}}},
      {"train_ratio", c.train_ratio},
      {"mcdm", mcdm::MethodName(c.mcdm)},
      {"aggregator", rankagg::MethodName(c.aggregator)},
      {"directions", directions},
      {"criterion_weights", c.criterion_weights},
      {"seed", c.seed},
      {"jobs", c.jobs}};
}

PipelineConfig ConfigFromJson(const json& j, PipelineConfig c) {
  static const std::set<std::string> kKnown = {
      "explainers", "lime", "shap", "anchor", "nrc", "baseline", "noise", "autoencoder",
      "forest", "train_ratio", "mcdm", "aggregator", "directions", "criterion_weights",
      "seed", "jobs", "dataset"};
  if (!j.is_object()) Fail(ErrorCode::kConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) Fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
  }
  try {
    if (j.contains("explainers")) c.explainers = j["explainers"].get<std::vector<std::string>>();
    if (j.contains("lime")) {
      const auto& l = j["lime"];
      c.lime.n_samples = l.value("n_samples", c.lime.n_samples);
      c.lime.kernel_width = l.value("kernel_width", c.lime.kernel_width);
      c.lime.ridge = l.value("ridge", c.lime.ridge);
    }
    if (j.contains("shap")) {
      const auto& s = j["shap"];
      c.shap.n_permutations = s.value("n_permutations", c.shap.n_permutations);
      c.shap.max_background = s.value("max_background", c.shap.max_background);
    }
    if (j.contains("anchor")) c.anchor.epsilon = j["anchor"].value("epsilon", c.anchor.epsilon);
    if (j.contains("nrc")) c.nrc.alpha = j["nrc"].value("alpha", c.nrc.alpha);
    if (j.contains("baseline")) {
      const auto b = j["baseline"].get<std::string>();
      if (b == "zero") {
        c.baseline = BaselineMode::kZero;
      } else if (b == "mean_mode") {
        c.baseline = BaselineMode::kMeanMode;
      } else {
        Fail(ErrorCode::kConfig, "unknown baseline mode '" + b + "'");
      }
    }
    if (j.contains("noise")) {
      c.noise.k_neighbors = j["noise"].value("k_neighbors", c.noise.k_neighbors);
      c.noise.m_features = j["noise"].value("m_features", c.noise.m_features);
    }
    if (j.contains("autoencoder")) {
      const auto& a = j["autoencoder"];
      c.autoencoder.latent_dim = a.value("latent_dim", c.autoencoder.latent_dim);
      c.autoencoder.epochs = a.value("epochs", c.autoencoder.epochs);
      c.autoencoder.learning_rate = a.value("learning_rate", c.autoencoder.learning_rate);
    }
    if (j.contains("forest")) {
      const auto& f = j["forest"];
      c.forest.n_trees = f.value("n_trees", c.forest.n_trees);
      c.forest.max_depth = f.value("max_depth", c.forest.max_depth);
      c.forest.min_samples_leaf = f.value("min_samples_leaf", c.forest.min_samples_leaf);
      c.forest.max_features = f.value("max_features", c.forest.max_features);
    }
    c.train_ratio = j.value("train_ratio", c.train_ratio);
    if (j.contains("mcdm")) c.mcdm = mcdm::ParseMethod(j["mcdm"].get<std::string>());
    if (j.contains("aggregator")) c.aggregator = rankagg::ParseMethod(j["aggregator"].get<std::string>());
    if (j.contains("directions")) {
      c.directions.clear();
      for (const auto& d : j["directions"]) c.directions.push_back(mcdm::ParseDirection(d.get<std::string>()));
    }
    if (j.contains("criterion_weights")) {
      c.criterion_weights = j["criterion_weights"].get<std::vector<double>>();
    }
    c.seed = j.value("seed", c.seed);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  return c;
}

json ToJson(const ForestModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees()) {
    json feature = json::array(), threshold = json::array(), left = json::array(),
         right = json::array(), value = json::array();
    for (const auto& n : t.nodes()) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left},
                     {"right", right}, {"value", value}});
  }
  const auto& c = m.config();
  return {{"format", "rankfuse.forest"},
          {"version", 1},
          {"features", m.schema().names()},
          {"kinds", KindsJson(m.schema())},
          {"config",
           {{"n_trees", c.n_trees}, {"max_depth", c.max_depth},
            {"min_samples_leaf", c.min_samples_leaf}, {"max_features", c.max_features},
            {"seed", c.seed}}},
          {"trees", trees}};
}

ForestModel ForestFromJson(const json& j) {
  return Parse("forest model", [&] {
    if (j.at("format") != "rankfuse.forest") Fail(ErrorCode::kData, "not a rankfuse forest model");
    ForestConfig c;
    const auto& jc = j.at("config");
    c.n_trees = jc.at("n_trees");
    c.max_depth = jc.at("max_depth");
    c.min_samples_leaf = jc.at("min_samples_leaf");
    c.max_features = jc.at("max_features");
    c.seed = jc.at("seed");
    std::vector<DecisionTree> trees;
    for (const auto& jt : j.at("trees")) {
      const auto feature = jt.at("feature").get<std::vector<int>>();
      const auto threshold = jt.at("threshold").get<std::vector<double>>();
      const auto left = jt.at("left").get<std::vector<int>>();
      const auto right = jt.at("right").get<std::vector<int>>();
      const auto value = jt.at("value").get<std::vector<double>>();
      std::vector<TreeNode> nodes(feature.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
        if (feature[i] >= 0) {
          const auto n = static_cast<int>(nodes.size());
          if (left[i] <= static_cast<int>(i) || right[i] <= static_cast<int>(i) || left[i] >= n || right[i] >= n) {
            Fail(ErrorCode::kData, "forest model: malformed tree");
          }
        }
      }
      if (nodes.empty()) Fail(ErrorCode::kData, "forest model: empty tree");
      trees.emplace_back(std::move(nodes));
    }
    return ForestModel(SchemaFromJson(j), c, std::move(trees));
  });
}

json ToJson(const EncodingManifest& m) {
  json columns = json::array();
  for (const auto& c : m.columns) {
    const char* kind = c.kind == ColumnEncoding::Kind::kNumeric  ? "numeric"
                       : c.kind == ColumnEncoding::Kind::kOneHot ? "onehot"
                                                                 : "label";
    columns.push_back({{"raw_name", c.raw_name}, {"kind", kind}, {"categories", c.categories},
                       {"mean", c.mean}, {"scale", c.scale}, {"standardized", c.standardized}});
  }
  return {{"label_column", m.label_column}, {"positive_label", m.positive_label},
          {"rows_dropped", m.rows_dropped}, {"columns", columns}};
}

EncodingManifest ManifestFromJson(const json& j) {
  return Parse("manifest", [&] {
    EncodingManifest m;
    m.label_column = j.at("label_column");
    m.positive_label = j.at("positive_label");
    m.rows_dropped = j.at("rows_dropped");
    for (const auto& jc : j.at("columns")) {
      ColumnEncoding c;
      c.raw_name = jc.at("raw_name");
      const auto kind = jc.at("kind").get<std::string>();
      c.kind = kind == "numeric"  ? ColumnEncoding::Kind::kNumeric
               : kind == "onehot" ? ColumnEncoding::Kind::kOneHot
                                  : ColumnEncoding::Kind::kLabel;
      c.categories = jc.at("categories").get<std::vector<std::string>>();
      c.mean = jc.at("mean");
      c.scale = jc.at("scale");
      c.standardized = jc.at("standardized");
      m.columns.push_back(std::move(c));
    }
    return m;
  });
}

json ToJson(const Dataset& d) {
  json rows = json::array();
  for (std::size_t r = 0; r < d.size(); ++r) {
    rows.push_back(std::vector<double>(d.x.row(r).begin(), d.x.row(r).end()));
  }
  return {{"features", d.schema.names()}, {"kinds", KindsJson(d.schema)}, {"rows", rows},
          {"labels", d.labels}, {"manifest", ToJson(d.manifest)}};
}

Dataset DatasetFromJson(const json& j) {
  return Parse("dataset", [&] {
    Dataset d;
    d.schema = SchemaFromJson(j);
    for (const auto& row : j.at("rows")) d.x.AppendRow(row.get<std::vector<double>>());
    if (d.x.cols() == 0) d.x = Matrix(0, d.schema.size());
    Require(d.x.cols() == d.schema.size(), "dataset: row width does not match features");
    d.labels = j.value("labels", std::vector<int>{});
    if (j.contains("manifest")) d.manifest = ManifestFromJson(j["manifest"]);
    return d;
  });
}

json ToJson(const mcdm::McdmResult& r) {
  return {{"method", mcdm::MethodName(r.method)}, {"scores", r.scores}, {"notes", r.notes}};
}

Explanation ExplanationFromJson(const json& j) {
  return Parse("explanation", [&] {
    return Explanation(SchemaFromJson(j), j.at("scores").get<std::vector<double>>(),
                       j.value("source", "external"));
  });
}

Ranking RankingFromJson(const json& j) {
  return Parse("ranking", [&] {
    return Ranking(SchemaFromJson(j), j.at("ranks").get<std::vector<int>>());
  });
}

Weights WeightsFromJson(const json& j) {
  return Parse("weights", [&] {
    const json& arr = j.is_object() ? j.at("weights") : j;
    return Weights(arr.get<std::vector<double>>());
  });
}

mcdm::DecisionMatrix DecisionMatrixFromCsv(const std::string& csv_text, const json& sidecar) {
  // The header row and a leading label column are optional and detected as
  // non-numeric text.
  std::istringstream in(csv_text);
  std::vector<std::vector<std::string>> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    records.push_back(std::move(fields));
  }
  auto numeric = [](const std::string& s) {
    try {
      std::size_t pos = 0;
      std::stod(s, &pos);
      return s.find_first_not_of(" \t", pos) == std::string::npos;
    } catch (...) {
      return false;
    }
  };
  if (records.empty()) Fail(ErrorCode::kData, "decision matrix: empty CSV");
  std::size_t first_row = 0;
  if (std::none_of(records[0].begin(), records[0].end(), numeric)) first_row = 1;
  if (first_row >= records.size()) Fail(ErrorCode::kData, "decision matrix: no data rows");
  const std::size_t first_col = numeric(records[first_row][0]) ? 0 : 1;

  mcdm::DecisionMatrix dm;
  for (std::size_t r = first_row; r < records.size(); ++r) {
    std::vector<double> row;
    if (records[r].size() != records[first_row].size()) {
      Fail(ErrorCode::kData, "decision matrix: ragged row " + std::to_string(r + 1));
    }
    for (std::size_t c = first_col; c < records[r].size(); ++c) {
      if (!numeric(records[r][c])) {
        Fail(ErrorCode::kData, "decision matrix: non-numeric cell at row " + std::to_string(r + 1));
      }
      row.push_back(std::stod(records[r][c]));
    }
    dm.values.AppendRow(row);
  }
  const std::size_t n = dm.values.cols();
  Parse("decision matrix sidecar", [&] {
    for (const auto& d : sidecar.at("directions")) {
      dm.directions.push_back(mcdm::ParseDirection(d.get<std::string>()));
    }
    dm.criterion_weights = sidecar.contains("weights")
                               ? Weights(sidecar["weights"].get<std::vector<double>>())
                               : Weights::Uniform(n);
    return 0;
  });
  dm.Validate();
  return dm;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kData, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kData, "'" + path + "': " + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kData, "cannot write '" + path + "'");
  out << text;
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace rankfuse::io
