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

#include "cli.h"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rankfuse/bridge.h"
#include "rankfuse/error.h"
#include "rankfuse/ingest.h"
#include "rankfuse/json_io.h"
#include "rankfuse/kernels.h"
#include "rankfuse/pipeline.h"
#include "rankfuse/random.h"

#ifndef RANKFUSE_VERSION
#define RANKFUSE_VERSION "0.0.0"
#endif

namespace rankfuse::cli {
namespace {

using io::json;
namespace fs = std::filesystem;

constexpr const char* kModelFormat = "rankfuse.model";

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kData, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string BytesHash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return bridge::HashHex(h);
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Options shared by all subcommands.
struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string mcdm;
  std::string agg;
  std::vector<std::string> explainers;
  std::string bridge;
  std::string bridge_record;
  std::string bridge_replay;
  std::string out = ".";
  bool quiet = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
};

struct DataArgs {
  std::string data;
  std::string label;
  std::string positive;
};

// Everything a command accumulates for its RunManifest.
class RunState {
 public:
  RunState(std::string command, std::vector<std::string> argv, const Globals& g, std::ostream& err)
      : command_(std::move(command)), argv_(std::move(argv)), globals_(g), err_(err),
        start_(std::chrono::steady_clock::now()) {}

  void Progress(const std::string& msg) const {
    if (!globals_.quiet) err_ << "[rankfuse] " << msg << "\n";
  }

  std::string ReadInput(const std::string& path) {
    std::string bytes = ReadFile(path);
    inputs_[path] = BytesHash(bytes);
    return bytes;
  }
  void NoteInput(const std::string& path) { inputs_[path] = BytesHash(ReadFile(path)); }

  void WriteOutput(const std::string& name, const std::string& bytes) {
    fs::create_directories(globals_.out);
    const std::string path = (fs::path(globals_.out) / name).string();
    io::WriteTextFile(path, bytes);
    outputs_[name] = BytesHash(bytes);
  }

  json seeds = json::object();
  std::optional<PipelineConfig> config;
  json extra = json::object();

  void WriteManifest() {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start_);
    json m = {{"tool", "rankfuse"},
              {"version", RANKFUSE_VERSION},
              {"protocol_version", bridge::kProtocolVersion},
              {"compiler", __VERSION__},
              {"command", command_},
              {"argv", argv_},
              {"seeds", seeds},
              {"inputs", inputs_},
              {"outputs", outputs_},
              {"timings_ms", {{"total", elapsed.count()}}}};
    if (config) m["config"] = io::ToJson(*config);
    for (const auto& [k, v] : extra.items()) m[k] = v;
    fs::create_directories(globals_.out);
    io::WriteTextFile((fs::path(globals_.out) / (command_ + ".manifest.json")).string(),
                      io::Dump(m));
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  const Globals& globals_;
  std::ostream& err_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
};

// Precedence: built-in defaults < --config file < command-line flags.
PipelineConfig BuildConfig(const Globals& g, RunState& state) {
  PipelineConfig config;
  if (!g.config.empty()) {
    json j = json::parse(state.ReadInput(g.config), nullptr, false);
    if (j.is_discarded()) Fail(ErrorCode::kConfig, "config '" + g.config + "' is not valid JSON");
    // A RunManifest can stand in for a config file.
    if (j.contains("tool") && j.contains("config")) j = j["config"];
    config = io::ConfigFromJson(j, config);
  }
  if (g.seed_opt->count() > 0) config.seed = g.seed;
  if (g.jobs_opt->count() > 0) config.jobs = g.jobs;
  if (!g.mcdm.empty()) config.mcdm = mcdm::ParseMethod(g.mcdm);
  if (!g.agg.empty()) config.aggregator = rankagg::ParseMethod(g.agg);
  if (!g.explainers.empty()) config.explainers = g.explainers;
  const bool bridged = !g.bridge.empty() || !g.bridge_replay.empty();
  if (bridged && config.jobs != 1) {
    state.Progress("bridge sessions are sequential; using --jobs 1");
    config.jobs = 1;
  }
  config.Validate();
  kernels::SetNumThreads(config.jobs);
  state.config = config;
  const std::uint64_t s = config.seed;
  state.seeds = {{"master", s},
                 {"split", DeriveSeed(s, SeedStream::kSplit)},
                 {"forest", DeriveSeed(s, SeedStream::kForest)},
                 {"autoencoder", DeriveSeed(s, SeedStream::kAutoencoder)},
                 {"noise", DeriveSeed(s, SeedStream::kNoise)},
                 {"instances", DeriveSeed(s, SeedStream::kInstances)},
                 {"explain_instance", DeriveSeed(s, SeedStream::kExplainInstance)}};
  return config;
}

Dataset LoadInput(const DataArgs& args, RunState& state) {
  if (args.data.empty()) Fail(ErrorCode::kInvalidArgument, "--data is required");
  PreprocessOptions options;
  std::string csv = args.data;
  int expected_cat = -1, expected_num = -1;
  if (EndsWith(args.data, ".json")) {
    state.NoteInput(args.data);
    DatasetConfig dc = LoadDatasetConfig(args.data);
    csv = dc.csv;
    options = dc.options;
    expected_cat = dc.expected_categorical;
    expected_num = dc.expected_numerical;
  } else {
    if (args.label.empty()) Fail(ErrorCode::kInvalidArgument, "--label is required for CSV input");
  }
  if (!args.label.empty()) options.label_column = args.label;
  if (!args.positive.empty()) options.positive_label = args.positive;
  options.standardize = false;
  state.Progress("loading " + csv);
  Dataset ds = Preprocess(ParseCsv(state.ReadInput(csv)), options);
  const auto counts = CountRawColumns(ds.manifest);
  if ((expected_cat >= 0 && counts.categorical != expected_cat) ||
      (expected_num >= 0 && counts.numerical != expected_num)) {
    Fail(ErrorCode::kData, "column roles differ from the dataset config: found " +
                               std::to_string(counts.categorical) + " categorical / " +
                               std::to_string(counts.numerical) + " numerical");
  }
  state.extra["data"] = {{"rows", ds.size()},
                         {"rows_dropped", ds.manifest.rows_dropped},
                         {"encoded_features", ds.width()}};
  return ds;
}

// Owns the optional bridge session for the lifetime of a command.
class BridgeLink {
 public:
  BridgeLink(const Globals& g, const PipelineConfig& config, RunState& state) : state_(state) {
    std::unique_ptr<bridge::Transport> transport;
    if (!g.bridge_replay.empty()) {
      transport = std::make_unique<bridge::ReplayTransport>(
          bridge::ParseTranscript(state.ReadInput(g.bridge_replay)));
    } else if (!g.bridge.empty()) {
      transport = bridge::OpenTransport(g.bridge);
    } else {
      return;
    }
    if (!g.bridge_record.empty()) {
      auto rec = std::make_unique<bridge::RecordingTransport>(std::move(transport));
      recorder_ = rec.get();
      record_path_ = g.bridge_record;
      transport = std::move(rec);
    }
    session_ = std::make_unique<bridge::Session>(std::move(transport));
    const auto& info = session_->Handshake(config.seed);
    state.extra["bridge"] = {{"address", g.bridge.empty() ? "replay:" + g.bridge_replay : g.bridge},
                             {"version", info.version},
                             {"capabilities", info.capabilities},
                             {"params", info.params}};
    state.Progress("bridge connected (protocol " + std::to_string(info.version) + ")");
  }

  bool active() const { return session_ != nullptr; }

  std::unique_ptr<Predictor> MakePredictor(const FeatureSchema& schema) {
    return std::make_unique<bridge::BridgePredictor>(*session_, schema);
  }
  ExplainerFactory factory() { return bridge::BridgeExplainerFactory(*session_); }

  void Finish() {
    if (!session_) return;
    session_->Shutdown();
    if (recorder_) {
      io::WriteTextFile(record_path_, bridge::FormatTranscript(recorder_->transcript()));
      state_.Progress("bridge transcript written to " + record_path_);
    }
  }

 private:
  RunState& state_;
  std::unique_ptr<bridge::Session> session_;
  bridge::RecordingTransport* recorder_ = nullptr;
  std::string record_path_;
};

// ------------------------------------------------------------- commands ---

int CmdTrain(const Globals& g, const DataArgs& data, RunState& state, std::ostream& out) {
  const PipelineConfig config = BuildConfig(g, state);
  const Dataset ds = LoadInput(data, state);
  state.Progress("training forest (" + std::to_string(config.forest.n_trees) + " trees)");
  const PreparedData prep = PrepareData(config, ds);
  json model = {{"format", kModelFormat},
                {"version", 1},
                {"forest", io::ToJson(prep.model)},
                {"manifest", io::ToJson(prep.train.manifest)},
                {"split",
                 {{"seed", config.seed},
                  {"train_ratio", config.train_ratio},
                  {"n_train", prep.train.size()},
                  {"n_test", prep.test.size()},
                  {"train_hash", bridge::HashHex(bridge::DatasetHash(prep.train.x))},
                  {"test_hash", bridge::HashHex(bridge::DatasetHash(prep.test.x))}}},
                {"test_accuracy", prep.test_accuracy},
                {"majority_rate", prep.majority_rate}};
  const std::string bytes = io::Dump(model);
  state.WriteOutput("model.json", bytes);
  json summary = {{"test_accuracy", prep.test_accuracy},
                  {"majority_rate", prep.majority_rate},
                  {"n_train", prep.train.size()},
                  {"n_test", prep.test.size()},
                  {"model_hash", BytesHash(bytes)}};
  out << io::Dump(summary);
  return kExitOk;
}

struct LoadedModel {
  ForestModel forest;
  Dataset train;
  Dataset test;
  std::uint64_t split_seed = 0;
};

LoadedModel LoadModel(const std::string& path, const Dataset& ds, RunState& state) {
  const json j = json::parse(state.ReadInput(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != kModelFormat) {
    Fail(ErrorCode::kData, "'" + path + "' is not a rankfuse model file");
  }
  LoadedModel m;
  m.forest = io::ForestFromJson(j.at("forest"));
  const json& split = j.at("split");
  m.split_seed = split.at("seed").get<std::uint64_t>();
  auto parts = Split(ds, split.at("train_ratio").get<double>(),
                     DeriveSeed(m.split_seed, SeedStream::kSplit), true);
  StandardizeFromTraining(parts.train, {&parts.test});
  if (bridge::HashHex(bridge::DatasetHash(parts.train.x)) != split.at("train_hash")) {
    Fail(ErrorCode::kData, "the dataset does not reproduce the model's training split");
  }
  if (!(m.forest.schema() == parts.train.schema)) {
    Fail(ErrorCode::kData, "model features do not match the dataset encoding");
  }
  m.train = std::move(parts.train);
  m.test = std::move(parts.test);
  state.seeds["model_split_master"] = m.split_seed;
  return m;
}

std::vector<double> InstanceFromJson(const json& j, const Dataset& train) {
  if (j.is_array()) {
    std::vector<double> x;
    for (const auto& v : j) {
      if (!v.is_number()) Fail(ErrorCode::kInvalidArgument, "instance array must be numeric");
      x.push_back(v.get<double>());
    }
    if (x.size() != train.width()) {
      Fail(ErrorCode::kInvalidArgument, "instance has " + std::to_string(x.size()) +
                                            " values, the model expects " +
                                            std::to_string(train.width()));
    }
    return x;
  }
  if (!j.is_object()) Fail(ErrorCode::kInvalidArgument, "instance must be an array or an object");
  // Raw column values, encoded with the training manifest.
  const EncodingManifest& manifest = train.manifest;
  RawTable raw;
  std::vector<std::string> row;
  for (const auto& col : manifest.columns) {
    if (!j.contains(col.raw_name)) {
      Fail(ErrorCode::kInvalidArgument, "instance lacks column '" + col.raw_name + "'");
    }
    const json& v = j[col.raw_name];
    raw.columns.push_back(col.raw_name);
    row.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  raw.columns.push_back(manifest.label_column);
  row.push_back(manifest.positive_label);
  raw.missing.push_back(std::vector<bool>(row.size(), false));
  raw.rows.push_back(std::move(row));
  const Dataset one = ApplyManifest(raw, manifest);
  return std::vector<double>(one.x.row(0).begin(), one.x.row(0).end());
}

int CmdExplain(const Globals& g, const DataArgs& data, const std::string& model_path,
               CLI::Option* index_opt, long long index, const std::string& instance_json,
               RunState& state, std::ostream& out) {
  const PipelineConfig config = BuildConfig(g, state);
  const Dataset ds = LoadInput(data, state);
  const LoadedModel m = LoadModel(model_path, ds, state);

  std::vector<double> x;
  std::size_t id = 0;
  if (index_opt->count() > 0) {
    if (index < 0 || static_cast<std::size_t>(index) >= m.test.size()) {
      Fail(ErrorCode::kInvalidArgument, "--instance " + std::to_string(index) +
                                            " is outside the test split (0.." +
                                            std::to_string(m.test.size()) + ")");
    }
    id = static_cast<std::size_t>(index);
    x.assign(m.test.x.row(id).begin(), m.test.x.row(id).end());
  } else {
    const json j = json::parse(state.ReadInput(instance_json), nullptr, false);
    if (j.is_discarded()) Fail(ErrorCode::kInvalidArgument, "instance file is not valid JSON");
    x = InstanceFromJson(j, m.train);
  }

  BridgeLink link(g, config, state);
  std::unique_ptr<Predictor> remote;
  if (link.active()) remote = link.MakePredictor(m.train.schema);
  const Predictor& model = remote ? *remote : static_cast<const Predictor&>(m.forest);
  state.Progress("fitting explainers on original and perturbed training data");
  const AggregationReport report = ExplainInstance(
      config, model, m.train, x, link.active() ? link.factory() : ExplainerFactory{}, id);
  if (report.ok()) link.Finish();

  const std::string bytes = io::Dump(io::ToJson(report));
  state.WriteOutput("explain.json", bytes);
  out << bytes;
  if (!report.ok()) {
    state.Progress("explanation failed at stage '" + report.failed_stage + "': " + report.error);
    return kExitComputation;
  }
  return kExitOk;
}

int CmdExperiment(const Globals& g, const DataArgs& data, std::size_t n, RunState& state,
                  std::ostream& out) {
  const PipelineConfig config = BuildConfig(g, state);
  const Dataset ds = LoadInput(data, state);
  state.Progress("training forest");
  const PreparedData prep = PrepareData(config, ds);
  BridgeLink link(g, config, state);
  std::unique_ptr<Predictor> remote;
  if (link.active()) remote = link.MakePredictor(prep.train.schema);
  const Predictor& model = remote ? *remote : static_cast<const Predictor&>(prep.model);
  state.Progress("explaining " + std::to_string(n) + " instances with " +
                 std::to_string(config.jobs) + " job(s)");
  ExperimentReport report = RunExperiment(config, model, prep.train, prep.test, n,
                                          link.active() ? link.factory() : ExplainerFactory{});
  report.test_accuracy = Accuracy(model, prep.test.x, prep.test.labels);
  link.Finish();

  state.WriteOutput("experiment.json", io::Dump(io::ToJson(report)));
  const std::string table = RenderExperimentTable(report);
  state.WriteOutput("experiment.md", table);
  out << table;
  for (const auto& f : report.failures) state.Progress("failure: " + f);
  return report.failures.size() == report.instances.size() ? kExitComputation : kExitOk;
}

int CmdRq1(const Globals& g, const DataArgs& data, std::size_t n, RunState& state,
           std::ostream& out) {
  const PipelineConfig config = BuildConfig(g, state);
  const Dataset ds = LoadInput(data, state);
  state.Progress("training forest");
  const PreparedData prep = PrepareData(config, ds);
  BridgeLink link(g, config, state);
  std::unique_ptr<Predictor> remote;
  if (link.active()) remote = link.MakePredictor(prep.train.schema);
  const Predictor& model = remote ? *remote : static_cast<const Predictor&>(prep.model);
  state.Progress("explaining " + std::to_string(n) + " instances");
  const Rq1Report report = RunRq1(config, model, prep.train, prep.test, n,
                                  link.active() ? link.factory() : ExplainerFactory{});
  link.Finish();
  state.WriteOutput("rq1.json", io::Dump(io::ToJson(report)));
  const std::string table = RenderRq1Table(report);
  state.WriteOutput("rq1.md", table);
  out << table;
  return kExitOk;
}

int CmdMcdm(const Globals& g, const std::string& matrix, const std::string& directions,
            RunState& state, std::ostream& out) {
  const PipelineConfig config = BuildConfig(g, state);
  const json sidecar = json::parse(state.ReadInput(directions), nullptr, false);
  if (sidecar.is_discarded()) Fail(ErrorCode::kData, "'" + directions + "' is not valid JSON");
  const auto dm = io::DecisionMatrixFromCsv(state.ReadInput(matrix), sidecar);
  const auto result = mcdm::Score(config.mcdm, dm);
  json j = io::ToJson(result);
  j["weights"] = mcdm::ScoresToWeights(result).values();
  const std::string bytes = io::Dump(j);
  state.WriteOutput("mcdm.json", bytes);
  out << bytes;
  return kExitOk;
}

int CmdAggregate(const Globals& g, const std::string& rankings, const std::string& weights,
                 RunState& state, std::ostream& out) {
  const PipelineConfig config = BuildConfig(g, state);
  const json j = json::parse(state.ReadInput(rankings), nullptr, false);
  if (j.is_discarded()) Fail(ErrorCode::kData, "'" + rankings + "' is not valid JSON");
  const json& list = j.is_object() ? j.at("rankings") : j;
  rankagg::AggregationInput input;
  for (const auto& r : list) input.rankings.push_back(io::RankingFromJson(r));
  if (!weights.empty()) {
    const json w = json::parse(state.ReadInput(weights), nullptr, false);
    if (w.is_discarded()) Fail(ErrorCode::kData, "'" + weights + "' is not valid JSON");
    input.weights = io::WeightsFromJson(w);
  } else if (j.is_object() && j.contains("weights")) {
    input.weights = io::WeightsFromJson(j["weights"]);
  } else {
    input.weights = Weights::Uniform(input.rankings.size());
  }
  const Ranking result = rankagg::Aggregate(config.aggregator, input);
  json jr = io::ToJson(result);
  jr["method"] = rankagg::MethodName(config.aggregator);
  jr["weights"] = input.weights.values();
  const std::string bytes = io::Dump(jr);
  state.WriteOutput("aggregate.json", bytes);
  out << bytes;
  return kExitOk;
}

// Drops --out and its value so a manifest can be replayed elsewhere.
std::vector<std::string> Reproducible(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

int CmdReplay(const Globals& g, const std::string& manifest_path, std::ostream& out,
              std::ostream& err) {
  const json m = io::ReadJsonFile(manifest_path);
  if (!m.contains("argv") || !m.contains("inputs")) {
    Fail(ErrorCode::kData, "'" + manifest_path + "' is not a rankfuse run manifest");
  }
  for (const auto& [path, hash] : m["inputs"].items()) {
    if (BytesHash(ReadFile(path)) != hash.get<std::string>()) {
      Fail(ErrorCode::kData, "input '" + path + "' changed since the recorded run");
    }
  }
  auto args = m["argv"].get<std::vector<std::string>>();
  args.push_back("--out");
  args.push_back(g.out);
  if (g.quiet) args.push_back("--quiet");
  return Run(args, out, err);
}

int ExitFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfig:
      return kExitUsage;
    case ErrorCode::kData:
      return kExitData;
    case ErrorCode::kComputation:
    case ErrorCode::kBridge:
      return kExitComputation;
  }
  return kExitComputation;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-based aggregation of feature-importance explanations", "rankfuse"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", RANKFUSE_VERSION);

  Globals g;
  app.add_option("--config", g.config, "JSON config file (or a RunManifest)");
  g.seed_opt = app.add_option("--seed", g.seed, "master seed");
  g.jobs_opt = app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--mcdm", g.mcdm, "topsis | edas");
  app.add_option("--agg", g.agg, "wsum | borda | condorcet");
  app.add_option("--explainers", g.explainers, "comma-separated list, e.g. lime,shap,anchor")
      ->delimiter(',');
  app.add_option("--bridge", g.bridge, "bridge server command, or tcp://host:port");
  app.add_option("--bridge-record", g.bridge_record, "write the bridge transcript here");
  app.add_option("--bridge-replay", g.bridge_replay, "answer bridge requests from a transcript");
  app.add_option("--out", g.out, "output directory");
  app.add_flag("--quiet", g.quiet, "suppress progress messages");

  auto add_data = [](CLI::App* sub, DataArgs& d) {
    sub->add_option("--data", d.data, "dataset config (.json) or CSV file")->required();
    sub->add_option("--label", d.label, "label column (CSV input)");
    sub->add_option("--positive", d.positive, "positive label value");
  };

  DataArgs train_data, explain_data, exp_data, rq1_data;
  auto* train = app.add_subcommand("train", "train the reference random forest");
  add_data(train, train_data);

  auto* explain = app.add_subcommand("explain", "explain one instance and aggregate");
  add_data(explain, explain_data);
  std::string model_path, instance_json;
  long long instance = -1;
  explain->add_option("--model", model_path, "model file written by 'train'")->required();
  auto* index_opt = explain->add_option("--instance", instance, "row of the test split");
  auto* json_opt = explain->add_option("--instance-json", instance_json,
                                       "JSON array (encoded) or object (raw columns)");
  index_opt->excludes(json_opt);

  auto* experiment = app.add_subcommand("experiment", "average ranks over test instances");
  add_data(experiment, exp_data);
  std::size_t exp_n = 10;
  experiment->add_option("--n", exp_n, "number of test instances")->check(CLI::PositiveNumber);

  auto* rq1 = app.add_subcommand("rq1", "correlate rank-based and traditional metrics");
  add_data(rq1, rq1_data);
  std::size_t rq1_n = 100;
  rq1->add_option("--n", rq1_n, "number of test instances")->check(CLI::PositiveNumber);

  auto* mcdm_cmd = app.add_subcommand("mcdm", "score a decision matrix");
  std::string matrix, directions;
  mcdm_cmd->add_option("--matrix", matrix, "CSV, one alternative per row")->required();
  mcdm_cmd->add_option("--directions", directions, "JSON with directions and weights")->required();

  auto* aggregate = app.add_subcommand("aggregate", "fuse rankings");
  std::string rankings, weights;
  aggregate->add_option("--rankings", rankings, "JSON list of rankings")->required();
  aggregate->add_option("--weights", weights, "JSON weights (default: uniform)");

  auto* replay = app.add_subcommand("replay", "rerun the command recorded in a RunManifest");
  std::string manifest_path;
  replay->add_option("--manifest", manifest_path, "RunManifest to replay")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunState state(sub->get_name(), Reproducible(args), g, err);
  try {
    int code = kExitOk;
    if (sub == train) {
      code = CmdTrain(g, train_data, state, out);
    } else if (sub == explain) {
      if (index_opt->count() == 0 && json_opt->count() == 0) {
        Fail(ErrorCode::kInvalidArgument, "explain needs --instance or --instance-json");
      }
      code = CmdExplain(g, explain_data, model_path, index_opt, instance, instance_json, state, out);
    } else if (sub == experiment) {
      code = CmdExperiment(g, exp_data, exp_n, state, out);
    } else if (sub == rq1) {
      code = CmdRq1(g, rq1_data, rq1_n, state, out);
    } else if (sub == mcdm_cmd) {
      code = CmdMcdm(g, matrix, directions, state, out);
    } else if (sub == aggregate) {
      code = CmdAggregate(g, rankings, weights, state, out);
    } else {
      return CmdReplay(g, manifest_path, out, err);
    }
    state.WriteManifest();
    return code;
  } catch (const Error& e) {
    err << "rankfuse: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return ExitFor(e);
  } catch (const std::exception& e) {
    err << "rankfuse: " << e.what() << "\n";
    return kExitComputation;
  }
}

}  // namespace rankfuse::cli
