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

#ifndef RANKFUSE_JSON_IO_H_
#define RANKFUSE_JSON_IO_H_

#include <string>

#include "json.hpp"
#include "rankfuse/core.h"
#include "rankfuse/dataset.h"
#include "rankfuse/explainers.h"
#include "rankfuse/forest.h"
#include "rankfuse/mcdm.h"
#include "rankfuse/metrics.h"
#include "rankfuse/pipeline.h"

namespace rankfuse::io {

using nlohmann::json;

json ToJson(const Explanation& e);
json ToJson(const Ranking& r);
json ToJson(const MetricVector& m);
json ToJson(const Diagnostics& d);
json ToJson(const AggregationReport& r);
json ToJson(const ExperimentReport& r);
json ToJson(const Rq1Report& r);
json ToJson(const PipelineConfig& c);
json ToJson(const ForestModel& m);
json ToJson(const EncodingManifest& m);
json ToJson(const Dataset& d);
json ToJson(const mcdm::McdmResult& r);

Explanation ExplanationFromJson(const json& j);
Ranking RankingFromJson(const json& j);
Weights WeightsFromJson(const json& j);  // array or {"weights": [...]}
ForestModel ForestFromJson(const json& j);
EncodingManifest ManifestFromJson(const json& j);
Dataset DatasetFromJson(const json& j);

// Applies the fields present in `j` on top of `base`.
PipelineConfig ConfigFromJson(const json& j, PipelineConfig base = {});

// rows = alternatives; an optional header row and an optional leading label
// column are recognised by being non-numeric. The sidecar holds
// {"directions": [...], "weights": [...]} (weights default to equal).
mcdm::DecisionMatrix DecisionMatrixFromCsv(const std::string& csv_text, const json& sidecar);

json ReadJsonFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

// Pretty-printed, key-sorted, trailing newline; the canonical report bytes.
std::string Dump(const json& j);

}  // namespace rankfuse::io

#endif  // RANKFUSE_JSON_IO_H_
