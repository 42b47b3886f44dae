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

#ifndef RANKFUSE_INGEST_H_
#define RANKFUSE_INGEST_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rankfuse/dataset.h"

namespace rankfuse {

// Rectangular string table as read from CSV.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<bool>> missing;  // parallel to rows

  std::size_t column_index(const std::string& name) const;
  // True when every non-missing cell of the column parses as a number.
  bool is_numeric(std::size_t column) const;
};

bool IsMissingMarker(const std::string& cell);

RawTable ParseCsv(const std::string& text);
RawTable LoadCsv(const std::string& path);

struct PreprocessOptions {
  std::string label_column;
  std::string positive_label;  // empty: the larger of the two label values
  std::size_t onehot_max = 10;
  std::vector<std::string> categorical;  // force categorical treatment
  std::vector<std::string> drop;         // ignored raw columns
  bool standardize = true;
};

// Drops rows with missing cells, encodes categoricals (one-hot up to
// onehot_max categories, label codes above), optionally standardizes
// numeric columns using the table's own statistics.
Dataset Preprocess(const RawTable& raw, const PreprocessOptions& options);

// Re-encodes a raw table with an existing manifest (unseen categories are
// rejected).
Dataset ApplyManifest(const RawTable& raw, const EncodingManifest& manifest);

// Fits standardization on `train` and applies the same statistics to every
// dataset in `others`.
void StandardizeFromTraining(Dataset& train, std::vector<Dataset*> others = {});

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

SplitResult Split(const Dataset& data, double train_ratio, std::uint64_t seed,
                  bool stratified = true);

// Per-dataset column roles shipped under configs/datasets/.
struct DatasetConfig {
  std::string name;
  std::string csv;  // relative to the config file
  PreprocessOptions options;
  int expected_categorical = -1;  // raw column counts, used as a checksum
  int expected_numerical = -1;
};

DatasetConfig LoadDatasetConfig(const std::string& path);

struct RawColumnCounts {
  int categorical = 0;
  int numerical = 0;
};
RawColumnCounts CountRawColumns(const EncodingManifest& manifest);

}  // namespace rankfuse

#endif  // RANKFUSE_INGEST_H_
