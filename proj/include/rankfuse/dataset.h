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

#ifndef RANKFUSE_DATASET_H_
#define RANKFUSE_DATASET_H_

#include <span>
#include <string>
#include <vector>

#include "rankfuse/core.h"
#include "rankfuse/matrix.h"

namespace rankfuse {

// How one raw column became one or more encoded columns.
struct ColumnEncoding {
  enum class Kind { kNumeric, kOneHot, kLabel };

  std::string raw_name;
  Kind kind = Kind::kNumeric;
  std::vector<std::string> categories;  // sorted; one-hot / label codes
  double mean = 0.0;                     // numeric standardization
  double scale = 1.0;
  bool standardized = false;

  bool operator==(const ColumnEncoding&) const = default;
};

struct EncodingManifest {
  std::string label_column;
  std::string positive_label;
  std::vector<ColumnEncoding> columns;
  std::size_t rows_dropped = 0;

  bool operator==(const EncodingManifest&) const = default;
};

// Encoded, missing-free tabular data with binary labels.
struct Dataset {
  FeatureSchema schema;
  Matrix x;
  std::vector<int> labels;
  EncodingManifest manifest;

  std::size_t size() const { return x.rows(); }
  std::size_t width() const { return x.cols(); }

  Dataset Subset(std::span<const std::size_t> rows) const;
  // Same rows and labels, different feature values (e.g. perturbed copy).
  Dataset WithValues(Matrix values) const;
};

// Unlabeled dataset over a schema; for analytic tests and fixtures.
Dataset MakeDataset(FeatureSchema schema, Matrix x, std::vector<int> labels = {});

}  // namespace rankfuse

#endif  // RANKFUSE_DATASET_H_
