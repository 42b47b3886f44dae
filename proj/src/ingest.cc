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

#include "rankfuse/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rankfuse/error.h"
#include "rankfuse/random.h"

namespace rankfuse {
namespace {

bool ParseDouble(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  if (first == last) return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits one CSV record; supports quoted fields with "" escapes.
std::vector<std::string> SplitRecord(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(Trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(Trim(field));
  return fields;
}

bool Contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

double CellToCode(const ColumnEncoding& col, const std::string& cell) {
  const auto it = std::lower_bound(col.categories.begin(), col.categories.end(), cell);
  if (it == col.categories.end() || *it != cell) {
    Fail(ErrorCode::kData, "column '" + col.raw_name + "': unseen category '" +
                               cell + "'");
  }
  return static_cast<double>(it - col.categories.begin());
}

}  // namespace

std::size_t RawTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) Fail(ErrorCode::kData, "unknown column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool RawTable::is_numeric(std::size_t column) const {
  bool any = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (missing[r][column]) continue;
    double v;
    if (!ParseDouble(rows[r][column], v)) return false;
    any = true;
  }
  return any;
}

bool IsMissingMarker(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "?";
}

RawTable ParseCsv(const std::string& text) {
  RawTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    auto fields = SplitRecord(line);
    if (table.columns.empty()) {
      table.columns = std::move(fields);
      continue;
    }
    if (fields.size() != table.columns.size()) {
      Fail(ErrorCode::kData, "ragged CSV row at line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(table.columns.size()) +
                                 " fields, found " + std::to_string(fields.size()));
    }
    std::vector<bool> miss(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) miss[c] = IsMissingMarker(fields[c]);
    table.rows.push_back(std::move(fields));
    table.missing.push_back(std::move(miss));
  }
  if (table.columns.empty()) Fail(ErrorCode::kData, "CSV has no header row");
  return table;
}

RawTable LoadCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kData, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCsv(buf.str());
}

Dataset Preprocess(const RawTable& raw, const PreprocessOptions& options) {
  Require(!options.label_column.empty(), "Preprocess: label column not set");
  const std::size_t label_idx = raw.column_index(options.label_column);

  // Only rows that survive missing-value removal feed the statistics.
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto& m = raw.missing[r];
    bool any_missing = false;
    for (std::size_t c = 0; c < m.size(); ++c) {
      if (m[c] && !Contains(options.drop, raw.columns[c])) any_missing = true;
    }
    if (!any_missing) kept.push_back(r);
  }
  if (kept.empty()) Fail(ErrorCode::kData, "Preprocess: no rows left after dropping missing values");

  EncodingManifest manifest;
  manifest.label_column = options.label_column;
  manifest.rows_dropped = raw.rows.size() - kept.size();

  std::set<std::string> label_values;
  for (auto r : kept) label_values.insert(raw.rows[r][label_idx]);
  if (label_values.size() != 2) {
    Fail(ErrorCode::kData, "Preprocess: label column must hold exactly two values, found " +
                               std::to_string(label_values.size()));
  }
  if (options.positive_label.empty()) {
    // Numeric labels compare numerically ("2" > "10" lexically otherwise).
    const std::string a = *label_values.begin();
    const std::string b = *label_values.rbegin();
    double va, vb;
    if (ParseDouble(a, va) && ParseDouble(b, vb)) {
      manifest.positive_label = va > vb ? a : b;
    } else {
      manifest.positive_label = b;
    }
  } else {
    if (!label_values.count(options.positive_label)) {
      Fail(ErrorCode::kData, "Preprocess: positive label '" + options.positive_label +
                                 "' not present");
    }
    manifest.positive_label = options.positive_label;
  }

  RawTable kept_table;
  kept_table.columns = raw.columns;
  for (auto r : kept) {
    kept_table.rows.push_back(raw.rows[r]);
    kept_table.missing.push_back(raw.missing[r]);
  }

  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    const std::string& name = raw.columns[c];
    if (c == label_idx || Contains(options.drop, name)) continue;
    ColumnEncoding col;
    col.raw_name = name;
    const bool categorical = Contains(options.categorical, name) || !kept_table.is_numeric(c);
    if (!categorical) {
      col.kind = ColumnEncoding::Kind::kNumeric;
    } else {
      std::set<std::string> cats;
      for (const auto& row : kept_table.rows) cats.insert(row[c]);
      col.categories.assign(cats.begin(), cats.end());
      col.kind = col.categories.size() <= options.onehot_max ? ColumnEncoding::Kind::kOneHot
                                                             : ColumnEncoding::Kind::kLabel;
    }
    manifest.columns.push_back(std::move(col));
  }
  if (manifest.columns.empty()) Fail(ErrorCode::kData, "Preprocess: no feature columns");

  Dataset ds = ApplyManifest(kept_table, manifest);
  if (options.standardize) StandardizeFromTraining(ds);
  return ds;
}

Dataset ApplyManifest(const RawTable& raw, const EncodingManifest& manifest) {
  const std::size_t label_idx = raw.column_index(manifest.label_column);
  std::vector<std::string> names;
  std::vector<FeatureKind> kinds;
  std::vector<std::size_t> raw_idx;
  for (const auto& col : manifest.columns) {
    raw_idx.push_back(raw.column_index(col.raw_name));
    if (col.kind == ColumnEncoding::Kind::kOneHot) {
      for (const auto& cat : col.categories) {
        names.push_back(col.raw_name + "=" + cat);
        kinds.push_back(FeatureKind::kCategorical);
      }
    } else {
      names.push_back(col.raw_name);
      kinds.push_back(col.kind == ColumnEncoding::Kind::kNumeric ? FeatureKind::kNumeric
                                                                 : FeatureKind::kCategorical);
    }
  }
  Dataset ds;
  ds.schema = FeatureSchema(std::move(names), std::move(kinds));
  ds.manifest = manifest;
  ds.manifest.rows_dropped = manifest.rows_dropped;
  std::vector<double> row;
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto& cells = raw.rows[r];
    bool skip = raw.missing[r][label_idx];
    for (auto c : raw_idx) skip = skip || raw.missing[r][c];
    if (skip) continue;
    row.clear();
    for (std::size_t k = 0; k < manifest.columns.size(); ++k) {
      const auto& col = manifest.columns[k];
      const std::string& cell = cells[raw_idx[k]];
      switch (col.kind) {
        case ColumnEncoding::Kind::kNumeric: {
          double v;
          if (!ParseDouble(cell, v)) {
            Fail(ErrorCode::kData, "column '" + col.raw_name + "': non-numeric value '" +
                                       cell + "' at data row " + std::to_string(r + 1));
          }
          row.push_back(col.standardized ? (v - col.mean) / col.scale : v);
          break;
        }
        case ColumnEncoding::Kind::kOneHot: {
          const auto code = static_cast<std::size_t>(CellToCode(col, cell));
          for (std::size_t j = 0; j < col.categories.size(); ++j) {
            row.push_back(j == code ? 1.0 : 0.0);
          }
          break;
        }
        case ColumnEncoding::Kind::kLabel:
          row.push_back(CellToCode(col, cell));
          break;
      }
    }
    ds.x.AppendRow(row);
    ds.labels.push_back(cells[label_idx] == manifest.positive_label ? 1 : 0);
  }
  if (ds.x.empty()) Fail(ErrorCode::kData, "ApplyManifest: no complete rows");
  return ds;
}

void StandardizeFromTraining(Dataset& train, std::vector<Dataset*> others) {
  std::size_t offset = 0;
  for (auto& col : train.manifest.columns) {
    const std::size_t width =
        col.kind == ColumnEncoding::Kind::kOneHot ? col.categories.size() : 1;
    if (col.kind == ColumnEncoding::Kind::kNumeric) {
      // Undo any earlier standardization so statistics refer to raw units.
      const double old_mean = col.standardized ? col.mean : 0.0;
      const double old_scale = col.standardized ? col.scale : 1.0;
      auto to_raw = [&](double v) { return v * old_scale + old_mean; };
      const double n = static_cast<double>(train.size());
      double sum = 0.0;
      for (std::size_t r = 0; r < train.size(); ++r) sum += to_raw(train.x(r, offset));
      const double mean = sum / n;
      double ss = 0.0;
      for (std::size_t r = 0; r < train.size(); ++r) {
        const double dv = to_raw(train.x(r, offset)) - mean;
        ss += dv * dv;
      }
      double scale = std::sqrt(ss / n);
      if (!(scale > 0.0)) scale = 1.0;
      auto apply = [&](Dataset& ds) {
        for (std::size_t r = 0; r < ds.size(); ++r) {
          ds.x(r, offset) = (to_raw(ds.x(r, offset)) - mean) / scale;
        }
      };
      apply(train);
      for (Dataset* other : others) apply(*other);
      col.mean = mean;
      col.scale = scale;
      col.standardized = true;
    }
    offset += width;
  }
  for (Dataset* other : others) other->manifest.columns = train.manifest.columns;
}

SplitResult Split(const Dataset& data, double train_ratio, std::uint64_t seed,
                  bool stratified) {
  Require(train_ratio > 0.0 && train_ratio < 1.0, "Split: ratio must lie in (0, 1)");
  const std::size_t n = data.size();
  Require(n >= 2, "Split: need at least two rows");
  Rng rng(seed);
  std::vector<std::size_t> train_rows, test_rows;
  const auto n_train_total =
      static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(n)));

  if (!stratified || data.labels.empty()) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train_total));
    test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train_total), order.end());
  } else {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);
    // Largest-remainder allocation keeps the total exact and every class
    // within one row of its proportional share.
    std::vector<std::pair<int, double>> remainders;
    std::map<int, std::size_t> quota;
    std::size_t allocated = 0;
    for (auto& [label, rows] : by_class) {
      if (rows.size() < 2) {
        Fail(ErrorCode::kData, "Split: class " + std::to_string(label) +
                                   " has fewer than two rows");
      }
      const double exact = train_ratio * static_cast<double>(rows.size());
      quota[label] = static_cast<std::size_t>(std::floor(exact));
      allocated += quota[label];
      remainders.emplace_back(label, exact - std::floor(exact));
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; allocated < n_train_total && i < remainders.size(); ++i) {
      ++quota[remainders[i].first];
      ++allocated;
    }
    for (auto& [label, rows] : by_class) {
      std::shuffle(rows.begin(), rows.end(), rng);
      const auto q = static_cast<std::ptrdiff_t>(quota[label]);
      train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + q);
      test_rows.insert(test_rows.end(), rows.begin() + q, rows.end());
    }
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  SplitResult out;
  out.train = data.Subset(train_rows);
  out.test = data.Subset(test_rows);
  out.train_rows = std::move(train_rows);
  out.test_rows = std::move(test_rows);
  return out;
}

Dataset Dataset::Subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.schema = schema;
  out.manifest = manifest;
  out.x = x.SelectRows(rows);
  if (!labels.empty()) {
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(labels[r]);
  }
  return out;
}

Dataset Dataset::WithValues(Matrix values) const {
  Require(values.rows() == x.rows() && values.cols() == x.cols(),
          "Dataset::WithValues: shape mismatch");
  Dataset out = *this;
  out.x = std::move(values);
  return out;
}

Dataset MakeDataset(FeatureSchema schema, Matrix x, std::vector<int> labels) {
  Require(x.cols() == schema.size(), "MakeDataset: schema width mismatch");
  Require(labels.empty() || labels.size() == x.rows(), "MakeDataset: label count mismatch");
  Dataset ds;
  ds.schema = std::move(schema);
  ds.x = std::move(x);
  ds.labels = std::move(labels);
  return ds;
}

DatasetConfig LoadDatasetConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kData, "cannot open dataset config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kData, "dataset config '" + path + "': " + e.what());
  }
  DatasetConfig cfg;
  try {
    cfg.name = j.value("name", "");
    const auto csv = j.at("csv").get<std::string>();
    const auto base = std::filesystem::path(path).parent_path();
    cfg.csv = std::filesystem::path(csv).is_absolute() ? csv : (base / csv).string();
    cfg.options.label_column = j.at("label").get<std::string>();
    cfg.options.positive_label = j.value("positive", "");
    cfg.options.onehot_max = j.value("onehot_max", std::size_t{10});
    cfg.options.categorical = j.value("categorical", std::vector<std::string>{});
    cfg.options.drop = j.value("drop", std::vector<std::string>{});
    if (j.contains("expected")) {
      cfg.expected_categorical = j["expected"].value("categorical", -1);
      cfg.expected_numerical = j["expected"].value("numerical", -1);
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kData, "dataset config '" + path + "': " + e.what());
  }
  return cfg;
}

RawColumnCounts CountRawColumns(const EncodingManifest& manifest) {
  RawColumnCounts counts;
  for (const auto& col : manifest.columns) {
    if (col.kind == ColumnEncoding::Kind::kNumeric) {
      ++counts.numerical;
    } else {
      ++counts.categorical;
    }
  }
  return counts;
}

}  // namespace rankfuse
