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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gtest/gtest.h"
#include "rankfuse/error.h"
#include "test_util.h"

namespace rankfuse {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

const char kSmall[] =
    "age,color,city,income,y\n"
    "30,red,c1,1.5,yes\n"
    "41,blue,c2,2.5,no\n"
    "?,green,c3,3.0,yes\n"
    "25,red,c4,NA,no\n"
    "52,green,c5,4.0,no\n"
    "38,blue,c6,0.5,yes\n";

TEST(CsvTest, ParsesAndDetectsMissing) {
  const auto raw = ParseCsv(kSmall);
  ASSERT_EQ(raw.columns.size(), 5u);
  ASSERT_EQ(raw.rows.size(), 6u);
  EXPECT_TRUE(raw.missing[2][0]);
  EXPECT_TRUE(raw.missing[3][3]);
  EXPECT_FALSE(raw.missing[0][0]);
  EXPECT_TRUE(raw.is_numeric(0));
  EXPECT_FALSE(raw.is_numeric(1));
  EXPECT_TRUE(IsMissingMarker(""));
}

TEST(CsvTest, QuotedFieldsAndCrlf) {
  const auto raw = ParseCsv("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n");
  ASSERT_EQ(raw.rows.size(), 1u);
  EXPECT_EQ(raw.rows[0][0], "x, y");
  EXPECT_EQ(raw.rows[0][1], "say \"hi\"");
}

TEST(CsvTest, RaggedRowReportsLine) {
  try {
    ParseCsv("a,b\n1,2\n3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_EQ(CodeOf([] { LoadCsv("/nonexistent/file.csv"); }), ErrorCode::kData);
}

TEST(PreprocessTest, EncodingsAndDroppedRows) {
  PreprocessOptions opt;
  opt.label_column = "y";
  opt.positive_label = "yes";
  opt.onehot_max = 3;
  const auto ds = Preprocess(ParseCsv(kSmall), opt);
  EXPECT_EQ(ds.manifest.rows_dropped, 2u);
  EXPECT_EQ(ds.size(), 4u);
  // age, color (3 indicators), city (4 categories > 3: label coded), income.
  ASSERT_EQ(ds.width(), 6u);
  EXPECT_EQ(ds.schema.name(1), "color=blue");
  EXPECT_EQ(ds.schema.name(4), "city");
  EXPECT_TRUE(ds.schema.is_categorical(4));
  EXPECT_FALSE(ds.schema.is_categorical(0));
  EXPECT_EQ(ds.labels, (std::vector<int>{1, 0, 0, 1}));
  for (std::size_t r = 0; r < ds.size(); ++r) {
    EXPECT_EQ(ds.x(r, 1) + ds.x(r, 2) + ds.x(r, 3), 1.0);
  }
  const auto counts = CountRawColumns(ds.manifest);
  EXPECT_EQ(counts.categorical, 2);
  EXPECT_EQ(counts.numerical, 2);
}

TEST(PreprocessTest, CardinalityThresholds) {
  std::ostringstream csv;
  csv << "c,k,y\n";
  for (int i = 0; i < 80; ++i) csv << "v" << i % 40 << ",k" << i % 3 << "," << i % 2 << "\n";
  PreprocessOptions opt;
  opt.label_column = "y";
  const auto ds = Preprocess(ParseCsv(csv.str()), opt);
  EXPECT_EQ(ds.width(), 1u + 3u);
  EXPECT_EQ(ds.manifest.positive_label, "1");
  EXPECT_EQ(ds.manifest.columns[0].kind, ColumnEncoding::Kind::kLabel);
  EXPECT_EQ(ds.manifest.columns[1].kind, ColumnEncoding::Kind::kOneHot);
}

TEST(PreprocessTest, StandardizationAndManifestReplay) {
  const auto raw = LoadCsv(testing::SourceDir() + "/data/wdbc.csv");
  PreprocessOptions opt;
  opt.label_column = "diagnosis";
  opt.positive_label = "M";
  const auto ds = Preprocess(raw, opt);
  EXPECT_EQ(ds.size(), 569u);
  EXPECT_EQ(ds.width(), 30u);
  for (std::size_t c = 0; c < ds.width(); ++c) {
    double mean = 0, ss = 0;
    for (std::size_t r = 0; r < ds.size(); ++r) mean += ds.x(r, c);
    mean /= ds.size();
    for (std::size_t r = 0; r < ds.size(); ++r) ss += (ds.x(r, c) - mean) * (ds.x(r, c) - mean);
    EXPECT_LT(std::abs(mean), 1e-9);
    EXPECT_LT(std::abs(std::sqrt(ss / ds.size()) - 1.0), 1e-9);
  }
  const auto again = ApplyManifest(raw, ds.manifest);
  EXPECT_EQ(again.x, ds.x);
  EXPECT_EQ(again.labels, ds.labels);
}

TEST(PreprocessTest, TrainingStatisticsOnly) {
  const auto data = testing::PlantedDataset(200, 1);
  PreprocessOptions opt;
  std::ostringstream csv;
  csv << "a,b,y\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    csv << data.x(r, 0) * 3 + 1 << "," << data.x(r, 1) << "," << data.labels[r] << "\n";
  }
  opt.label_column = "y";
  opt.standardize = false;
  const auto ds = Preprocess(ParseCsv(csv.str()), opt);
  auto split = Split(ds, 0.8, 5);
  StandardizeFromTraining(split.train, {&split.test});
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0;
    for (std::size_t r = 0; r < split.train.size(); ++r) mean += split.train.x(r, c);
    EXPECT_LT(std::abs(mean / split.train.size()), 1e-9);
  }
  EXPECT_EQ(split.test.manifest.columns, split.train.manifest.columns);
  // The test rows use the same affine map as the training rows.
  const auto& col = split.train.manifest.columns[0];
  const std::size_t r0 = split.test_rows[0];
  EXPECT_NEAR(split.test.x(0, 0), (ds.x(r0, 0) - col.mean) / col.scale, 1e-12);
}

TEST(PreprocessTest, Errors) {
  PreprocessOptions opt;
  EXPECT_EQ(CodeOf([&] { Preprocess(ParseCsv(kSmall), opt); }), ErrorCode::kInvalidArgument);
  opt.label_column = "y";
  EXPECT_EQ(CodeOf([&] { Preprocess(ParseCsv("a,y\n?,1\nNA,0\n"), opt); }), ErrorCode::kData);
  EXPECT_EQ(CodeOf([&] { Preprocess(ParseCsv("a,y\n1,1\n2,1\n"), opt); }), ErrorCode::kData);
  opt.positive_label = "maybe";
  EXPECT_EQ(CodeOf([&] { Preprocess(ParseCsv(kSmall), opt); }), ErrorCode::kData);
}

TEST(SplitTest, SizesStratificationAndDeterminism) {
  const auto data = testing::LinearDataset(1000, {1.0, -0.5, 0.2}, 3);
  const auto a = Split(data, 0.8, 11);
  EXPECT_EQ(a.train.size(), 800u);
  EXPECT_EQ(a.test.size(), 200u);
  std::map<int, int> total, train;
  for (int y : data.labels) ++total[y];
  for (int y : a.train.labels) ++train[y];
  for (auto [label, n] : total) EXPECT_LE(std::abs(train[label] - 0.8 * n), 1.0) << label;
  const auto b = Split(data, 0.8, 11);
  EXPECT_EQ(a.train_rows, b.train_rows);
  EXPECT_EQ(a.test_rows, b.test_rows);
  EXPECT_NE(Split(data, 0.8, 12).train_rows, a.train_rows);
  std::vector<bool> seen(1000, false);
  for (auto r : a.train_rows) seen[r] = true;
  for (auto r : a.test_rows) {
    EXPECT_FALSE(seen[r]);
    seen[r] = true;
  }
  EXPECT_EQ(std::count(seen.begin(), seen.end(), true), 1000);
}

TEST(SplitTest, TinyClassRejected) {
  Matrix x(10, 1);
  std::vector<int> y(10, 0);
  y[3] = 1;
  const auto data = MakeDataset(FeatureSchema::Numeric(1), x, y);
  EXPECT_EQ(CodeOf([&] { Split(data, 0.8, 1); }), ErrorCode::kData);
  EXPECT_NO_THROW(Split(data, 0.8, 1, false));
}

TEST(DatasetConfigTest, ShippedConfigsParse) {
  const auto dir = testing::SourceDir() + "/configs/datasets/";
  for (const char* name : {"wdbc", "german", "taiwan", "pakdd2010", "student_depression"}) {
    const auto cfg = LoadDatasetConfig(dir + name + ".json");
    EXPECT_FALSE(cfg.options.label_column.empty()) << name;
    EXPECT_TRUE(std::filesystem::path(cfg.csv).is_absolute()) << name;
  }
  const auto wdbc = LoadDatasetConfig(dir + "wdbc.json");
  EXPECT_EQ(wdbc.expected_categorical, 0);
  EXPECT_EQ(wdbc.expected_numerical, 30);
  const auto german = LoadDatasetConfig(dir + "german.json");
  EXPECT_EQ(german.expected_categorical, 13);
  EXPECT_EQ(german.expected_numerical, 7);
}

TEST(DatasetConfigTest, MalformedConfigIsDataError) {
  const auto path = std::filesystem::temp_directory_path() / "rankfuse_bad_config.json";
  std::ofstream(path) << R"({"name": "x"})";
  EXPECT_EQ(CodeOf([&] { LoadDatasetConfig(path.string()); }), ErrorCode::kData);
  std::ofstream(path) << "{not json";
  EXPECT_EQ(CodeOf([&] { LoadDatasetConfig(path.string()); }), ErrorCode::kData);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace rankfuse
