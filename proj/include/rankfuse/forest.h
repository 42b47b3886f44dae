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

#ifndef RANKFUSE_FOREST_H_
#define RANKFUSE_FOREST_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rankfuse/core.h"
#include "rankfuse/matrix.h"
#include "rankfuse/predictor.h"

namespace rankfuse {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf: positive-class fraction
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double Predict(std::span<const double> x) const {
    int idx = 0;
    while (nodes_[idx].feature >= 0) {
      const TreeNode& n = nodes_[idx];
      idx = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes_[idx].value;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 8;
  int min_samples_leaf = 1;
  int max_features = 0;  // 0 selects ceil(sqrt(d))
  std::uint64_t seed = 0;
};

// Bagged Gini trees; prediction is the mean leaf probability.
class ForestModel final : public Predictor {
 public:
  ForestModel() = default;
  ForestModel(FeatureSchema schema, ForestConfig config,
              std::vector<DecisionTree> trees)
      : schema_(std::move(schema)), config_(config), trees_(std::move(trees)) {}

  const FeatureSchema& schema() const override { return schema_; }
  std::vector<double> PredictProba(const Matrix& rows) const override;

  const ForestConfig& config() const { return config_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  FeatureSchema schema_;
  ForestConfig config_;
  std::vector<DecisionTree> trees_;
};

// Labels must be 0/1 with both classes present.
ForestModel TrainForest(const FeatureSchema& schema, const Matrix& x,
                        std::span<const int> labels, const ForestConfig& config);

double Accuracy(const Predictor& model, const Matrix& x,
                std::span<const int> labels);

}  // namespace rankfuse

#endif  // RANKFUSE_FOREST_H_
