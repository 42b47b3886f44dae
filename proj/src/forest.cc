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

#include "rankfuse/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfuse/error.h"
#include "rankfuse/kernels.h"
#include "rankfuse/random.h"

namespace rankfuse {

double Predictor::PredictOne(std::span<const double> x) const {
  Matrix m(1, x.size());
  std::copy(x.begin(), x.end(), m.row(0).begin());
  return PredictProba(m).front();
}

std::vector<double> FunctionPredictor::PredictProba(const Matrix& rows) const {
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = fn_(rows.row(i));
  return out;
}

int DecisionTree::depth() const {
  // Nodes are stored parent-before-child, so one forward pass suffices.
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes_[i].feature >= 0) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return best;
}

std::vector<double> ForestModel::PredictProba(const Matrix& rows) const {
  Require(rows.cols() == schema_.size(), "ForestModel: row width mismatch");
  return kernels::parallel::ForestPredict(trees_, rows);
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child Gini
};

double Gini(double pos, double total) {
  if (total <= 0.0) return 0.0;
  const double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> labels,
              const ForestConfig& config, int max_features, Rng& rng)
      : x_(x), labels_(labels), config_(config), max_features_(max_features),
        rng_(rng) {}

  DecisionTree Build(std::vector<std::size_t> samples) {
    nodes_.clear();
    Grow(std::move(samples), 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  int Grow(std::vector<std::size_t> samples, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double pos = 0.0;
    for (auto s : samples) pos += labels_[s];
    const double total = static_cast<double>(samples.size());
    nodes_[id].value = pos / total;

    const bool pure = pos == 0.0 || pos == total;
    if (pure || depth >= config_.max_depth ||
        samples.size() < 2 * static_cast<std::size_t>(config_.min_samples_leaf)) {
      return id;
    }
    const Split split = BestSplit(samples, pos);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto s : samples) {
      (x_(s, split.feature) <= split.threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    const int l = Grow(std::move(left), depth + 1);
    nodes_[id].left = l;
    const int r = Grow(std::move(right), depth + 1);
    nodes_[id].right = r;
    return id;
  }

  Split BestSplit(const std::vector<std::size_t>& samples, double pos_total) {
    const std::size_t d = x_.cols();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    std::shuffle(features.begin(), features.end(), rng_);
    features.resize(static_cast<std::size_t>(max_features_));

    const double total = static_cast<double>(samples.size());
    const auto min_leaf = static_cast<std::size_t>(config_.min_samples_leaf);
    Split best;
    best.impurity = Gini(pos_total, total);
    std::vector<std::pair<double, int>> column(samples.size());
    for (std::size_t f : features) {
      for (std::size_t i = 0; i < samples.size(); ++i) {
        column[i] = {x_(samples[i], f), labels_[samples[i]]};
      }
      std::sort(column.begin(), column.end());
      double left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left_pos += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const std::size_t n_left = i + 1;
        if (n_left < min_leaf || column.size() - n_left < min_leaf) continue;
        const double nl = static_cast<double>(n_left);
        const double nr = total - nl;
        const double impurity =
            (nl * Gini(left_pos, nl) + nr * Gini(pos_total - left_pos, nr)) / total;
        if (impurity < best.impurity - 1e-12) {
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (column[i].first + column[i + 1].first);
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> labels_;
  const ForestConfig& config_;
  int max_features_;
  Rng& rng_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

ForestModel TrainForest(const FeatureSchema& schema, const Matrix& x,
                        std::span<const int> labels, const ForestConfig& config) {
  Require(x.rows() == labels.size(), "TrainForest: label count mismatch");
  Require(x.cols() == schema.size(), "TrainForest: schema width mismatch");
  Require(config.n_trees >= 1 && config.max_depth >= 1 &&
              config.min_samples_leaf >= 1,
          "TrainForest: invalid configuration");
  if (x.rows() < 2) Fail(ErrorCode::kData, "TrainForest: need at least two rows");
  std::size_t positives = 0;
  for (int y : labels) {
    Require(y == 0 || y == 1, "TrainForest: labels must be 0/1");
    positives += static_cast<std::size_t>(y);
  }
  if (positives == 0 || positives == labels.size()) {
    Fail(ErrorCode::kData, "TrainForest: labels contain a single class");
  }
  const int d = static_cast<int>(x.cols());
  const int max_features =
      config.max_features > 0
          ? std::min(config.max_features, d)
          : std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d)))));

  std::vector<DecisionTree> trees(static_cast<std::size_t>(config.n_trees));
  const std::size_t n = x.rows();
  // Trees are independent given their derived seeds.
#pragma omp parallel for num_threads(kernels::NumThreads()) schedule(dynamic, 1)
  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng(DeriveSeed(config.seed, static_cast<std::uint64_t>(t)));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> bootstrap(n);
    for (auto& s : bootstrap) s = pick(rng);
    TreeBuilder builder(x, labels, config, max_features, rng);
    trees[static_cast<std::size_t>(t)] = builder.Build(std::move(bootstrap));
  }
  return ForestModel(schema, config, std::move(trees));
}

double Accuracy(const Predictor& model, const Matrix& x, std::span<const int> labels) {
  Require(x.rows() == labels.size() && !labels.empty(), "Accuracy: size mismatch");
  const auto p = model.PredictProba(x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    correct += static_cast<std::size_t>((p[i] >= 0.5 ? 1 : 0) == labels[i]);
  }
  return static_cast<double>(correct) / static_cast<double>(p.size());
}

}  // namespace rankfuse
