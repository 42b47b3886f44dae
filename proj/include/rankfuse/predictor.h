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

#ifndef RANKFUSE_PREDICTOR_H_
#define RANKFUSE_PREDICTOR_H_

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "rankfuse/core.h"
#include "rankfuse/matrix.h"

namespace rankfuse {

// Black-box binary classifier. PredictProba returns the positive-class
// probability per row and must be safe to call concurrently (read-only).
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual const FeatureSchema& schema() const = 0;
  virtual std::vector<double> PredictProba(const Matrix& rows) const = 0;

  double PredictOne(std::span<const double> x) const;
};

// Adapts a per-row function; handy for analytic test models.
class FunctionPredictor final : public Predictor {
 public:
  using RowFn = std::function<double(std::span<const double>)>;

  FunctionPredictor(FeatureSchema schema, RowFn fn)
      : schema_(std::move(schema)), fn_(std::move(fn)) {}

  const FeatureSchema& schema() const override { return schema_; }
  std::vector<double> PredictProba(const Matrix& rows) const override;

 private:
  FeatureSchema schema_;
  RowFn fn_;
};

}  // namespace rankfuse

#endif  // RANKFUSE_PREDICTOR_H_
