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

#ifndef RANKFUSE_PERTURB_H_
#define RANKFUSE_PERTURB_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/dataset.h"
#include "rankfuse/matrix.h"

namespace rankfuse {

// Dense layer y = W x + b with W stored row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

struct AutoencoderConfig {
  std::size_t latent_dim = 0;  // 0 selects ceil(d / 2)
  int epochs = 500;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

// d -> tanh(h) -> q -> tanh(h) -> d, h = ceil((d + q) / 2), linear outputs.
class AutoencoderModel {
 public:
  static constexpr int kFormatVersion = 1;

  AutoencoderModel() = default;
  AutoencoderModel(std::uint64_t schema_hash, std::vector<DenseLayer> layers,
                   std::vector<double> loss_trace);

  std::size_t input_dim() const { return layers_.front().in; }
  std::size_t latent_dim() const { return layers_[1].out; }
  std::size_t hidden_dim() const { return layers_.front().out; }
  std::uint64_t schema_hash() const { return schema_hash_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  const std::vector<double>& loss_trace() const { return loss_trace_; }

  Matrix Encode(const Matrix& rows) const;
  std::vector<double> Encode(std::span<const double> x) const;
  Matrix Reconstruct(const Matrix& rows) const;

  // Mean over rows of the squared reconstruction error norm.
  double ReconstructionLoss(const Matrix& rows) const;

  std::string ToJson() const;
  static AutoencoderModel FromJson(const std::string& text);

  bool operator==(const AutoencoderModel&) const = default;

 private:
  std::uint64_t schema_hash_ = 0;
  std::vector<DenseLayer> layers_;  // enc hidden, enc out, dec hidden, dec out
  std::vector<double> loss_trace_;
};

// Full-batch Adam on the mean squared reconstruction error. Deterministic
// for a fixed seed. Throws kComputation if the loss becomes non-finite.
AutoencoderModel TrainAutoencoder(const Dataset& data, const AutoencoderConfig& config);

struct NoiseConfig {
  std::size_t k_neighbors = 5;
  std::size_t m_features = 0;  // 0 selects ceil(d / 4)
  std::uint64_t seed = 0;
};

// Resolves defaults and checks 1 <= m <= d, 1 <= K < n.
NoiseConfig ResolveNoiseConfig(const NoiseConfig& config, std::size_t n_rows,
                               std::size_t d);

// K rows nearest to x in latent space, ties by row index. The first row equal
// to x in input space, if any, is excluded.
std::vector<std::size_t> LatentNeighbors(const AutoencoderModel& model,
                                         const Dataset& data,
                                         std::span<const double> x, std::size_t k);

// Each row gets m randomly chosen cells overwritten with the values of one
// donor drawn uniformly from its K latent neighbors.
Dataset PerturbDataset(const Dataset& data, const AutoencoderModel& model,
                       const NoiseConfig& config);

}  // namespace rankfuse

#endif  // RANKFUSE_PERTURB_H_
