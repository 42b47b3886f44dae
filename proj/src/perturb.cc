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

#include "rankfuse/perturb.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "json.hpp"
#include "rankfuse/error.h"
#include "rankfuse/kernels.h"
#include "rankfuse/random.h"

namespace rankfuse {
namespace {

using EMatrix = Eigen::MatrixXd;
using EVector = Eigen::VectorXd;
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

EMatrix Weights(const DenseLayer& layer) {
  return RowMajorMap(layer.weights.data(), static_cast<Eigen::Index>(layer.out),
                     static_cast<Eigen::Index>(layer.in));
}

EVector Bias(const DenseLayer& layer) {
  return Eigen::Map<const EVector>(layer.bias.data(), static_cast<Eigen::Index>(layer.out));
}

// Columns are samples.
EMatrix ToColumns(const Matrix& rows) {
  EMatrix a(static_cast<Eigen::Index>(rows.cols()), static_cast<Eigen::Index>(rows.rows()));
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = rows(r, c);
    }
  }
  return a;
}

Matrix FromColumns(const EMatrix& a) {
  Matrix m(static_cast<std::size_t>(a.cols()), static_cast<std::size_t>(a.rows()));
  for (Eigen::Index r = 0; r < a.cols(); ++r) {
    for (Eigen::Index c = 0; c < a.rows(); ++c) {
      m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = a(c, r);
    }
  }
  return m;
}

struct Params {
  EMatrix w[4];
  EVector b[4];
};

struct Activations {
  EMatrix h1, z, h2, y;
};

Activations Forward(const Params& p, const EMatrix& a) {
  Activations act;
  act.h1 = ((p.w[0] * a).colwise() + p.b[0]).array().tanh().matrix();
  act.z = (p.w[1] * act.h1).colwise() + p.b[1];
  act.h2 = ((p.w[2] * act.z).colwise() + p.b[2]).array().tanh().matrix();
  act.y = (p.w[3] * act.h2).colwise() + p.b[3];
  return act;
}

Params ToParams(const std::vector<DenseLayer>& layers) {
  Params p;
  for (int i = 0; i < 4; ++i) {
    p.w[i] = Weights(layers[static_cast<std::size_t>(i)]);
    p.b[i] = Bias(layers[static_cast<std::size_t>(i)]);
  }
  return p;
}

std::vector<DenseLayer> ToLayers(const Params& p) {
  std::vector<DenseLayer> layers(4);
  for (int i = 0; i < 4; ++i) {
    auto& l = layers[static_cast<std::size_t>(i)];
    l.out = static_cast<std::size_t>(p.w[i].rows());
    l.in = static_cast<std::size_t>(p.w[i].cols());
    l.weights.resize(l.out * l.in);
    for (std::size_t r = 0; r < l.out; ++r) {
      for (std::size_t c = 0; c < l.in; ++c) {
        l.weights[r * l.in + c] =
            p.w[i](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
    l.bias.assign(p.b[i].data(), p.b[i].data() + l.out);
  }
  return layers;
}

class Adam {
 public:
  Adam(const Params& shape, double lr) : lr_(lr) {
    for (int i = 0; i < 4; ++i) {
      mw_[i] = EMatrix::Zero(shape.w[i].rows(), shape.w[i].cols());
      vw_[i] = mw_[i];
      mb_[i] = EVector::Zero(shape.b[i].size());
      vb_[i] = mb_[i];
    }
  }

  void Step(Params& p, const Params& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (int i = 0; i < 4; ++i) {
      Update(p.w[i], grad.w[i], mw_[i], vw_[i], c1, c2);
      Update(p.b[i], grad.b[i], mb_[i], vb_[i], c1, c2);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  template <typename T>
  void Update(T& param, const T& g, T& m, T& v, double c1, double c2) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
  }

  double lr_;
  int t_ = 0;
  EMatrix mw_[4], vw_[4];
  EVector mb_[4], vb_[4];
};

}  // namespace

AutoencoderModel::AutoencoderModel(std::uint64_t schema_hash,
                                   std::vector<DenseLayer> layers,
                                   std::vector<double> loss_trace)
    : schema_hash_(schema_hash),
      layers_(std::move(layers)),
      loss_trace_(std::move(loss_trace)) {
  Require(layers_.size() == 4, "AutoencoderModel: expected four layers");
  for (std::size_t i = 0; i < 4; ++i) {
    Require(layers_[i].weights.size() == layers_[i].in * layers_[i].out &&
                layers_[i].bias.size() == layers_[i].out,
            "AutoencoderModel: layer shape mismatch");
    if (i > 0) Require(layers_[i].in == layers_[i - 1].out, "AutoencoderModel: layer chain mismatch");
  }
  Require(layers_[3].out == layers_[0].in, "AutoencoderModel: output width != input width");
  Require(latent_dim() < input_dim(), "AutoencoderModel: latent width must be < input width");
}

Matrix AutoencoderModel::Encode(const Matrix& rows) const {
  Require(rows.cols() == input_dim(), "Encode: width mismatch");
  if (rows.empty()) return Matrix(0, latent_dim());
  const Params p = ToParams(layers_);
  const EMatrix a = ToColumns(rows);
  const EMatrix h1 = ((p.w[0] * a).colwise() + p.b[0]).array().tanh().matrix();
  return FromColumns((p.w[1] * h1).colwise() + p.b[1]);
}

std::vector<double> AutoencoderModel::Encode(std::span<const double> x) const {
  Matrix m(1, x.size());
  std::copy(x.begin(), x.end(), m.row(0).begin());
  return Encode(m).data();
}

Matrix AutoencoderModel::Reconstruct(const Matrix& rows) const {
  Require(rows.cols() == input_dim(), "Reconstruct: width mismatch");
  return FromColumns(Forward(ToParams(layers_), ToColumns(rows)).y);
}

double AutoencoderModel::ReconstructionLoss(const Matrix& rows) const {
  const EMatrix a = ToColumns(rows);
  const EMatrix y = Forward(ToParams(layers_), a).y;
  return (y - a).squaredNorm() / static_cast<double>(rows.rows());
}

std::string AutoencoderModel::ToJson() const {
  nlohmann::json j;
  j["format"] = "rankfuse.autoencoder";
  j["version"] = kFormatVersion;
  j["schema_hash"] = schema_hash_;
  j["latent_dim"] = latent_dim();
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : layers_) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"bias", l.bias}});
  }
  j["layers"] = layers;
  j["loss_trace"] = loss_trace_;
  return j.dump();
}

AutoencoderModel AutoencoderModel::FromJson(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "rankfuse.autoencoder" || j.at("version") != kFormatVersion) {
      Fail(ErrorCode::kData, "autoencoder file: unsupported format or version");
    }
    std::vector<DenseLayer> layers;
    for (const auto& l : j.at("layers")) {
      DenseLayer layer;
      layer.in = l.at("in");
      layer.out = l.at("out");
      layer.weights = l.at("weights").get<std::vector<double>>();
      layer.bias = l.at("bias").get<std::vector<double>>();
      layers.push_back(std::move(layer));
    }
    AutoencoderModel model(j.at("schema_hash").get<std::uint64_t>(), std::move(layers),
                           j.at("loss_trace").get<std::vector<double>>());
    Require(model.latent_dim() == j.at("latent_dim").get<std::size_t>(),
            "autoencoder file: latent width mismatch");
    return model;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kData, std::string("autoencoder file: ") + e.what());
  }
}

AutoencoderModel TrainAutoencoder(const Dataset& data, const AutoencoderConfig& config) {
  const std::size_t d = data.width();
  const std::size_t q = config.latent_dim == 0 ? (d + 1) / 2 : config.latent_dim;
  if (q >= d) Fail(ErrorCode::kConfig, "TrainAutoencoder: latent width must be < feature count");
  if (config.epochs < 1) Fail(ErrorCode::kConfig, "TrainAutoencoder: epochs must be >= 1");
  Require(!data.x.empty(), "TrainAutoencoder: empty dataset");
  const std::size_t h = (d + q + 1) / 2;

  Rng rng(config.seed);
  const std::size_t shapes[4][2] = {{h, d}, {q, h}, {h, q}, {d, h}};
  Params p;
  for (int i = 0; i < 4; ++i) {
    const auto out = static_cast<Eigen::Index>(shapes[i][0]);
    const auto in = static_cast<Eigen::Index>(shapes[i][1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(out + in));
    std::uniform_real_distribution<double> init(-limit, limit);
    p.w[i].resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) p.w[i](r, c) = init(rng);
    }
    p.b[i] = EVector::Zero(out);
  }

  const EMatrix a = ToColumns(data.x);
  const double n = static_cast<double>(data.size());
  Adam adam(p, config.learning_rate);
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.epochs));
  Params grad = p;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const Activations act = Forward(p, a);
    const EMatrix err = act.y - a;
    const double loss = err.squaredNorm() / n;
    if (!std::isfinite(loss)) {
      Fail(ErrorCode::kComputation,
           "TrainAutoencoder: loss diverged at epoch " + std::to_string(epoch));
    }
    trace.push_back(loss);

    const EMatrix g_y = (2.0 / n) * err;
    grad.w[3] = g_y * act.h2.transpose();
    grad.b[3] = g_y.rowwise().sum();
    const EMatrix g_h2 = (p.w[3].transpose() * g_y).cwiseProduct(
        (1.0 - act.h2.array().square()).matrix());
    grad.w[2] = g_h2 * act.z.transpose();
    grad.b[2] = g_h2.rowwise().sum();
    const EMatrix g_z = p.w[2].transpose() * g_h2;
    grad.w[1] = g_z * act.h1.transpose();
    grad.b[1] = g_z.rowwise().sum();
    const EMatrix g_h1 = (p.w[1].transpose() * g_z).cwiseProduct(
        (1.0 - act.h1.array().square()).matrix());
    grad.w[0] = g_h1 * a.transpose();
    grad.b[0] = g_h1.rowwise().sum();
    adam.Step(p, grad);
  }
  return AutoencoderModel(data.schema.Hash(), ToLayers(p), std::move(trace));
}

NoiseConfig ResolveNoiseConfig(const NoiseConfig& config, std::size_t n_rows, std::size_t d) {
  NoiseConfig out = config;
  if (out.m_features == 0) out.m_features = (d + 3) / 4;
  if (out.m_features < 1 || out.m_features > d) {
    Fail(ErrorCode::kConfig, "NoiseConfig: m_features must lie in [1, d]");
  }
  if (out.k_neighbors < 1 || out.k_neighbors >= n_rows) {
    Fail(ErrorCode::kConfig, "NoiseConfig: k_neighbors must lie in [1, n_rows)");
  }
  return out;
}

std::vector<std::size_t> LatentNeighbors(const AutoencoderModel& model, const Dataset& data,
                                         std::span<const double> x, std::size_t k) {
  Require(x.size() == data.width(), "LatentNeighbors: width mismatch");
  Require(k >= 1 && k < data.size(), "LatentNeighbors: K out of range");
  std::size_t self = data.size();
  for (std::size_t r = 0; r < data.size() && self == data.size(); ++r) {
    const auto row = data.x.row(r);
    if (std::equal(row.begin(), row.end(), x.begin())) self = r;
  }
  const Matrix latent = model.Encode(data.x);
  const auto query = model.Encode(x);
  const auto dist = kernels::parallel::SquaredDistances(latent, query);
  return kernels::SelectNearest(dist, k, self);
}

Dataset PerturbDataset(const Dataset& data, const AutoencoderModel& model,
                       const NoiseConfig& config) {
  Require(model.input_dim() == data.width(), "PerturbDataset: model width mismatch");
  Require(model.schema_hash() == data.schema.Hash(), "PerturbDataset: model trained on another schema");
  const NoiseConfig cfg = ResolveNoiseConfig(config, data.size(), data.width());
  const auto neighbors = kernels::parallel::AllNearest(model.Encode(data.x), cfg.k_neighbors);

  Matrix out = data.x;
  const std::size_t d = data.width();
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for num_threads(kernels::NumThreads()) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    Rng rng(DeriveSeed(cfg.seed, row));
    std::uniform_int_distribution<std::size_t> pick(0, cfg.k_neighbors - 1);
    const std::size_t donor = neighbors[row][pick(rng)];
    std::vector<std::size_t> positions(d);
    std::iota(positions.begin(), positions.end(), 0);
    // Partial Fisher-Yates: the first m entries are a uniform m-subset.
    for (std::size_t j = 0; j < cfg.m_features; ++j) {
      std::uniform_int_distribution<std::size_t> swap_with(j, d - 1);
      std::swap(positions[j], positions[swap_with(rng)]);
      out(row, positions[j]) = data.x(donor, positions[j]);
    }
  }
  return data.WithValues(std::move(out));
}

}  // namespace rankfuse
