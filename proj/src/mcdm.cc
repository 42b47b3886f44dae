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

#include "rankfuse/mcdm.h"

#include <algorithm>
#include <cmath>

#include "rankfuse/error.h"

namespace rankfuse::mcdm {

const char* DirectionName(Direction d) { return d == Direction::kBenefit ? "benefit" : "cost"; }

Direction ParseDirection(const std::string& name) {
  if (name == "benefit") return Direction::kBenefit;
  if (name == "cost") return Direction::kCost;
  Fail(ErrorCode::kInvalidArgument, "unknown criterion direction '" + name + "'");
}

const char* MethodName(Method m) { return m == Method::kTopsis ? "topsis" : "edas"; }

Method ParseMethod(const std::string& name) {
  if (name == "topsis") return Method::kTopsis;
  if (name == "edas") return Method::kEdas;
  Fail(ErrorCode::kConfig, "unknown MCDM method '" + name + "'");
}

void DecisionMatrix::Validate() const {
  Require(values.rows() >= 2, "DecisionMatrix: need at least two alternatives");
  Require(values.cols() >= 1, "DecisionMatrix: need at least one criterion");
  Require(directions.size() == values.cols(), "DecisionMatrix: direction count mismatch");
  Require(criterion_weights.size() == values.cols(), "DecisionMatrix: weight count mismatch");
  for (double v : values.data()) Require(std::isfinite(v), "DecisionMatrix: non-finite value");
}

McdmResult Topsis(const DecisionMatrix& dm) {
  dm.Validate();
  const std::size_t m = dm.values.rows();
  const std::size_t n = dm.values.cols();
  McdmResult result;
  result.method = Method::kTopsis;

  Matrix v(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    auto col = dm.values.column(j);
    const double lo = *std::min_element(col.begin(), col.end());
    if (lo < 0.0) {
      for (double& x : col) x = x - lo + kShiftEpsilon;
      result.notes.push_back("criterion " + std::to_string(j) + " shifted to nonnegative");
    }
    double norm = 0.0;
    for (double x : col) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      result.notes.push_back("criterion " + std::to_string(j) + " is all zero");
      continue;  // r_ij = 0
    }
    for (std::size_t i = 0; i < m; ++i) {
      v(i, j) = dm.criterion_weights[j] * (col[i] / norm);
    }
  }

  std::vector<double> best(n), worst(n);
  for (std::size_t j = 0; j < n; ++j) {
    double hi = v(0, j), lo = v(0, j);
    for (std::size_t i = 1; i < m; ++i) {
      hi = std::max(hi, v(i, j));
      lo = std::min(lo, v(i, j));
    }
    const bool benefit = dm.directions[j] == Direction::kBenefit;
    best[j] = benefit ? hi : lo;
    worst[j] = benefit ? lo : hi;
  }

  result.scores.resize(m);
  bool degenerate = false;
  for (std::size_t i = 0; i < m; ++i) {
    double s_plus = 0.0, s_minus = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s_plus += (v(i, j) - best[j]) * (v(i, j) - best[j]);
      s_minus += (v(i, j) - worst[j]) * (v(i, j) - worst[j]);
    }
    s_plus = std::sqrt(s_plus);
    s_minus = std::sqrt(s_minus);
    if (s_plus + s_minus == 0.0) {
      result.scores[i] = 0.5;
      degenerate = true;
    } else {
      result.scores[i] = s_minus / (s_plus + s_minus);
    }
  }
  if (degenerate) result.notes.push_back("zero total separation; closeness set to 0.5");
  return result;
}

McdmResult Edas(const DecisionMatrix& dm) {
  dm.Validate();
  const std::size_t m = dm.values.rows();
  const std::size_t n = dm.values.cols();
  McdmResult result;
  result.method = Method::kEdas;

  std::vector<double> average(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) average[j] += dm.values(i, j);
    average[j] /= static_cast<double>(m);
  }
  std::vector<double> sp(m, 0.0), sn(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double above = dm.values(i, j) - average[j];
      const bool benefit = dm.directions[j] == Direction::kBenefit;
      const double pda = std::max(0.0, benefit ? above : -above);
      const double nda = std::max(0.0, benefit ? -above : above);
      sp[i] += dm.criterion_weights[j] * pda;
      sn[i] += dm.criterion_weights[j] * nda;
    }
  }
  const double max_sp = *std::max_element(sp.begin(), sp.end());
  const double max_sn = *std::max_element(sn.begin(), sn.end());
  if (max_sp == 0.0) result.notes.push_back("max SP is zero; NSP set to 0");
  if (max_sn == 0.0) result.notes.push_back("max SN is zero; NSN set to 1");
  result.scores.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (max_sp == 0.0 && max_sn == 0.0) {
      result.scores[i] = 0.5;
      continue;
    }
    const double nsp = max_sp == 0.0 ? 0.0 : sp[i] / max_sp;
    const double nsn = max_sn == 0.0 ? 1.0 : 1.0 - sn[i] / max_sn;
    result.scores[i] = 0.5 * (nsp + nsn);
  }
  return result;
}

McdmResult Score(Method method, const DecisionMatrix& dm) {
  return method == Method::kTopsis ? Topsis(dm) : Edas(dm);
}

Weights ScoresToWeights(const McdmResult& result) {
  Require(!result.scores.empty(), "ScoresToWeights: no scores");
  double total = 0.0;
  for (double s : result.scores) {
    Require(std::isfinite(s) && s >= 0.0, "ScoresToWeights: negative or non-finite score");
    total += s;
  }
  if (total == 0.0) return Weights::Uniform(result.scores.size());
  std::vector<double> w(result.scores.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = result.scores[i] / total;
  return Weights(std::move(w));
}

}  // namespace rankfuse::mcdm
