// Copyright 2026 The theta-kernels Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "theta_kernels/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "theta_kernels/errors.hpp"
#include "theta_kernels/io.hpp"

namespace theta_kernels {

namespace {

Eigen::VectorXd unit_row(std::span<const double> v) {
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  const double norm = x.norm();
  if (norm == 0.0 || !std::isfinite(norm)) throw ZeroVector("GP input is the zero vector");
  return x / norm;
}

Eigen::MatrixXd normalized_rows(const std::vector<std::vector<double>>& points, std::size_t dim) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw DimensionMismatch(
          fmt::format("point {} has {} coordinates, expected {}", i, points[i].size(), dim));
    }
    out.row(static_cast<Eigen::Index>(i)) = unit_row(points[i]).transpose();
  }
  return out;
}

double kernel_between(const KernelSpec& spec, const Eigen::MatrixXd& a, Eigen::Index i,
                      const Eigen::MatrixXd& b, Eigen::Index j) {
  const double rho = std::clamp(a.row(i).dot(b.row(j)), -1.0, 1.0);
  return spec.at(rho);
}

}  // namespace

GpModel fit(const KernelSpec& spec, const std::vector<std::vector<double>>& inputs,
            std::span<const double> targets, double noise) {
  if (inputs.empty()) throw ValidationError("GP fit needs at least one training point");
  if (inputs.size() != targets.size()) {
    throw DimensionMismatch(
        fmt::format("{} inputs but {} targets", inputs.size(), targets.size()));
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw ValidationError(fmt::format("noise variance {} must be finite and >= 0", noise));
  }
  const std::size_t dim = inputs.front().size();
  if (dim == 0) throw DimensionMismatch("GP inputs have no coordinates");

  GpModel model(spec);
  model.inputs_ = normalized_rows(inputs, dim);
  model.targets_ = Eigen::Map<const Eigen::VectorXd>(targets.data(),
                                                     static_cast<Eigen::Index>(targets.size()));
  model.noise_ = noise;

  const auto n = model.inputs_.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = kernel_between(spec, model.inputs_, i, model.inputs_, j);
    }
  }
  const double mean_diag = k.trace() / static_cast<double>(n);

  for (int level = 0; level < static_cast<int>(std::size(kJitterLadder)); ++level) {
    const double jitter = kJitterLadder[level] * mean_diag;
    Eigen::MatrixXd shifted = k;
    shifted.diagonal().array() += noise + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::VectorXd pivots = llt.matrixLLT().diagonal();
    const double min_pivot_sq = pivots.array().square().minCoeff();
    const double max_diag = shifted.diagonal().maxCoeff();
    if (!(min_pivot_sq > 16.0 * std::numeric_limits<double>::epsilon() * max_diag)) continue;
    model.llt_ = std::move(llt);
    model.alpha_ = model.llt_.solve(model.targets_);
    model.jitter_ = jitter;
    model.jitter_level_ = level;
    return model;
  }
  throw FactorizationFailed(fmt::format(
      "Gram matrix not positive definite after jitter {}·trace/n", kJitterLadder[3]));
}

GpPrediction predict(const GpModel& model, const std::vector<std::vector<double>>& queries) {
  GpPrediction out;
  if (queries.empty()) return out;
  const Eigen::MatrixXd q = normalized_rows(queries, model.dimension());
  const auto n = model.inputs().rows();
  const auto m = q.rows();

  Eigen::MatrixXd kstar(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) kstar(i, j) = kernel_between(model.spec(), model.inputs(), i, q, j);
  }
  const Eigen::VectorXd means = kstar.transpose() * model.alpha();
  // v = L^{-1} k*, so k*ᵀ (K+σ²I)^{-1} k* = ‖v‖².
  const Eigen::MatrixXd l = model.factor();
  const Eigen::MatrixXd v = l.triangularView<Eigen::Lower>().solve(kstar);
  const double prior = model.spec().at(1.0);

  out.means.assign(means.data(), means.data() + m);
  out.variances.resize(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    double var = prior - v.col(j).squaredNorm();
    if (var < 0.0) {
      var = 0.0;
      ++out.clamped;
    }
    out.variances[static_cast<std::size_t>(j)] = var;
  }
  return out;
}

TrainingData read_training_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  TrainingData data;
  for (const auto& row : table.rows) {
    if (row.size() < 2) throw ValidationError("training rows need at least one coordinate and a target");
    data.inputs.emplace_back(row.begin(), row.end() - 1);
    data.targets.push_back(row.back());
  }
  if (data.inputs.empty()) throw ValidationError("training CSV has no rows");
  return data;
}

std::vector<std::vector<double>> read_query_csv(std::istream& in) {
  return read_csv(in).rows;
}

void write_prediction_csv(std::ostream& out, const GpPrediction& prediction) {
  out << "mean,variance\n";
  for (std::size_t i = 0; i < prediction.means.size(); ++i) {
    out << format_number(prediction.means[i]) << ',' << format_number(prediction.variances[i])
        << '\n';
  }
}

}  // namespace theta_kernels
