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

#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "theta_kernels/kernel.hpp"

namespace theta_kernels {

/// Jitter multipliers of trace/n tried in order until the Cholesky factor is usable.
inline constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-8, 1e-6};

/// Zero-mean GP regression with a compositional kernel. Immutable once fitted.
class GpModel {
 public:
  const KernelSpec& spec() const { return spec_; }
  /// Training inputs scaled to unit norm, one per row.
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& targets() const { return targets_; }
  double noise() const { return noise_; }
  /// Lower-triangular factor L with L Lᵀ = K + (σ² + jitter) I.
  Eigen::MatrixXd factor() const { return llt_.matrixL(); }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double jitter() const { return jitter_; }
  /// Index into kJitterLadder that succeeded.
  int jitter_level() const { return jitter_level_; }
  bool jitter_rescued() const { return jitter_level_ > 0; }
  std::size_t size() const { return static_cast<std::size_t>(targets_.size()); }
  std::size_t dimension() const { return static_cast<std::size_t>(inputs_.cols()); }

 private:
  friend GpModel fit(const KernelSpec&, const std::vector<std::vector<double>>&,
                     std::span<const double>, double);

  explicit GpModel(KernelSpec spec) : spec_(std::move(spec)) {}

  KernelSpec spec_;
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  double noise_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  int jitter_level_ = 0;
};

GpModel fit(const KernelSpec& spec, const std::vector<std::vector<double>>& inputs,
            std::span<const double> targets, double noise);

struct GpPrediction {
  std::vector<double> means;
  std::vector<double> variances;
  /// Number of variances raised to 0.
  std::size_t clamped = 0;
};

GpPrediction predict(const GpModel& model, const std::vector<std::vector<double>>& queries);

/// Training rows: input coordinates followed by the target.
struct TrainingData {
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;
};

TrainingData read_training_csv(std::istream& in);
std::vector<std::vector<double>> read_query_csv(std::istream& in);
/// CSV with header mean,variance.
void write_prediction_csv(std::ostream& out, const GpPrediction& prediction);

}  // namespace theta_kernels
