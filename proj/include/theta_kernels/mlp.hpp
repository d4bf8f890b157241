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

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "theta_kernels/activation.hpp"

namespace theta_kernels {

/// Finite-width pure or mixed MLP with per-layer output normalization and
/// i.i.d. standard Gaussian weights.
struct MlpConfig {
  /// h_0, …, h_{n+1}.
  std::vector<std::size_t> widths;
  /// One activation (pure MLP) or n activations φ^(1)..φ^(n) (mixed MLP).
  std::vector<Activation> activations;
  std::uint64_t seed = 0;

  static MlpConfig pure(std::vector<std::size_t> widths, Activation act, std::uint64_t seed);
  static MlpConfig mixed(std::vector<std::size_t> widths, std::vector<Activation> acts,
                         std::uint64_t seed);

  /// Number of hidden layers n.
  std::size_t hidden_layers() const { return widths.size() < 2 ? 0 : widths.size() - 2; }
  /// η = h_0 h_1 + … + h_n h_{n+1}.
  std::size_t weight_count() const;
  /// φ^(layer) for layer in 1..n.
  const Activation& activation(std::size_t layer) const;
  bool is_pure() const { return activations.size() == 1; }

  void validate() const;
};

/// W^(0)..W^(n), each h_{k+1} × h_k, from the stream keyed by (seed, seed_offset, k).
std::vector<Eigen::MatrixXd> draw_weights(const MlpConfig& config, std::uint64_t seed_offset);

/// x^(n+1) for the given weights: x^(k+1) = φ^(k+1)(W^(k) x^(k)/‖x^(k)‖), final layer affine.
std::vector<double> mlp_forward(const MlpConfig& config, std::span<const Eigen::MatrixXd> weights,
                                std::span<const double> input);

/// One realization of the random field at `input`.
std::vector<double> sample_mlp_output(const MlpConfig& config, std::span<const double> input,
                                      std::uint64_t seed_offset);

enum class Sampler {
  /// Per layer, draws the h_{k+1} row pairs (w·u, w·v) directly as bivariate
  /// normals with correlation ⟨u, v⟩. Same joint law of (F(x), F(z)) as
  /// materializing W, at O(width) instead of O(width²) cost per layer.
  kPairwise,
  /// Materializes every weight matrix and runs mlp_forward on both inputs.
  kFullWeights,
};

struct EstimateOptions {
  Sampler sampler = Sampler::kPairwise;
  /// 0 selects default_thread_count().
  unsigned threads = 0;
};

/// Worker count from THETA_KERNELS_THREADS, else hardware parallelism.
unsigned default_thread_count();

struct KernelEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t num_samples = 0;
  std::vector<std::size_t> width_profile;
};

/// Monte Carlo estimate of E[F(x)_i F(z)_i], averaged over weight draws and
/// output coordinates. Bitwise reproducible for fixed inputs regardless of
/// the worker count.
KernelEstimate empirical_kernel(const MlpConfig& config, std::span<const double> x,
                                std::span<const double> z, std::size_t num_samples,
                                const EstimateOptions& options = {});

/// Infinite-width covariance of the normalized MLP at input correlation ρ:
/// the mixed kernel of the layer PGFs f_k/E[φ_k²] (activation_to_pgf with
/// k_max terms). Equals 𝒦_{1:n}(ρ) whenever every E[φ_k²] = 1.
double limiting_kernel(const MlpConfig& config, double rho, int k_max = kDefaultHermiteOrder,
                       int quad_nodes = kDefaultQuadNodes);

struct StudyRow {
  std::size_t width = 0;
  KernelEstimate estimate;
  double reference = 0.0;
  double gap = 0.0;
};

struct StudyReport {
  double rho = 0.0;
  std::vector<StudyRow> rows;
};

/// Sets every hidden width of `base` to each entry of `widths` (strictly
/// increasing) and compares the estimate with limiting_kernel.
StudyReport convergence_study(const MlpConfig& base, std::span<const std::size_t> widths,
                              std::span<const double> x, std::span<const double> z,
                              std::size_t num_samples, const EstimateOptions& options = {});

/// CSV with header width,estimate,se,reference,gap.
void write_study_csv(std::ostream& out, const StudyReport& report);
/// JSON document {"rho": ..., "rows": [{width, estimate, se, reference, gap, num_samples}]}.
void write_study_json(std::ostream& out, const StudyReport& report);

}  // namespace theta_kernels
