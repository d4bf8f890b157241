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

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "theta_kernels/pgf.hpp"

namespace theta_kernels {

inline constexpr int kDefaultQuadNodes = 200;
inline constexpr int kDefaultHermiteOrder = 64;

/// Orthonormal probabilists' Hermite polynomial h_k(x).
double hermite_eval(int k, double x);
/// Writes h_0(x), …, h_{n-1}(x) into `out` (n = out.size()).
void hermite_values(double x, std::span<double> out);

enum class ReferenceKind { kLinear, kRelu, kPrelu };

/// A square-integrable activation: either a Hermite series Σ √p_k h_k or a
/// closed-form reference (linear, ReLU, PReLU) scaled so that E[φ²(X)] = 1.
class Activation {
 public:
  static Activation hermite_series(std::span<const double> p, double tail_bound = 0.0);
  static Activation linear();
  static Activation relu();
  static Activation prelu(double slope);

  bool is_series() const { return !reference_; }
  /// √p_k of a series activation.
  std::span<const double> hermite_coefficients() const { return sqrt_p_; }
  /// Probability mass dropped by truncation, carried as metadata.
  double tail_bound() const { return tail_bound_; }

  ReferenceKind reference_kind() const;
  double slope() const { return slope_; }
  double normalization() const { return normalization_; }
  /// Points where φ is not smooth; quadrature panels are split there.
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::string name() const;

  double operator()(double x) const;

  /// E[φ(X)φ(Z)] at correlation s, when available in closed form
  /// (reference activations, and series activations via Σ p_k s^k).
  std::optional<double> closed_form_dual(double s) const;

 private:
  Activation() = default;

  std::optional<ReferenceKind> reference_;
  std::vector<double> sqrt_p_;
  double tail_bound_ = 0.0;
  double slope_ = 1.0;
  double normalization_ = 1.0;
  std::vector<double> breakpoints_;
};

Activation activation_from_coefficients(std::span<const double> p, double tail_bound = 0.0);
double activation_eval(const Activation& act, double x);

/// E[φ²(X)] under the standard normal.
double activation_second_moment(const Activation& act, int quad_nodes = kDefaultQuadNodes);

/// p_k = (E[φ(X) h_k(X)])² for k ≤ k_max. Smooth activations use the
/// `quad_nodes`-point Gauss–Hermite rule; kinked ones a panel rule split at
/// the kinks. Throws NotSquareIntegrableWithinBudget if E[φ²] > 1 + 1e-8.
std::vector<double> activation_to_pgf(const Activation& act, int k_max = kDefaultHermiteOrder,
                                      int quad_nodes = kDefaultQuadNodes);

/// activation_to_pgf packaged as a series Pgf with tail E[φ²] - Σ p_k.
/// p_k from a tabulated curve (x_i ascending, φ(x_i)) by the trapezoid rule
/// against the Gaussian density. The grid must cover the Gaussian bulk.
std::vector<double> tabulated_activation_to_pgf(std::span<const double> xs,
                                                std::span<const double> phis, int k_max);

Pgf activation_pgf(const Activation& act, int k_max = kDefaultHermiteOrder,
                   int quad_nodes = kDefaultQuadNodes);

/// E[φ(X)φ(Z)] for (X, Z) standard bivariate normal with correlation s, by
/// tensor quadrature with Z = sX + √(1-s²)Y.
double bivariate_expectation(const Activation& act, double s, int quad_nodes = kDefaultQuadNodes);

/// CSV with header "x,phi" on the grid x_min, x_min + step, …, x_max.
void write_activation_curve(std::ostream& out, const Activation& act, double x_min, double x_max,
                            double step);

/// The grid used by write_activation_curve.
std::vector<double> curve_grid(double x_min, double x_max, double step);

}  // namespace theta_kernels
