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

#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "theta_kernels/pgf.hpp"

namespace theta_kernels {

/// ⟨x/‖x‖, z/‖z‖⟩ clamped to [-1, 1]. Symmetric in its arguments bit for bit.
double correlation(std::span<const double> x, std::span<const double> z);

/// Closed-form n-fold iterate of a θ PGF at ρ, one formula per table case.
double table1_closed_form(const ThetaForm& f, std::int64_t n, double rho);

/// f∘…∘f (n times) at ρ, evaluated one composition at a time.
double pure_kernel_recursive(const Pgf& f, std::int64_t n, double rho);
/// Pure compositional kernel at correlation ρ: closed form for θ PGFs, recursion otherwise.
double pure_kernel_at(const Pgf& f, std::int64_t n, double rho);
double pure_kernel_eval(const Pgf& f, std::int64_t n, std::span<const double> x,
                        std::span<const double> z);

/// f_n∘…∘f_1 at ρ; fs.front() is applied first.
double mixed_kernel_at(std::span<const Pgf> fs, double rho);
/// Values of f_k∘…∘f_1 at ρ for k = 1..n.
std::vector<double> mixed_kernel_prefix(std::span<const Pgf> fs, double rho);
double mixed_kernel_eval(std::span<const Pgf> fs, std::span<const double> x,
                         std::span<const double> z);

/// The critical θ PGFs 1 - ((1-s)^{-θ} + c_k)^{-1/θ}, k = 1..n.
std::vector<Pgf> cmixed_pgfs(double theta, std::span<const double> c);
/// 1 - ((1-ρ)^{-θ} + c_sum)^{-1/θ}.
double cmixed_closed_form(double theta, double c_sum, double rho);
double cmixed_kernel_at(double theta, std::span<const double> c, double rho);
double cmixed_kernel_eval(double theta, std::span<const double> c, std::span<const double> x,
                          std::span<const double> z);

/// Case-2 θ PGF g_k with c̄ = (c_1 + … + c_k)/k; its k-fold iterate equals
/// the first k c-mixed layers.
Pgf cmixed_pure_representation(double theta, std::span<const double> c, std::size_t k);

/// Infinite-depth limit of a pure θ compositional kernel at ρ.
double kernel_limit(const Pgf& pure_theta, double rho);

enum class SumBehavior { kUnknown, kConverges, kDiverges };

/// Infinite c-mixed kernel: θ plus what is known about Σ_{k≥1} c_k.
struct CMixedLimit {
  double theta = 1.0;
  SumBehavior behavior = SumBehavior::kUnknown;
  double c_sum = 0.0;  // used when behavior == kConverges
};

double kernel_limit(const CMixedLimit& spec, double rho);

enum class KernelKind { kPure, kMixed, kCMixed };

/// A compositional kernel. Immutable; evaluation is thread-safe.
class KernelSpec {
 public:
  static KernelSpec pure(Pgf f, std::int64_t depth);
  static KernelSpec mixed(std::vector<Pgf> innermost_first);
  static KernelSpec cmixed(double theta, std::vector<double> c);

  KernelKind kind() const { return kind_; }
  /// Layer PGFs: the single PGF for pure, all layers for mixed, the f_k for c-mixed.
  std::span<const Pgf> layers() const { return layers_; }
  std::int64_t depth() const { return depth_; }
  double theta() const { return theta_; }
  std::span<const double> c_sequence() const { return c_; }

  /// Kernel value as a function of the correlation ρ ∈ [-1, 1].
  double at(double rho) const;
  /// Analytic continuation of the kernel's generating function into the unit disk.
  std::complex<double> at(std::complex<double> s) const;

  double operator()(std::span<const double> x, std::span<const double> z) const {
    return at(correlation(x, z));
  }

 private:
  KernelSpec() = default;

  KernelKind kind_ = KernelKind::kPure;
  std::vector<Pgf> layers_;
  std::int64_t depth_ = 1;
  double theta_ = 1.0;
  std::vector<double> c_;
  double c_sum_ = 0.0;
};

/// G[i][j] = kernel(points[i], points[j]), computed once per unordered pair.
Eigen::MatrixXd gram(const KernelSpec& spec, const std::vector<std::vector<double>>& points);

/// r(m, k): number of degree-k spherical harmonics in ℝ^m; r(m, 0) = 1.
std::uint64_t sphere_multiplicity(int m, int k);
/// Surface area 2π^{m/2}/Γ(m/2) of the unit sphere in ℝ^m.
double sphere_surface_area(int m);

struct EigenEntry {
  int k = 0;
  double p = 0.0;
  double lambda = 0.0;
  std::uint64_t multiplicity = 1;
};

struct Eigensystem {
  int dimension = 0;
  std::vector<EigenEntry> entries;
};

/// Eigenvalues λ_k = 2 p_k π^{m/2} / (Γ(m/2) r(m,k)) with p_k extracted from
/// the kernel's generating function by the contour rule.
Eigensystem eigensystem(const KernelSpec& spec, int m, int k_max);

}  // namespace theta_kernels
