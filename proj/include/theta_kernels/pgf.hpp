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
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace theta_kernels {

/// Admissible parameter regimes of the θ PGF family.
///
///   MainSuper  θ ∈ (0,1], a ≥ 1, c > 0, r = 1
///   MainSub1   θ ∈ (-1,0) ∪ (0,1], a ∈ (0,1), q ∈ [0,1), r = 1, c = (1-a)(1-q)^{-θ}
///   MainSubR   θ ∈ (-1,0) ∪ (0,1], a ∈ (0,1), q ∈ [0,1], r > 1, c = (1-a)(r-q)^{-θ}
///   Zero1      θ = 0, a ∈ (0,1), q ∈ [0,1), r = 1
///   ZeroR      θ = 0, a ∈ (0,1), q ∈ [0,1], r > 1
///   MinusOne   θ = -1, a ∈ (0,1), q ∈ [0,1]
enum class Regime { kMainSuper, kMainSub1, kMainSubR, kZero1, kZeroR, kMinusOne };

std::string_view to_string(Regime regime);

/// Caller-supplied θ PGF parameters.
///
/// In the sub-critical regimes c and q determine each other; supply either
/// one (or both, in which case they must agree to 1e-12). `regime` is
/// inferred when absent and checked when present.
struct ThetaParams {
  double theta = 1.0;
  double a = 1.0;
  std::optional<double> c;
  std::optional<double> q;
  double r = 1.0;
  std::optional<Regime> regime;
};

/// Validated θ PGF parameters with derived quantities resolved.
///
/// `q` is the fixed point of f in [0, 1]; it is 1 for MainSuper. `c` is
/// unused (zero) for the θ = 0 and θ = -1 families.
struct ThetaForm {
  double theta = 1.0;
  double a = 1.0;
  double c = 0.0;
  double q = 1.0;
  double r = 1.0;
  Regime regime = Regime::kMainSuper;

  /// Row of the closed-form iteration table (1..9) this PGF belongs to.
  int table_case() const;
  /// True when evaluation uses the θ = 0 formula (θ = 0, or |θ| < 1e-8 in a sub-critical regime).
  bool uses_zero_formula() const;
};

/// |θ| below which the sub-critical main formula is replaced by its θ → 0 limit.
inline constexpr double kThetaZeroSwitch = 1e-8;

struct SeriesForm {
  std::vector<double> coefficients;
  /// f(1) minus the retained mass; zero for exact polynomials.
  double tail_bound = 0.0;
};

/// A probability generating function, either a closed-form θ PGF or a
/// truncated coefficient sequence. Immutable after construction.
class Pgf {
 public:
  static Pgf series(std::vector<double> coefficients, double tail_bound = 0.0);

  bool is_theta() const { return std::holds_alternative<ThetaForm>(form_); }
  const ThetaForm& theta() const;
  const SeriesForm& coefficients() const;

  /// Evaluates on the extended interval [-1, 1] used by compositional kernels.
  double operator()(double s) const;
  /// Evaluates inside the open unit disk (principal branches).
  std::complex<double> operator()(std::complex<double> s) const;

  /// Total mass f(1).
  double mass() const;

 private:
  explicit Pgf(ThetaForm form) : form_(form) {}
  explicit Pgf(SeriesForm form) : form_(std::move(form)) {}

  friend Pgf make_theta_pgf(const ThetaParams& params);
  friend Pgf pgf_iterate_closed(const Pgf& f, std::int64_t n);

  std::variant<ThetaForm, SeriesForm> form_;
};

/// Validates `params` and resolves them into a ThetaForm.
ThetaForm resolve_theta_params(const ThetaParams& params);

Pgf make_theta_pgf(const ThetaParams& params);

/// f(s) for s in [0, 1]. Throws DomainError outside.
double pgf_eval(const Pgf& f, double s);

/// The θ PGF equal to the n-fold iterate f∘…∘f, via the closed parameter map.
Pgf pgf_iterate_closed(const Pgf& f, std::int64_t n);

/// Numerical composition f_n∘…∘f_1; layers are stored innermost first.
class ComposedPgf {
 public:
  explicit ComposedPgf(std::vector<Pgf> innermost_first);

  double operator()(double s) const;
  std::complex<double> operator()(std::complex<double> s) const;

  std::span<const Pgf> layers() const { return layers_; }

 private:
  std::vector<Pgf> layers_;
};

/// outer∘inner.
ComposedPgf pgf_compose(const Pgf& outer, const Pgf& inner);
/// fs.back()∘…∘fs.front(); the first element is applied first.
ComposedPgf pgf_compose_sequence(std::vector<Pgf> fs);

/// Coefficients p_0..p_{k_max} of a θ PGF from the explicit b_{i,k}(θ) sums.
///
/// For θ = -1 the constant term is (1-a)q, the constant term of as+(1-a)q.
std::vector<double> theta_coefficients(const ThetaParams& params, int k_max);
std::vector<double> theta_coefficients(const ThetaForm& form, int k_max);

/// Table of b_{i,k}(θ) for 0 ≤ i ≤ k ≤ k_max.
class BTable {
 public:
  BTable(double theta, int k_max);

  double theta() const { return theta_; }
  int k_max() const { return k_max_; }
  double operator()(int i, int k) const;

 private:
  double theta_;
  int k_max_;
  std::vector<double> entries_;
};

BTable b_table(double theta, int k_max);

using ComplexFunction = std::function<std::complex<double>(std::complex<double>)>;

/// Contour radius giving a roundoff amplification R^{-k_max} of at most 1e4.
double default_contour_radius(int k_max);
/// max(4 (k_max + 1), 64).
int default_contour_nodes(int k_max);

/// Taylor coefficients at 0 by a discrete Cauchy integral on |s| = radius.
///
/// `nodes` == 0 selects default_contour_nodes(k_max). Throws
/// NumericalInstability if an extracted coefficient is below -1e-8.
std::vector<double> series_coefficients(const ComplexFunction& f, int k_max, double radius,
                                        int nodes = 0);
std::vector<double> series_coefficients(const Pgf& f, int k_max, double radius, int nodes = 0);
std::vector<double> series_coefficients(const ComposedPgf& f, int k_max, double radius,
                                        int nodes = 0);

}  // namespace theta_kernels
