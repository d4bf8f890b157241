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

#include "theta_kernels/activation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "theta_kernels/errors.hpp"
#include "theta_kernels/io.hpp"
#include "theta_kernels/quadrature.hpp"

namespace theta_kernels {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kSecondMomentTolerance = 1e-8;
// Gaussian tail beyond 12 standard deviations is below 1e-32.
constexpr double kBaseHalfWidth = 12.0;

// Quadrature adapted to `act`: Gauss–Hermite when smooth, panels split at
// kinks otherwise. The panel rule reaches past the oscillatory region of
// h_k for k ≤ k_max (|x| < 2√k_max).
GaussianRule rule_for(const Activation& act, int quad_nodes, int k_max) {
  if (act.breakpoints().empty()) return *gauss_hermite_rule(quad_nodes);
  const double half_width = kBaseHalfWidth + 2.0 * std::sqrt(static_cast<double>(k_max));
  return piecewise_gaussian_rule(act.breakpoints(), half_width);
}

// ∫ g dN over [-half_width, half_width] with a panel edge at `kink`.
template <class F>
double integrate_with_kink(F&& g, double kink, double half_width,
                           std::span<const double> gl_x, std::span<const double> gl_w) {
  constexpr double kPanel = 0.5;
  const double density = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  double total = 0.0;
  auto segment = [&](double lo, double hi) {
    if (!(hi > lo)) return;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / kPanel)));
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * h;
      double acc = 0.0;
      for (std::size_t i = 0; i < gl_x.size(); ++i) {
        const double x = mid + 0.5 * h * gl_x[i];
        acc += gl_w[i] * std::exp(-0.5 * x * x) * g(x);
      }
      total += 0.5 * h * acc;
    }
  };
  if (kink > -half_width && kink < half_width) {
    segment(-half_width, kink);
    segment(kink, half_width);
  } else {
    segment(-half_width, half_width);
  }
  return total * density;
}

}  // namespace

double hermite_eval(int k, double x) {
  if (k < 0) throw ValidationError("Hermite order must be non-negative");
  double prev = 0.0, cur = 1.0;
  for (int j = 0; j < k; ++j) {
    const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_values(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    out[j + 1] = (x * out[j] - std::sqrt(static_cast<double>(j)) * out[j - 1]) /
                 std::sqrt(static_cast<double>(j + 1));
  }
}

Activation Activation::hermite_series(std::span<const double> p, double tail_bound) {
  Activation act;
  double mass = 0.0;
  act.sqrt_p_.reserve(p.size());
  for (double pk : p) {
    if (!(pk >= 0.0)) {
      throw InvalidCoefficients(fmt::format("coefficient {} is negative or NaN", pk));
    }
    mass += pk;
    act.sqrt_p_.push_back(std::sqrt(pk));
  }
  if (mass > 1.0 + kMassTolerance) {
    throw InvalidCoefficients(fmt::format("coefficient mass {} exceeds 1", mass));
  }
  if (!(tail_bound >= 0.0)) throw InvalidCoefficients("tail bound must be non-negative");
  act.tail_bound_ = tail_bound;
  return act;
}

Activation Activation::linear() {
  Activation act;
  act.reference_ = ReferenceKind::kLinear;
  return act;
}

Activation Activation::relu() {
  Activation act = prelu(0.0);
  act.reference_ = ReferenceKind::kRelu;
  return act;
}

Activation Activation::prelu(double slope) {
  if (!std::isfinite(slope)) throw ValidationError("PReLU slope must be finite");
  Activation act;
  act.reference_ = ReferenceKind::kPrelu;
  act.slope_ = slope;
  // E[φ²] = n² (1 + slope²) / 2.
  act.normalization_ = std::sqrt(2.0 / (1.0 + slope * slope));
  if (slope != 1.0) act.breakpoints_ = {0.0};
  return act;
}

ReferenceKind Activation::reference_kind() const {
  if (!reference_) throw ValidationError("series activation has no reference kind");
  return *reference_;
}

std::string Activation::name() const {
  if (!reference_) return fmt::format("hermite_series[{}]", sqrt_p_.size());
  switch (*reference_) {
    case ReferenceKind::kLinear: return "linear";
    case ReferenceKind::kRelu: return "relu";
    case ReferenceKind::kPrelu: return fmt::format("prelu({})", format_number(slope_));
  }
  return "?";
}

double Activation::operator()(double x) const {
  if (reference_) {
    switch (*reference_) {
      case ReferenceKind::kLinear: return x;
      case ReferenceKind::kRelu:
      case ReferenceKind::kPrelu:
        if (x > 0.0) return normalization_ * x;
        return slope_ == 0.0 ? 0.0 : normalization_ * slope_ * x;
    }
  }
  if (sqrt_p_.empty()) return 0.0;
  double prev = 0.0, cur = 1.0;
  double acc = sqrt_p_[0];
  for (std::size_t j = 0; j + 1 < sqrt_p_.size(); ++j) {
    const double next =
        (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(static_cast<double>(j + 1));
    prev = cur;
    cur = next;
    acc += sqrt_p_[j + 1] * cur;
  }
  return acc;
}

std::optional<double> Activation::closed_form_dual(double s) const {
  if (!reference_) {
    double acc = 0.0;
    for (auto it = sqrt_p_.rbegin(); it != sqrt_p_.rend(); ++it) acc = acc * s + (*it) * (*it);
    return acc;
  }
  if (*reference_ == ReferenceKind::kLinear) return s;
  // Arc-cosine integral: E[max(0,X) max(0,Z)] = (√(1-s²) + s(π - arccos s)) / (2π).
  const double sc = std::clamp(s, -1.0, 1.0);
  const double arc = (std::sqrt(1.0 - sc * sc) + sc * (std::numbers::pi - std::acos(sc))) /
                     (2.0 * std::numbers::pi);
  const double alpha = slope_;
  return normalization_ * normalization_ * ((1.0 - alpha) * (1.0 - alpha) * arc + alpha * sc);
}

Activation activation_from_coefficients(std::span<const double> p, double tail_bound) {
  return Activation::hermite_series(p, tail_bound);
}

double activation_eval(const Activation& act, double x) { return act(x); }

double activation_second_moment(const Activation& act, int quad_nodes) {
  const GaussianRule rule = rule_for(act, quad_nodes, 0);
  double m2 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = act(rule.nodes[i]);
    m2 += rule.weights[i] * v * v;
  }
  return m2;
}

std::vector<double> activation_to_pgf(const Activation& act, int k_max, int quad_nodes) {
  if (k_max < 0) throw ValidationError("k_max must be >= 0");
  const GaussianRule rule = rule_for(act, quad_nodes, k_max);
  std::vector<double> a(static_cast<std::size_t>(k_max + 1), 0.0);
  std::vector<double> h(static_cast<std::size_t>(k_max + 1));
  double m2 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = act(rule.nodes[i]);
    const double wv = rule.weights[i] * v;
    m2 += wv * v;
    hermite_values(rule.nodes[i], h);
    for (std::size_t k = 0; k < h.size(); ++k) a[k] += wv * h[k];
  }
  if (m2 > 1.0 + kSecondMomentTolerance) {
    throw NotSquareIntegrableWithinBudget(
        fmt::format("E[phi^2] = {} exceeds 1; rescale the activation", m2));
  }
  for (double& ak : a) ak *= ak;
  return a;
}

std::vector<double> tabulated_activation_to_pgf(std::span<const double> xs,
                                                std::span<const double> phis, int k_max) {
  if (k_max < 0) throw ValidationError("k_max must be >= 0");
  if (xs.size() != phis.size()) throw DimensionMismatch("curve columns differ in length");
  if (xs.size() < 2) throw ValidationError("curve needs at least two points");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw ValidationError("curve abscissae must be strictly increasing");
  }
  const auto kk = static_cast<std::size_t>(k_max + 1);
  std::vector<double> a(kk, 0.0);
  std::vector<double> h(kk);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double left = i > 0 ? xs[i] - xs[i - 1] : 0.0;
    const double right = i + 1 < xs.size() ? xs[i + 1] - xs[i] : 0.0;
    const double density = std::exp(-0.5 * xs[i] * xs[i]) / std::sqrt(2.0 * std::numbers::pi);
    const double wv = 0.5 * (left + right) * density * phis[i];
    hermite_values(xs[i], h);
    for (std::size_t k = 0; k < kk; ++k) a[k] += wv * h[k];
  }
  for (double& ak : a) ak *= ak;
  return a;
}

Pgf activation_pgf(const Activation& act, int k_max, int quad_nodes) {
  auto p = activation_to_pgf(act, k_max, quad_nodes);
  double retained = 0.0;
  for (double pk : p) retained += pk;
  const double tail = std::max(0.0, activation_second_moment(act, quad_nodes) - retained);
  return Pgf::series(std::move(p), tail);
}

double bivariate_expectation(const Activation& act, double s, int quad_nodes) {
  if (!(s >= -1.0 && s <= 1.0)) {
    throw DomainError(fmt::format("correlation s = {} outside [-1, 1]", s));
  }
  const double sigma = std::sqrt(std::max(0.0, 1.0 - s * s));

  if (act.breakpoints().empty()) {
    const auto rule = gauss_hermite_rule(quad_nodes);
    double total = 0.0;
    for (std::size_t i = 0; i < rule->size(); ++i) {
      const double x = rule->nodes[i];
      double inner = 0.0;
      for (std::size_t j = 0; j < rule->size(); ++j) {
        inner += rule->weights[j] * act(s * x + sigma * rule->nodes[j]);
      }
      total += rule->weights[i] * act(x) * inner;
    }
    return total;
  }

  // Kinked activation: split the outer integral at the kinks of φ(x) and the
  // inner one at the kink of y ↦ φ(sx + σy).
  std::vector<double> gl_x, gl_w;
  gauss_legendre(20, gl_x, gl_w);
  const GaussianRule outer = piecewise_gaussian_rule(act.breakpoints(), kBaseHalfWidth);
  const double kink = act.breakpoints().front();
  double total = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const double x = outer.nodes[i];
    double inner;
    if (sigma == 0.0) {
      inner = act(s * x);
    } else {
      inner = integrate_with_kink([&](double y) { return act(s * x + sigma * y); },
                                  (kink - s * x) / sigma, kBaseHalfWidth, gl_x, gl_w);
    }
    total += outer.weights[i] * act(x) * inner;
  }
  return total;
}

std::vector<double> curve_grid(double x_min, double x_max, double step) {
  if (!(step > 0.0) || !(x_max >= x_min)) throw ValidationError("invalid curve grid");
  const auto count = static_cast<std::size_t>(std::llround((x_max - x_min) / step)) + 1;
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = x_min + static_cast<double>(i) * step;
  return xs;
}

void write_activation_curve(std::ostream& out, const Activation& act, double x_min, double x_max,
                            double step) {
  out << "x,phi\n";
  for (double x : curve_grid(x_min, x_max, step)) {
    out << format_number(x) << ',' << format_number(act(x)) << '\n';
  }
}

}  // namespace theta_kernels
