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

#include "theta_kernels/pgf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "theta_kernels/errors.hpp"

namespace theta_kernels {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kDerivedCTolerance = 1e-12;
constexpr double kNegativeCoefficientTolerance = 1e-8;

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

double derived_c(double theta, double a, double q, double r) {
  return (1.0 - a) * std::pow(r - q, -theta);
}

template <class T>
T eval_theta(const ThetaForm& f, T s) {
  using std::pow;
  switch (f.regime) {
    case Regime::kMinusOne:
      return f.a * s + (1.0 - f.a) * f.q;
    case Regime::kZero1:
    case Regime::kZeroR:
      return f.r - std::pow(f.r - f.q, 1.0 - f.a) * pow(T(f.r) - s, f.a);
    case Regime::kMainSuper:
    case Regime::kMainSub1:
    case Regime::kMainSubR:
      break;
  }
  if (f.uses_zero_formula()) {
    return f.r - std::pow(f.r - f.q, 1.0 - f.a) * pow(T(f.r) - s, f.a);
  }
  return f.r - pow(f.a * pow(T(f.r) - s, -f.theta) + f.c, -1.0 / f.theta);
}

template <class T>
T eval_series(const SeriesForm& f, T s) {
  T acc(0.0);
  for (auto it = f.coefficients.rbegin(); it != f.coefficients.rend(); ++it) {
    acc = acc * s + *it;
  }
  return acc;
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw RegimeViolation(fmt::format("parameter {} must be finite", name));
  }
}

Regime infer_regime(const ThetaParams& p) {
  const double theta = p.theta;
  if (theta < -1.0 || theta > 1.0) {
    throw RegimeViolation(fmt::format("theta = {} outside [-1, 1]", theta));
  }
  if (p.r < 1.0) {
    throw RegimeViolation(fmt::format("r = {} must be >= 1", p.r));
  }
  if (theta == -1.0) {
    if (p.r != 1.0) throw RegimeViolation("theta = -1 requires r = 1");
    return Regime::kMinusOne;
  }
  if (theta == 0.0) return p.r == 1.0 ? Regime::kZero1 : Regime::kZeroR;
  if (theta > 0.0 && p.a >= 1.0) {
    if (p.r != 1.0) throw RegimeViolation("theta in (0,1] with a >= 1 requires r = 1");
    return Regime::kMainSuper;
  }
  if (in_open_unit(p.a)) return p.r == 1.0 ? Regime::kMainSub1 : Regime::kMainSubR;
  throw RegimeViolation(
      fmt::format("a = {} is not admissible for theta = {} (need a in (0,1){})", p.a, theta,
                  theta > 0.0 ? " or a >= 1" : ""));
}

void check_q(double q, bool closed_at_one) {
  const bool ok = closed_at_one ? (q >= 0.0 && q <= 1.0) : (q >= 0.0 && q < 1.0);
  if (!ok) {
    throw RegimeViolation(
        fmt::format("q = {} outside {}", q, closed_at_one ? "[0, 1]" : "[0, 1)"));
  }
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kMainSuper: return "MainSuper";
    case Regime::kMainSub1: return "MainSub1";
    case Regime::kMainSubR: return "MainSubR";
    case Regime::kZero1: return "Zero1";
    case Regime::kZeroR: return "ZeroR";
    case Regime::kMinusOne: return "MinusOne";
  }
  return "?";
}

int ThetaForm::table_case() const {
  switch (regime) {
    case Regime::kMainSuper: return a > 1.0 ? 1 : 2;
    case Regime::kMainSub1: return theta > 0.0 ? 3 : 5;
    case Regime::kZero1: return 4;
    case Regime::kMinusOne: return 6;
    case Regime::kMainSubR: return theta > 0.0 ? 7 : 9;
    case Regime::kZeroR: return 8;
  }
  return 0;
}

bool ThetaForm::uses_zero_formula() const {
  switch (regime) {
    case Regime::kZero1:
    case Regime::kZeroR:
      return true;
    case Regime::kMainSub1:
    case Regime::kMainSubR:
      return std::abs(theta) < kThetaZeroSwitch;
    default:
      return false;
  }
}

ThetaForm resolve_theta_params(const ThetaParams& p) {
  require_finite(p.theta, "theta");
  require_finite(p.a, "a");
  require_finite(p.r, "r");
  if (p.c) require_finite(*p.c, "c");
  if (p.q) require_finite(*p.q, "q");

  const Regime regime = infer_regime(p);
  if (p.regime && *p.regime != regime) {
    throw RegimeViolation(fmt::format("parameters describe regime {}, not the requested {}",
                                      to_string(regime), to_string(*p.regime)));
  }

  ThetaForm form{p.theta, p.a, 0.0, 1.0, p.r, regime};
  switch (regime) {
    case Regime::kMainSuper:
      if (!p.c || *p.c <= 0.0) throw RegimeViolation("regime MainSuper requires c > 0");
      if (p.q) throw RegimeViolation("q is not a parameter of regime MainSuper");
      form.c = *p.c;
      break;
    case Regime::kMainSub1:
    case Regime::kMainSubR: {
      const bool closed = regime == Regime::kMainSubR;
      if (p.q) {
        check_q(*p.q, closed);
        form.q = *p.q;
        form.c = derived_c(p.theta, p.a, form.q, p.r);
        if (p.c && std::abs(*p.c - form.c) > kDerivedCTolerance) {
          throw DerivedCMismatch(fmt::format(
              "c = {} disagrees with (1-a)(r-q)^(-theta) = {}", *p.c, form.c));
        }
      } else if (p.c) {
        if (*p.c <= 0.0) throw RegimeViolation("c must be positive");
        form.c = *p.c;
        form.q = p.r - std::pow(form.c / (1.0 - p.a), -1.0 / p.theta);
        check_q(form.q, closed);
      } else {
        throw RegimeViolation(
            fmt::format("regime {} requires q (or c, from which q is derived)", to_string(regime)));
      }
      break;
    }
    case Regime::kZero1:
    case Regime::kZeroR:
    case Regime::kMinusOne:
      if (!in_open_unit(p.a)) {
        throw RegimeViolation(fmt::format("a = {} outside (0, 1)", p.a));
      }
      if (p.c) {
        throw RegimeViolation(fmt::format("c is not a parameter of regime {}", to_string(regime)));
      }
      if (!p.q) throw RegimeViolation(fmt::format("regime {} requires q", to_string(regime)));
      check_q(*p.q, regime != Regime::kZero1);
      form.q = *p.q;
      break;
  }
  return form;
}

Pgf make_theta_pgf(const ThetaParams& params) { return Pgf(resolve_theta_params(params)); }

Pgf Pgf::series(std::vector<double> coefficients, double tail_bound) {
  double mass = 0.0;
  for (double p : coefficients) {
    if (!(p >= 0.0)) {
      throw InvalidCoefficients(fmt::format("coefficient {} is negative or NaN", p));
    }
    mass += p;
  }
  if (mass > 1.0 + kMassTolerance) {
    throw InvalidCoefficients(fmt::format("coefficient mass {} exceeds 1", mass));
  }
  if (!(tail_bound >= 0.0)) throw InvalidCoefficients("tail bound must be non-negative");
  return Pgf(SeriesForm{std::move(coefficients), tail_bound});
}

const ThetaForm& Pgf::theta() const {
  if (const auto* f = std::get_if<ThetaForm>(&form_)) return *f;
  throw ValidationError("PGF is not in closed theta form");
}

const SeriesForm& Pgf::coefficients() const {
  if (const auto* f = std::get_if<SeriesForm>(&form_)) return *f;
  throw ValidationError("PGF is not in series form");
}

double Pgf::operator()(double s) const {
  if (const auto* f = std::get_if<ThetaForm>(&form_)) {
    // Continuous extension at the singular point of (1-s)^{-θ}.
    if (s == 1.0 && f->r == 1.0 && f->theta > 0.0 && !f->uses_zero_formula() &&
        f->regime != Regime::kMinusOne) {
      return 1.0;
    }
    return eval_theta(*f, s);
  }
  return eval_series(std::get<SeriesForm>(form_), s);
}

std::complex<double> Pgf::operator()(std::complex<double> s) const {
  if (const auto* f = std::get_if<ThetaForm>(&form_)) return eval_theta(*f, s);
  return eval_series(std::get<SeriesForm>(form_), s);
}

double Pgf::mass() const {
  if (const auto* f = std::get_if<SeriesForm>(&form_)) {
    double m = 0.0;
    for (double p : f->coefficients) m += p;
    return m;
  }
  return (*this)(1.0);
}

double pgf_eval(const Pgf& f, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError(fmt::format("s = {} outside [0, 1]", s));
  }
  return f(s);
}

Pgf pgf_iterate_closed(const Pgf& f, std::int64_t n) {
  if (n < 1) throw ValidationError("iteration count must be >= 1");
  ThetaForm g = f.theta();
  if (n == 1) return f;

  const double log_a = std::log(g.a);
  const double nd = static_cast<double>(n);
  g.a = std::exp(nd * log_a);
  switch (g.regime) {
    case Regime::kMainSuper:
      // u ↦ a u + c iterates to aⁿu + c(aⁿ - 1)/(a - 1), with u = (1-s)^{-θ}.
      g.c = f.theta().a == 1.0 ? nd * g.c : g.c * std::expm1(nd * log_a) / (f.theta().a - 1.0);
      break;
    case Regime::kMainSub1:
    case Regime::kMainSubR:
      g.c = -std::expm1(nd * log_a) * std::pow(g.r - g.q, -g.theta);
      break;
    default:
      break;
  }
  return Pgf(g);
}

ComposedPgf::ComposedPgf(std::vector<Pgf> innermost_first) : layers_(std::move(innermost_first)) {
  if (layers_.empty()) throw EmptySequence("composition needs at least one PGF");
}

double ComposedPgf::operator()(double s) const {
  for (const auto& f : layers_) s = f(s);
  return s;
}

std::complex<double> ComposedPgf::operator()(std::complex<double> s) const {
  for (const auto& f : layers_) s = f(s);
  return s;
}

ComposedPgf pgf_compose(const Pgf& outer, const Pgf& inner) {
  return ComposedPgf({inner, outer});
}

ComposedPgf pgf_compose_sequence(std::vector<Pgf> fs) { return ComposedPgf(std::move(fs)); }

namespace {

// b_{i,k}(θ) / k!, filled by the same recursion divided through by k.
std::vector<double> scaled_b(double theta, int k_max, bool divide_by_factorial) {
  const auto n = static_cast<std::size_t>(k_max + 1);
  std::vector<double> b(n * n, 0.0);
  auto at = [&](int i, int k) -> double& {
    return b[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(i)];
  };
  if (k_max < 2) return b;
  at(1, 2) = divide_by_factorial ? (1.0 + theta) / 2.0 : 1.0 + theta;
  for (int k = 3; k <= k_max; ++k) {
    const double scale = divide_by_factorial ? 1.0 / k : 1.0;
    for (int i = 1; i <= k - 1; ++i) {
      at(i, k) = ((k - 2 - i * theta) * at(i, k - 1) + (1 + i * theta) * at(i - 1, k - 1)) * scale;
    }
  }
  return b;
}

std::vector<double> zero_formula_coefficients(const ThetaForm& f, int k_max) {
  const double r = f.r, q = f.q, a = f.a;
  std::vector<double> p(static_cast<std::size_t>(k_max + 1), 0.0);
  const double base = std::pow(r - q, 1.0 - a);
  p[0] = r - base * std::pow(r, a);
  if (k_max >= 1) p[1] = base * a * std::pow(r, a - 1.0);
  double prod = 1.0;
  double r_pow = std::pow(r, a);
  for (int k = 2; k <= k_max; ++k) {
    prod *= 1.0 - (1.0 + a) / k;
    r_pow /= r;
    p[static_cast<std::size_t>(k)] = a * base * r_pow / r * prod;
  }
  return p;
}

std::vector<double> main_formula_coefficients(const ThetaForm& f, int k_max) {
  const double theta = f.theta, a = f.a, c = f.c, r = f.r;
  std::vector<double> p(static_cast<std::size_t>(k_max + 1), 0.0);
  const double cr = c * std::pow(r, theta);
  const double big_a = a + cr;
  const double ratio = cr / big_a;
  p[0] = r - std::pow(a * std::pow(r, -theta) + c, -1.0 / theta);
  if (k_max >= 1) p[1] = a * std::pow(big_a, -1.0 - 1.0 / theta);
  if (k_max < 2) return p;

  const auto beta = scaled_b(theta, k_max, true);
  const auto n = static_cast<std::size_t>(k_max + 1);
  const double prefactor = a * std::pow(big_a, -(1.0 + theta) / theta);
  double r_pow = 1.0;  // r^{-k+1}
  for (int k = 2; k <= k_max; ++k) {
    r_pow /= r;
    double sum = 0.0;
    double ratio_pow = 1.0;
    for (int i = 1; i <= k - 1; ++i) {
      ratio_pow *= ratio;
      sum += ratio_pow * beta[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(i)];
    }
    p[static_cast<std::size_t>(k)] = prefactor * r_pow * sum;
  }
  return p;
}

}  // namespace

std::vector<double> theta_coefficients(const ThetaForm& form, int k_max) {
  if (k_max < 0) throw ValidationError("k_max must be >= 0");
  if (form.regime == Regime::kMinusOne) {
    std::vector<double> p(static_cast<std::size_t>(k_max + 1), 0.0);
    p[0] = (1.0 - form.a) * form.q;
    if (k_max >= 1) p[1] = form.a;
    return p;
  }
  if (form.uses_zero_formula()) return zero_formula_coefficients(form, k_max);
  return main_formula_coefficients(form, k_max);
}

std::vector<double> theta_coefficients(const ThetaParams& params, int k_max) {
  return theta_coefficients(resolve_theta_params(params), k_max);
}

BTable::BTable(double theta, int k_max) : theta_(theta), k_max_(k_max) {
  if (!(theta > -1.0 && theta <= 1.0)) {
    throw ValidationError(fmt::format("b table needs theta in (-1, 1], got {}", theta));
  }
  if (k_max < 2) throw ValidationError("b table needs k_max >= 2");
  entries_ = scaled_b(theta, k_max, false);
}

double BTable::operator()(int i, int k) const {
  if (k < 0 || k > k_max_ || i < 0 || i > k) {
    throw IndexOutOfRange(fmt::format("b({}, {}) outside table of order {}", i, k, k_max_));
  }
  return entries_[static_cast<std::size_t>(k) * static_cast<std::size_t>(k_max_ + 1) +
                  static_cast<std::size_t>(i)];
}

BTable b_table(double theta, int k_max) { return BTable(theta, k_max); }

double default_contour_radius(int k_max) {
  if (k_max <= 1) return 0.5;
  return std::clamp(std::pow(10.0, -4.0 / k_max), 0.5, 0.95);
}

int default_contour_nodes(int k_max) { return std::max(4 * (k_max + 1), 64); }

std::vector<double> series_coefficients(const ComplexFunction& f, int k_max, double radius,
                                        int nodes) {
  if (k_max < 0) throw ValidationError("k_max must be >= 0");
  if (!(radius > 0.0 && radius < 1.0)) {
    throw ValidationError(fmt::format("contour radius {} outside (0, 1)", radius));
  }
  if (nodes == 0) nodes = default_contour_nodes(k_max);
  if (nodes < 4 * k_max) {
    throw ValidationError(fmt::format("{} contour nodes is fewer than 4 k_max", nodes));
  }

  const auto m = static_cast<std::size_t>(nodes);
  std::vector<std::complex<double>> roots(m);
  for (std::size_t j = 0; j < m; ++j) {
    roots[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / nodes);
  }
  std::vector<std::complex<double>> values(m);
  for (std::size_t j = 0; j < m; ++j) values[j] = f(radius * roots[j]);

  std::vector<double> p(static_cast<std::size_t>(k_max + 1));
  double radius_pow = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    std::complex<double> acc(0.0);
    for (std::size_t j = 0; j < m; ++j) {
      acc += values[j] * std::conj(roots[(j * static_cast<std::size_t>(k)) % m]);
    }
    const double pk = acc.real() / nodes / radius_pow;
    if (pk < -kNegativeCoefficientTolerance) {
      throw NumericalInstability(fmt::format(
          "extracted coefficient p_{} = {} is negative; radius {} / {} nodes misconfigured", k, pk,
          radius, nodes));
    }
    p[static_cast<std::size_t>(k)] = pk;
    radius_pow *= radius;
  }
  return p;
}

std::vector<double> series_coefficients(const Pgf& f, int k_max, double radius, int nodes) {
  return series_coefficients([&f](std::complex<double> s) { return f(s); }, k_max, radius, nodes);
}

std::vector<double> series_coefficients(const ComposedPgf& f, int k_max, double radius,
                                        int nodes) {
  return series_coefficients([&f](std::complex<double> s) { return f(s); }, k_max, radius, nodes);
}

}  // namespace theta_kernels
