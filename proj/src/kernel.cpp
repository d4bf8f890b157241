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

#include "theta_kernels/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "theta_kernels/errors.hpp"

namespace theta_kernels {

namespace {

void check_rho(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw DomainError(fmt::format("correlation {} outside [-1, 1]", rho));
  }
}

void check_cmixed(double theta, std::span<const double> c) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw InvalidRegime(fmt::format("c-mixed kernels need theta in (0, 1], got {}", theta));
  }
  for (double ck : c) {
    if (!(ck > 0.0) || !std::isfinite(ck)) {
      throw InvalidRegime(fmt::format("c-mixed kernels need c_k > 0, got {}", ck));
    }
  }
}

// Neumaier-compensated sum; partial sums of long c sequences stay exact to rounding.
double compensated_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

// Table case whose formula is used; near-zero θ sub-critical PGFs use the θ = 0 rows.
int evaluation_case(const ThetaForm& f) {
  if (f.uses_zero_formula()) return f.r == 1.0 ? 4 : 8;
  return f.table_case();
}

}  // namespace

double correlation(std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) {
    throw DimensionMismatch(fmt::format("dimension {} vs {}", x.size(), z.size()));
  }
  long double xx = 0.0L, zz = 0.0L, xz = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double xi = x[i], zi = z[i];
    xx += xi * xi;
    zz += zi * zi;
    xz += xi * zi;
  }
  if (xx == 0.0L || zz == 0.0L) throw ZeroVector("correlation of a zero vector");
  const long double rho = xz / std::sqrt(xx * zz);
  return std::clamp(static_cast<double>(rho), -1.0, 1.0);
}

double table1_closed_form(const ThetaForm& f, std::int64_t n, double rho) {
  if (n < 1) throw ValidationError("depth must be >= 1");
  check_rho(rho);
  const double nd = static_cast<double>(n);
  const double log_a = std::log(f.a);
  const double an = std::exp(nd * log_a);
  const double one_minus_an = -std::expm1(nd * log_a);
  const double theta = f.theta, q = f.q, r = f.r, c = f.c;

  switch (evaluation_case(f)) {
    case 1: {
      if (rho == 1.0) return 1.0;
      // (aⁿ - 1)c/(a - 1): the constant accumulated by iterating u ↦ a u + c.
      const double cn = c * std::expm1(nd * log_a) / (f.a - 1.0);
      return 1.0 - std::pow(an * std::pow(1.0 - rho, -theta) + cn, -1.0 / theta);
    }
    case 2:
      if (rho == 1.0) return 1.0;
      return 1.0 - std::pow(std::pow(1.0 - rho, -theta) + nd * c, -1.0 / theta);
    case 3:
      if (rho == 1.0) return 1.0;
      return 1.0 - std::pow(an * std::pow(1.0 - rho, -theta) +
                                one_minus_an * std::pow(1.0 - q, -theta),
                            -1.0 / theta);
    case 4:
      return 1.0 - std::pow(1.0 - q, one_minus_an) * std::pow(1.0 - rho, an);
    case 5: {
      const double t = std::abs(theta);
      return 1.0 - std::pow(an * std::pow(1.0 - rho, t) + one_minus_an * std::pow(1.0 - q, t),
                            1.0 / t);
    }
    case 6:
      return an * rho + one_minus_an * q;
    case 7:
      return r - std::pow(an * std::pow(r - rho, -theta) + one_minus_an * std::pow(r - q, -theta),
                          -1.0 / theta);
    case 8:
      return r - std::pow(r - q, one_minus_an) * std::pow(r - rho, an);
    case 9: {
      const double t = std::abs(theta);
      return r - std::pow(an * std::pow(r - rho, t) + one_minus_an * std::pow(r - q, t), 1.0 / t);
    }
    default:
      break;
  }
  throw ValidationError("unknown table case");
}

double pure_kernel_recursive(const Pgf& f, std::int64_t n, double rho) {
  if (n < 1) throw ValidationError("depth must be >= 1");
  check_rho(rho);
  double s = rho;
  for (std::int64_t i = 0; i < n; ++i) s = f(s);
  return s;
}

double pure_kernel_at(const Pgf& f, std::int64_t n, double rho) {
  if (f.is_theta()) return table1_closed_form(f.theta(), n, rho);
  return pure_kernel_recursive(f, n, rho);
}

double pure_kernel_eval(const Pgf& f, std::int64_t n, std::span<const double> x,
                        std::span<const double> z) {
  return pure_kernel_at(f, n, correlation(x, z));
}

double mixed_kernel_at(std::span<const Pgf> fs, double rho) {
  if (fs.empty()) throw EmptySequence("mixed kernel needs at least one PGF");
  check_rho(rho);
  double s = rho;
  for (const auto& f : fs) s = f(s);
  return s;
}

std::vector<double> mixed_kernel_prefix(std::span<const Pgf> fs, double rho) {
  if (fs.empty()) throw EmptySequence("mixed kernel needs at least one PGF");
  check_rho(rho);
  std::vector<double> values;
  values.reserve(fs.size());
  double s = rho;
  for (const auto& f : fs) {
    s = f(s);
    values.push_back(s);
  }
  return values;
}

double mixed_kernel_eval(std::span<const Pgf> fs, std::span<const double> x,
                         std::span<const double> z) {
  if (fs.empty()) throw EmptySequence("mixed kernel needs at least one PGF");
  return mixed_kernel_at(fs, correlation(x, z));
}

std::vector<Pgf> cmixed_pgfs(double theta, std::span<const double> c) {
  check_cmixed(theta, c);
  std::vector<Pgf> fs;
  fs.reserve(c.size());
  for (double ck : c) fs.push_back(make_theta_pgf({.theta = theta, .a = 1.0, .c = ck, .r = 1.0}));
  return fs;
}

double cmixed_closed_form(double theta, double c_sum, double rho) {
  check_rho(rho);
  if (rho == 1.0) return 1.0;
  return 1.0 - std::pow(std::pow(1.0 - rho, -theta) + c_sum, -1.0 / theta);
}

double cmixed_kernel_at(double theta, std::span<const double> c, double rho) {
  check_cmixed(theta, c);
  if (c.empty()) throw EmptySequence("c-mixed kernel needs at least one c_k");
  return cmixed_closed_form(theta, compensated_sum(c), rho);
}

double cmixed_kernel_eval(double theta, std::span<const double> c, std::span<const double> x,
                          std::span<const double> z) {
  return cmixed_kernel_at(theta, c, correlation(x, z));
}

Pgf cmixed_pure_representation(double theta, std::span<const double> c, std::size_t k) {
  check_cmixed(theta, c);
  if (k < 1 || k > c.size()) {
    throw IndexOutOfRange(fmt::format("k = {} outside 1..{}", k, c.size()));
  }
  const double mean = compensated_sum(c.first(k)) / static_cast<double>(k);
  return make_theta_pgf({.theta = theta, .a = 1.0, .c = mean, .r = 1.0});
}

double kernel_limit(const Pgf& pure_theta, double rho) {
  check_rho(rho);
  const ThetaForm& f = pure_theta.theta();
  switch (evaluation_case(f)) {
    case 1:
    case 2:
      return 1.0;
    case 3:
    case 4:
      // Every iterate equals 1 at ρ = 1.
      return rho == 1.0 ? 1.0 : f.q;
    default:
      // Cases 5-9: aⁿ → 0 leaves the fixed point q for every ρ in [-1, 1].
      return f.q;
  }
}

double kernel_limit(const CMixedLimit& spec, double rho) {
  check_rho(rho);
  if (!(spec.theta > 0.0 && spec.theta <= 1.0)) {
    throw InvalidRegime(fmt::format("c-mixed kernels need theta in (0, 1], got {}", spec.theta));
  }
  switch (spec.behavior) {
    case SumBehavior::kUnknown:
      throw UnknownSumConvergence("c-mixed limit needs the value of sum c_k or a divergence flag");
    case SumBehavior::kDiverges:
      return 1.0;
    case SumBehavior::kConverges:
      if (!(spec.c_sum > 0.0) || !std::isfinite(spec.c_sum)) {
        throw ValidationError("a convergent sum of c_k must be positive and finite");
      }
      return cmixed_closed_form(spec.theta, spec.c_sum, rho);
  }
  return 1.0;
}

KernelSpec KernelSpec::pure(Pgf f, std::int64_t depth) {
  if (depth < 1) throw ValidationError("pure kernel depth must be >= 1");
  KernelSpec spec;
  spec.kind_ = KernelKind::kPure;
  spec.depth_ = depth;
  spec.layers_.push_back(std::move(f));
  return spec;
}

KernelSpec KernelSpec::mixed(std::vector<Pgf> innermost_first) {
  if (innermost_first.empty()) throw EmptySequence("mixed kernel needs at least one PGF");
  KernelSpec spec;
  spec.kind_ = KernelKind::kMixed;
  spec.depth_ = static_cast<std::int64_t>(innermost_first.size());
  spec.layers_ = std::move(innermost_first);
  return spec;
}

KernelSpec KernelSpec::cmixed(double theta, std::vector<double> c) {
  if (c.empty()) throw EmptySequence("c-mixed kernel needs at least one c_k");
  KernelSpec spec;
  spec.kind_ = KernelKind::kCMixed;
  spec.layers_ = cmixed_pgfs(theta, c);
  spec.depth_ = static_cast<std::int64_t>(c.size());
  spec.theta_ = theta;
  spec.c_sum_ = compensated_sum(c);
  spec.c_ = std::move(c);
  return spec;
}

double KernelSpec::at(double rho) const {
  switch (kind_) {
    case KernelKind::kPure: return pure_kernel_at(layers_.front(), depth_, rho);
    case KernelKind::kMixed: return mixed_kernel_at(layers_, rho);
    case KernelKind::kCMixed: return cmixed_closed_form(theta_, c_sum_, rho);
  }
  return 0.0;
}

std::complex<double> KernelSpec::at(std::complex<double> s) const {
  switch (kind_) {
    case KernelKind::kPure: {
      const Pgf& f = layers_.front();
      if (f.is_theta()) return pgf_iterate_closed(f, depth_)(s);
      for (std::int64_t i = 0; i < depth_; ++i) s = f(s);
      return s;
    }
    case KernelKind::kMixed:
      for (const auto& f : layers_) s = f(s);
      return s;
    case KernelKind::kCMixed:
      return 1.0 - std::pow(std::pow(1.0 - s, -theta_) + c_sum_, -1.0 / theta_);
  }
  return s;
}

Eigen::MatrixXd gram(const KernelSpec& spec, const std::vector<std::vector<double>>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& xi = points[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = spec(xi, points[static_cast<std::size_t>(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t sphere_multiplicity(int m, int k) {
  if (m < 2) throw DimensionUnsupported(fmt::format("sphere dimension m = {} < 2", m));
  if (k < 0) throw ValidationError("harmonic degree must be >= 0");
  if (k == 0) return 1;
  // binom(k+m-3, k-1) by the running product C(m-2+i, i).
  u128 binom = 1;
  for (int i = 1; i <= k - 1; ++i) {
    binom = binom * static_cast<unsigned>(m - 2 + i) / static_cast<unsigned>(i);
    if (binom > std::numeric_limits<std::uint64_t>::max()) {
      throw NumericalInstability(fmt::format("multiplicity r({}, {}) overflows", m, k));
    }
  }
  const u128 r = binom * static_cast<unsigned>(2 * k + m - 2) / static_cast<unsigned>(k);
  if (r > std::numeric_limits<std::uint64_t>::max()) {
    throw NumericalInstability(fmt::format("multiplicity r({}, {}) overflows", m, k));
  }
  return static_cast<std::uint64_t>(r);
}

double sphere_surface_area(int m) {
  if (m < 1) throw DimensionUnsupported("sphere dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

Eigensystem eigensystem(const KernelSpec& spec, int m, int k_max) {
  if (m < 2) throw DimensionUnsupported(fmt::format("sphere dimension m = {} < 2", m));
  if (k_max < 0) throw ValidationError("k_max must be >= 0");
  const auto p = series_coefficients([&spec](std::complex<double> s) { return spec.at(s); }, k_max,
                                     default_contour_radius(k_max));
  const double surface = sphere_surface_area(m);
  Eigensystem sys;
  sys.dimension = m;
  sys.entries.reserve(p.size());
  for (int k = 0; k <= k_max; ++k) {
    EigenEntry e;
    e.k = k;
    e.p = std::max(0.0, p[static_cast<std::size_t>(k)]);
    e.multiplicity = sphere_multiplicity(m, k);
    e.lambda = surface * e.p / static_cast<double>(e.multiplicity);
    sys.entries.push_back(e);
  }
  return sys;
}

}  // namespace theta_kernels
