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

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "theta_kernels/pgf.hpp"

namespace oracles {

// Taylor coefficients by a long-double trapezoid rule on the circle |s| = radius.
inline std::vector<double> contour_coefficients(
    const std::function<std::complex<double>(std::complex<double>)>& f, int k_max,
    double radius, int nodes) {
  using ld = long double;
  const ld pi = std::numbers::pi_v<ld>;
  std::vector<std::complex<ld>> values(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) {
    const ld t = 2 * pi * j / nodes;
    const std::complex<double> s(static_cast<double>(radius * std::cos(t)),
                                 static_cast<double>(radius * std::sin(t)));
    const auto v = f(s);
    values[static_cast<std::size_t>(j)] = {v.real(), v.imag()};
  }
  std::vector<double> p(static_cast<std::size_t>(k_max + 1));
  for (int k = 0; k <= k_max; ++k) {
    ld acc = 0;
    for (int j = 0; j < nodes; ++j) {
      const ld t = 2 * pi * static_cast<ld>((static_cast<long long>(j) * k) % nodes) / nodes;
      acc += values[static_cast<std::size_t>(j)].real() * std::cos(t) +
             values[static_cast<std::size_t>(j)].imag() * std::sin(t);
    }
    p[static_cast<std::size_t>(k)] =
        static_cast<double>(acc / nodes / std::pow(static_cast<ld>(radius), k));
  }
  return p;
}

// E[g(X)], X ~ N(0, 1), by the composite trapezoid rule on [-12, 12].
inline double gaussian_expectation(const std::function<double(double)>& g, double h = 1e-3) {
  const int n = static_cast<int>(std::lround(24.0 / h));
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -12.0 + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * g(x) * std::exp(-0.5 * x * x);
  }
  return acc * h / std::sqrt(2.0 * std::numbers::pi);
}

// E[relu(X) relu(Z)] for normalized relu at correlation s.
inline double relu_dual(double s) {
  return (std::sqrt(1.0 - s * s) + s * (std::numbers::pi - std::acos(s))) / std::numbers::pi;
}

// The n-fold iterate by plain repeated evaluation.
inline double iterate(const theta_kernels::Pgf& f, int n, double s) {
  for (int i = 0; i < n; ++i) s = f(s);
  return s;
}

// A random admissible parameter set for each of the nine closed-form cases.
inline theta_kernels::ThetaParams draw_case(int table_case, std::mt19937_64& rng) {
  auto u = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  theta_kernels::ThetaParams p;
  switch (table_case) {
    case 1: p = {.theta = u(0.05, 1.0), .a = u(1.05, 3.0), .c = u(0.1, 2.0), .r = 1.0}; break;
    case 2: p = {.theta = u(0.05, 1.0), .a = 1.0, .c = u(0.1, 2.0), .r = 1.0}; break;
    case 3: p = {.theta = u(0.05, 1.0), .a = u(0.05, 0.95), .q = u(0.0, 0.95), .r = 1.0}; break;
    case 4: p = {.theta = 0.0, .a = u(0.05, 0.95), .q = u(0.0, 0.95), .r = 1.0}; break;
    case 5: p = {.theta = u(-0.95, -0.05), .a = u(0.05, 0.95), .q = u(0.0, 0.95), .r = 1.0}; break;
    case 6: p = {.theta = -1.0, .a = u(0.05, 0.95), .q = u(0.0, 1.0), .r = 1.0}; break;
    case 7: p = {.theta = u(0.05, 1.0), .a = u(0.05, 0.95), .q = u(0.0, 1.0), .r = u(1.1, 5.0)}; break;
    case 8: p = {.theta = 0.0, .a = u(0.05, 0.95), .q = u(0.0, 1.0), .r = u(1.1, 5.0)}; break;
    default: p = {.theta = u(-0.95, -0.05), .a = u(0.05, 0.95), .q = u(0.0, 1.0), .r = u(1.1, 5.0)}; break;
  }
  return p;
}

}  // namespace oracles
