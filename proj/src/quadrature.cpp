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

#include "theta_kernels/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "theta_kernels/errors.hpp"

namespace theta_kernels {

namespace {

// Probabilists' Gauss–Hermite nodes from the Jacobi matrix (off-diagonal √k),
// polished by Newton on h_n. Weights 1/Σ_{j<n} h_j(x)² keep full relative
// accuracy in the tails.
void gauss_hermite_probabilists(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalInstability("Gauss-Hermite eigensolve failed");
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = solver.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      double prev = 0.0, cur = 1.0;
      for (int j = 0; j < n; ++j) {
        const double next = (z * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
        prev = cur;
        cur = next;
      }
      // h_n' = √n h_{n-1}.
      z -= cur / (std::sqrt(static_cast<double>(n)) * prev);
    }
    double prev = 0.0, cur = 1.0, sum = 1.0;
    for (int j = 0; j + 1 < n; ++j) {
      const double next = (z * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
      prev = cur;
      cur = next;
      sum += cur * cur;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 1.0 / sum;
  }
  // Exact symmetry.
  for (int i = 0; i < n / 2; ++i) {
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    const double node = 0.5 * (x[hi] - x[lo]);
    const double weight = 0.5 * (w[hi] + w[lo]);
    x[lo] = -node;
    x[hi] = node;
    w[lo] = w[hi] = weight;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
}

}  // namespace

std::shared_ptr<const GaussianRule> gauss_hermite_rule(int n) {
  if (n < 1) throw ValidationError("Gauss-Hermite rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const GaussianRule>> cache;

  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  auto rule = std::make_shared<GaussianRule>();
  gauss_hermite_probabilists(n, rule->nodes, rule->weights);
  cache.emplace(n, rule);
  return rule;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ValidationError("Gauss-Legendre rule needs at least one node");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = -z;
    nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[static_cast<std::size_t>(n - 1 - i)] = weights[static_cast<std::size_t>(i)];
  }
}

GaussianRule piecewise_gaussian_rule(std::span<const double> breakpoints, double half_width,
                                     double panel_width, int points_per_panel) {
  if (!(half_width > 0.0) || !(panel_width > 0.0)) {
    throw ValidationError("piecewise rule needs positive widths");
  }
  std::vector<double> edges{-half_width};
  std::vector<double> inner;
  for (double b : breakpoints) {
    if (b > -half_width && b < half_width) inner.push_back(b);
  }
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  edges.insert(edges.end(), inner.begin(), inner.end());
  edges.push_back(half_width);

  std::vector<double> gl_x, gl_w;
  gauss_legendre(points_per_panel, gl_x, gl_w);
  const double density = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;  // 1/√(2π)

  GaussianRule rule;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s], hi = edges[s + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel_width)));
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * h;
      for (std::size_t i = 0; i < gl_x.size(); ++i) {
        const double x = mid + 0.5 * h * gl_x[i];
        rule.nodes.push_back(x);
        rule.weights.push_back(0.5 * h * gl_w[i] * density * std::exp(-0.5 * x * x));
      }
    }
  }
  return rule;
}

}  // namespace theta_kernels
