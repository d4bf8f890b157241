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

#include <memory>
#include <span>
#include <vector>

namespace theta_kernels {

/// Nodes and weights approximating ∫ g dN(0,1) by Σ w_i g(x_i).
struct GaussianRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss–Hermite rule for the standard normal measure, nodes ascending.
/// Cached; the returned rule is shared read-only.
std::shared_ptr<const GaussianRule> gauss_hermite_rule(int n);

/// n-point Gauss–Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Composite Gauss–Legendre rule for the standard normal measure on
/// [-half_width, half_width], with panel edges at every breakpoint so that
/// piecewise-smooth integrands are integrated to full accuracy.
GaussianRule piecewise_gaussian_rule(std::span<const double> breakpoints, double half_width,
                                     double panel_width = 0.5, int points_per_panel = 20);

}  // namespace theta_kernels
