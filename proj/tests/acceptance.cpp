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

// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "oracles.hpp"
#include "theta_kernels/activation.hpp"
#include "theta_kernels/cli.hpp"
#include "theta_kernels/gp.hpp"
#include "theta_kernels/io.hpp"
#include "theta_kernels/kernel.hpp"
#include "theta_kernels/mlp.hpp"
#include "theta_kernels/pgf.hpp"

using namespace theta_kernels;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<double> kRhoGrid = {-0.99, -0.5, 0.0, 0.5, 0.9, 0.999};

std::vector<std::vector<double>> unit_points(int count, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(static_cast<std::size_t>(m)));
  for (auto& p : pts) {
    double norm = 0.0;
    for (double& v : p) {
      v = g(rng);
      norm += v * v;
    }
    for (double& v : p) v /= std::sqrt(norm);
  }
  return pts;
}

Outcome table1_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int table_case = 1; table_case <= 9; ++table_case) {
    for (int draw = 0; draw < 20; ++draw) {
      const Pgf f = make_theta_pgf(oracles::draw_case(table_case, rng));
      if (f.theta().table_case() != table_case) return {false, fmt::format("draw landed in case {}", f.theta().table_case())};
      for (int n = 1; n <= 8; ++n) {
        for (double rho : kRhoGrid) {
          worst = std::max(worst, std::abs(table1_closed_form(f.theta(), n, rho) - pure_kernel_recursive(f, n, rho)));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 5.0, fmt::format("max |closed - recursive| = {:.3g} (tol 1e-10), {:.2f} s (limit 5 s)", worst, secs)};
}

Outcome coefficient_consistency() {
  std::mt19937_64 rng(102);
  double worst = 0.0, worst_mass = 0.0, worst_p0 = 0.0;
  for (int table_case = 1; table_case <= 9; ++table_case) {
    for (int draw = 0; draw < 10; ++draw) {
      const ThetaParams params = oracles::draw_case(table_case, rng);
      const Pgf f = make_theta_pgf(params);
      const auto p = theta_coefficients(params, 40);
      const auto ref = oracles::contour_coefficients([&f](std::complex<double> s) { return f(s); }, 40, 0.9, 1024);
      for (int k = 0; k <= 40; ++k) worst = std::max(worst, std::abs(p[static_cast<std::size_t>(k)] - ref[static_cast<std::size_t>(k)]));
    }
  }
  // θ = -1: the constant term is f(0) = (1 - a) q.
  for (int draw = 0; draw < 20; ++draw) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double a = 0.01 + 0.98 * u(rng), q = u(rng);
    const ThetaParams params{.theta = -1.0, .a = a, .q = q};
    const auto p = theta_coefficients(params, 40);
    const auto ref = oracles::contour_coefficients(
        [&](std::complex<double> s) { return a * s + (1.0 - a) * q; }, 40, 0.9, 1024);
    for (int k = 0; k <= 40; ++k) worst = std::max(worst, std::abs(p[static_cast<std::size_t>(k)] - ref[static_cast<std::size_t>(k)]));
    worst_p0 = std::max(worst_p0, std::abs(p[0] - (1.0 - a) * q));
    double mass = 0.0;
    for (double v : p) mass += v;
    worst_mass = std::max(worst_mass, mass - 1.0);
  }
  const bool pass = worst <= 1e-8 && worst_p0 <= 1e-15 && worst_mass <= 0.0;
  return {pass, fmt::format("max |p_k - contour| = {:.3g} (tol 1e-8); theta=-1: max |p_0 - (1-a)q| = {:.3g}, "
                            "max (sum p - 1) = {:.3g}",
                            worst, worst_p0, worst_mass)};
}

Outcome duality_round_trip() {
  std::mt19937_64 rng(103);
  double worst_coeff = 0.0, worst_biv = 0.0;
  for (int table_case = 1; table_case <= 9; ++table_case) {
    for (int draw = 0; draw < 3; ++draw) {
      const auto p = theta_coefficients(oracles::draw_case(table_case, rng), kDefaultHermiteOrder);
      const Activation act = activation_from_coefficients(p);
      const auto back = activation_to_pgf(act, 30);
      for (int k = 0; k <= 30; ++k) {
        worst_coeff = std::max(worst_coeff, std::abs(back[static_cast<std::size_t>(k)] - p[static_cast<std::size_t>(k)]));
      }
      for (double s : {-0.99, -0.5, 0.0, 0.5, 0.9, 0.99}) {
        double series = 0.0;
        for (std::size_t k = p.size(); k-- > 0;) series = series * s + p[k];
        worst_biv = std::max(worst_biv, std::abs(bivariate_expectation(act, s) - series));
      }
    }
  }
  return {worst_coeff <= 1e-6 && worst_biv <= 1e-6,
          fmt::format("max coefficient error {:.3g}, max bivariate error {:.3g} (tol 1e-6)", worst_coeff, worst_biv)};
}

Outcome relu_oracle() {
  const Activation relu = Activation::relu();
  const auto p = activation_to_pgf(relu, 2);
  const double pi = std::numbers::pi;
  const double coeff = std::max({std::abs(p[0] - 1.0 / pi), std::abs(p[1] - 0.5), std::abs(p[2] - 0.5 / pi)});
  double worst = 0.0;
  for (int i = -99; i <= 99; ++i) {
    const double s = i / 100.0;
    worst = std::max(worst, std::abs(bivariate_expectation(relu, s) - oracles::relu_dual(s)));
  }
  return {coeff <= 1e-8 && worst <= 1e-8,
          fmt::format("max |p_k - exact| = {:.3g}, max arc-cosine error = {:.3g} (tol 1e-8)", coeff, worst)};
}

Outcome nngp_convergence() {
  const auto t0 = Clock::now();
  const std::vector<std::size_t> widths{64, 256, 1024};
  std::string detail;
  bool pass = true;
  struct Net {
    const char* name;
    MlpConfig config;
    std::function<double(double)> oracle;
  };
  const std::vector<Net> nets{
      {"relu", MlpConfig::pure({2, 1, 1, 1}, Activation::relu(), 2024),
       [](double r) { return oracles::relu_dual(oracles::relu_dual(r)); }},
      {"linear,relu", MlpConfig::mixed({2, 1, 1, 1}, {Activation::linear(), Activation::relu()}, 2025),
       [](double r) { return oracles::relu_dual(r); }},
  };
  for (const auto& net : nets) {
    for (double rho : {0.0, 0.5, 0.9}) {
      const std::vector<double> x{1.0, 0.0}, z{rho, std::sqrt(1.0 - rho * rho)};
      const StudyReport report = convergence_study(net.config, widths, x, z, 20000);
      const StudyRow& last = report.rows.back();
      const double se = last.estimate.standard_error;
      const double gap = last.estimate.value - net.oracle(rho);
      const bool ok = std::abs(gap) <= 3.0 * se && std::abs(last.gap) <= 3.0 * se;
      pass = pass && ok;
      detail += fmt::format("{}{} rho={}: gap={:.2e} se={:.2e};", detail.empty() ? "" : " ", net.name, rho, gap, se);
    }
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < 120.0;
  return {pass, fmt::format("width 1024, 20000 samples, |gap| <= 3 SE: {} {:.1f} s (limit 120 s)", detail, secs)};
}

Outcome infinite_depth() {
  const Pgf f2 = make_theta_pgf({.theta = 0.5, .a = 1.0, .c = 0.8, .r = 1.0});
  const Pgf f3 = make_theta_pgf({.theta = 0.5, .a = 0.5, .q = 0.3, .r = 1.0});
  const double v2 = pure_kernel_at(f2, 1000000, 0.0);
  const double v3 = pure_kernel_at(f3, 200, 0.0);
  return {f2.theta().table_case() == 2 && f3.theta().table_case() == 3 && std::abs(v2 - 1.0) <= 1e-5 &&
              std::abs(v3 - 0.3) <= 1e-6,
          fmt::format("case 2 n=1e6: |K - 1| = {:.3g} (tol 1e-5); case 3 n=200: |K - 0.3| = {:.3g} (tol 1e-6)",
                      std::abs(v2 - 1.0), std::abs(v3 - 0.3))};
}

Outcome cmixed_dichotomy() {
  const double pi = std::numbers::pi;
  std::vector<double> c;
  for (int k = 1; k <= 100000; ++k) c.push_back(6.0 / (pi * pi * k * k));
  const double conv = cmixed_kernel_at(1.0, c, 0.0);

  // c_k = 1/k: every prefix by sequential composition against the partial-sum closed form.
  const int n_max = 10000;
  std::vector<double> h(static_cast<std::size_t>(n_max));
  for (int k = 1; k <= n_max; ++k) h[static_cast<std::size_t>(k - 1)] = 1.0 / k;
  double worst = 0.0;
  bool increasing = true;
  for (double theta : {1.0, 0.5}) {
    for (double rho : {0.0, 0.5}) {
      const auto prefix = mixed_kernel_prefix(cmixed_pgfs(theta, h), rho);
      double harmonic = 0.0, prev = rho;
      for (int n = 1; n <= n_max; ++n) {
        harmonic += 1.0 / n;
        const double v = prefix[static_cast<std::size_t>(n - 1)];
        increasing = increasing && v > prev;
        prev = v;
        worst = std::max(worst, std::abs(v - cmixed_closed_form(theta, harmonic, rho)));
        // Explicit value when θ = 1, ρ = 0.
        if (theta == 1.0 && rho == 0.0) worst = std::max(worst, std::abs(v - (1.0 - 1.0 / (1.0 + harmonic))));
      }
    }
  }
  return {std::abs(conv - 0.5) <= 1e-4 && increasing && worst <= 1e-12,
          fmt::format("convergent sum: |K - 0.5| = {:.3g} (tol 1e-4); 1/k: increasing={}, max |K - closed| = {:.3g} "
                      "(tol 1e-12, n <= {})",
                      std::abs(conv - 0.5), increasing, worst, n_max)};
}

Outcome representation_identity() {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> ut(0.05, 1.0), uc(0.05, 2.0);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const double theta = ut(rng);
    std::vector<double> c(8);
    for (double& v : c) v = uc(rng);
    for (std::size_t k = 1; k <= 8; ++k) {
      const Pgf g = cmixed_pure_representation(theta, c, k);
      const std::span<const double> head(c.data(), k);
      for (double rho : kRhoGrid) {
        worst = std::max(worst, std::abs(pure_kernel_at(g, static_cast<std::int64_t>(k), rho) - cmixed_kernel_at(theta, head, rho)));
      }
    }
  }
  return {worst <= 1e-12, fmt::format("max |K_1:k - (g_k)_(k)| = {:.3g} (tol 1e-12)", worst)};
}

Outcome sphere_psd() {
  std::mt19937_64 rng(109);
  double worst_ratio = 0.0, worst_rel = 0.0;
  for (int m : {3, 10}) {
    const auto pts = unit_points(200, m, 900 + static_cast<std::uint64_t>(m));
    for (int table_case = 1; table_case <= 9; ++table_case) {
      const KernelSpec spec = KernelSpec::pure(make_theta_pgf(oracles::draw_case(table_case, rng)), 3);
      const Eigen::MatrixXd g = gram(spec, pts);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
      worst_ratio = std::min(worst_ratio, es.eigenvalues().minCoeff() / g.trace());

      const Eigensystem sys = eigensystem(spec, m, 40);
      double lhs = 0.0, rhs = 0.0;
      for (const auto& e : sys.entries) {
        lhs += e.lambda * static_cast<double>(e.multiplicity);
        rhs += e.p;
      }
      rhs *= sphere_surface_area(m);
      worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / std::abs(rhs));
    }
  }
  return {worst_ratio >= -1e-8 && worst_rel <= 1e-10,
          fmt::format("min eigenvalue / trace = {:.3g} (floor -1e-8); eigen-sum relative error {:.3g} (tol 1e-10)",
                      worst_ratio, worst_rel)};
}

Outcome gp_sanity() {
  const KernelSpec spec = KernelSpec::pure(make_theta_pgf({.theta = 0.5, .a = 1.0, .c = 0.8, .r = 1.0}), 3);
  std::mt19937_64 rng(110);
  std::normal_distribution<double> g;
  auto draw = [&](int count) {
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(3));
    for (auto& p : pts) {
      for (double& v : p) v = g(rng);
    }
    return pts;
  };
  const auto x = draw(40);
  std::vector<double> y;
  for (const auto& p : x) y.push_back(std::sin(p[0]) + p[1] * p[2]);
  const GpModel model = fit(spec, x, y, 0.0);
  const GpPrediction at_train = predict(model, x);
  double interp = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) interp = std::max(interp, std::abs(at_train.means[i] - y[i]));

  double excess = -1.0;
  auto queries = draw(300);
  queries.insert(queries.end(), x.begin(), x.end());
  for (double noise : {0.0, 0.05}) {
    const GpModel m = fit(spec, x, y, noise);
    const GpPrediction pr = predict(m, queries);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      excess = std::max(excess, pr.variances[i] - spec(queries[i], queries[i]));
    }
  }
  return {interp <= 1e-6 && excess <= 1e-10,
          fmt::format("interpolation error {:.3g} (tol 1e-6); max (posterior - prior) = {:.3g} (tol 1e-10); jitter {}",
                      interp, excess, model.jitter())};
}

Outcome figure1() {
  const FigureCurve lin = figure1_curve("linear");
  const auto p = theta_coefficients(lin.params, kDefaultHermiteOrder);
  double higher = 0.0;
  for (std::size_t k = 2; k < p.size(); ++k) higher = std::max(higher, std::abs(p[k]));
  double affine = 0.0;
  for (std::size_t i = 0; i < lin.xs.size(); ++i) {
    affine = std::max(affine, std::abs(lin.theta_phi[i] - (std::sqrt(p[0]) + std::sqrt(p[1]) * lin.xs[i])));
  }

  // Recorded sup-distances on [-2, 2].
  struct Recorded {
    const char* name;
    double sup;
  };
  bool stable = true;
  std::string detail;
  for (const Recorded& r : {Recorded{"prelu", 0.53099627742181099}, Recorded{"relu", 0.82025174281686963}}) {
    const FigureCurve a = figure1_curve(r.name), b = figure1_curve(r.name);
    const bool same = a.theta_phi.size() == b.theta_phi.size() &&
                      std::memcmp(a.theta_phi.data(), b.theta_phi.data(), a.theta_phi.size() * sizeof(double)) == 0 &&
                      a.sup_distance == b.sup_distance && a.sup_distance == r.sup;
    stable = stable && same;
    detail += fmt::format(" {} sup={}{};", r.name, format_number(a.sup_distance), same ? "" : " (drifted)");
  }
  return {higher == 0.0 && affine <= 1e-14 && stable,
          fmt::format("linear: max |p_k|, k>=2 = {:.3g}, max affine residual {:.3g};{}", higher, affine, detail)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"closed-form iteration table", table1_equivalence},
      {"coefficient consistency", coefficient_consistency},
      {"duality round trip", duality_round_trip},
      {"relu oracle", relu_oracle},
      {"finite-width covariance convergence", nngp_convergence},
      {"infinite-depth limits", infinite_depth},
      {"c-mixed dichotomy", cmixed_dichotomy},
      {"representation identity", representation_identity},
      {"PSD on the sphere", sphere_psd},
      {"GP sanity", gp_sanity},
      {"activation comparison curves", figure1},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
