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

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "oracles.hpp"
#include "theta_kernels/errors.hpp"
#include "theta_kernels/kernel.hpp"

using namespace theta_kernels;

namespace {

std::vector<std::vector<double>> sphere_points(int count, int m, std::uint64_t seed) {
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

const std::vector<double> kRhoGrid = {-0.99, -0.5, 0.0, 0.5, 0.9, 0.999};

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("correlation") {
  const std::vector<double> x{1.0, 2.0, -3.0};
  CHECK(correlation(x, x) == 1.0);
  CHECK(correlation(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) == 0.0);
  CHECK(correlation(std::vector<double>{2.0, 0.0}, std::vector<double>{-5.0, 0.0}) == -1.0);
  CHECK_THROWS_AS(correlation(std::vector<double>{0.0, 0.0, 0.0}, x), ZeroVector);
  CHECK_THROWS_AS(correlation(std::vector<double>{1.0, 0.0}, x), DimensionMismatch);
  const std::vector<double> a{0.3, -1.7, 2.2}, b{1.1, 0.4, -0.9};
  CHECK(correlation(a, b) == correlation(b, a));
}

TEST_CASE("pure kernel hand values") {
  const Pgf f2 = make_theta_pgf({.theta = 1.0, .a = 1.0, .c = 1.0, .r = 1.0});
  CHECK(pure_kernel_at(f2, 2, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(pure_kernel_recursive(f2, 2, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const Pgf f6 = make_theta_pgf({.theta = -1.0, .a = 0.5, .q = 0.2});
  CHECK(pure_kernel_at(f6, 3, 0.0) == doctest::Approx(0.175).epsilon(1e-14));
  const Pgf f3 = make_theta_pgf({.theta = 0.5, .a = 0.5, .q = 0.3, .r = 1.0});
  for (int n : {1, 4, 50}) CHECK(pure_kernel_at(f3, n, 1.0) == 1.0);
  CHECK(pure_kernel_eval(f2, 2, std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 3.0}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("closed forms match recursion on all nine cases") {
  std::mt19937_64 rng(31);
  for (int table_case = 1; table_case <= 9; ++table_case) {
    for (int draw = 0; draw < 20; ++draw) {
      const Pgf f = make_theta_pgf(oracles::draw_case(table_case, rng));
      for (int n = 1; n <= 8; ++n) {
        for (double rho : kRhoGrid) {
          INFO("case " << table_case << " n " << n << " rho " << rho);
          CHECK(std::abs(table1_closed_form(f.theta(), n, rho) - pure_kernel_recursive(f, n, rho)) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("mixed kernels") {
  const Pgf f1 = make_theta_pgf({.theta = 1.0, .a = 1.0, .c = 1.0, .r = 1.0});
  const Pgf f2 = make_theta_pgf({.theta = 1.0, .a = 1.0, .c = 2.0, .r = 1.0});
  const std::vector<Pgf> fs{f1, f2};
  CHECK(mixed_kernel_at(fs, 0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(mixed_kernel_at(std::vector<Pgf>{f1}, 0.3) == pure_kernel_at(f1, 1, 0.3));
  CHECK_THROWS_AS(mixed_kernel_at(std::vector<Pgf>{}, 0.3), EmptySequence);
  const auto prefix = mixed_kernel_prefix(fs, 0.0);
  CHECK(prefix[0] == doctest::Approx(0.5));
  CHECK(prefix[1] == doctest::Approx(0.75));

  std::mt19937_64 rng(32);
  for (int table_case = 1; table_case <= 9; ++table_case) {
    const Pgf f = make_theta_pgf(oracles::draw_case(table_case, rng));
    const std::vector<Pgf> same(5, f);
    for (double rho : kRhoGrid) CHECK(std::abs(mixed_kernel_at(same, rho) - pure_kernel_at(f, 5, rho)) <= 1e-12);
  }
}

TEST_CASE("c-mixed hand values") {
  CHECK(cmixed_kernel_at(1.0, std::vector<double>{1.0, 2.0}, 0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(cmixed_kernel_at(1.0, std::vector<double>{5.0}, 1.0) == 1.0);
  CHECK(cmixed_kernel_at(0.5, std::vector<double>{0.25, 0.25}, 0.0) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(cmixed_kernel_at(0.0, std::vector<double>{1.0}, 0.0), InvalidRegime);
  CHECK_THROWS_AS(cmixed_kernel_at(1.0, std::vector<double>{1.0, -1.0}, 0.0), InvalidRegime);
}

TEST_CASE("c-mixed closed form equals sequential composition") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_int_distribution<int> len(1, 50);
  for (int draw = 0; draw < 20; ++draw) {
    const double theta = u(rng);
    std::vector<double> c(static_cast<std::size_t>(len(rng)));
    for (double& ck : c) ck = 2.0 * u(rng);
    const auto fs = cmixed_pgfs(theta, c);
    for (double rho : kRhoGrid) CHECK(std::abs(cmixed_kernel_at(theta, c, rho) - mixed_kernel_at(fs, rho)) <= 1e-12);
  }
}

TEST_CASE("pure representation of c-mixed kernels") {
  const Pgf g = cmixed_pure_representation(1.0, std::vector<double>{1.0, 3.0}, 2);
  CHECK(pure_kernel_at(g, 2, 0.0) == doctest::Approx(0.8).epsilon(1e-15));
  const std::vector<double> c{0.7, 0.1};
  const Pgf g1 = cmixed_pure_representation(0.4, c, 1);
  const Pgf f1 = cmixed_pgfs(0.4, c)[0];
  for (double s : {0.0, 0.5, 0.9}) CHECK(g1(s) == doctest::Approx(f1(s)).epsilon(1e-15));
  const std::vector<double> c3{0.2, 0.2, 0.2};
  const Pgf g3 = cmixed_pure_representation(0.5, c3, 3);
  CHECK(g3.theta().c == doctest::Approx(0.2).epsilon(1e-15));
  for (double rho : kRhoGrid) CHECK(std::abs(pure_kernel_at(g3, 3, rho) - cmixed_kernel_at(0.5, c3, rho)) <= 1e-12);
  CHECK_THROWS_AS(cmixed_pure_representation(0.5, c3, 4), IndexOutOfRange);
  CHECK_THROWS_AS(cmixed_pure_representation(0.5, c3, 0), IndexOutOfRange);
}

TEST_CASE("infinite-depth limits") {
  const Pgf f2 = make_theta_pgf({.theta = 0.7, .a = 1.0, .c = 0.4, .r = 1.0});
  for (double rho : {-0.5, 0.0, 0.9}) CHECK(kernel_limit(f2, rho) == 1.0);
  const Pgf f6 = make_theta_pgf({.theta = -1.0, .a = 0.5, .q = 0.3});
  CHECK(kernel_limit(f6, 0.5) == doctest::Approx(0.3).epsilon(1e-15));
  // Closed form a^n + (1 - a^n) q at ρ = 1 tends to q, not 1.
  CHECK(kernel_limit(f6, 1.0) == doctest::Approx(0.3).epsilon(1e-15));
  const Pgf f3 = make_theta_pgf({.theta = 0.5, .a = 0.5, .q = 0.3, .r = 1.0});
  CHECK(kernel_limit(f3, 1.0) == 1.0);
  CHECK(kernel_limit(f3, 0.2) == doctest::Approx(0.3).epsilon(1e-12));

  CHECK(kernel_limit(CMixedLimit{1.0, SumBehavior::kConverges, 1.0}, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kernel_limit(CMixedLimit{1.0, SumBehavior::kDiverges, 0.0}, 0.0) == 1.0);
  CHECK_THROWS_AS(kernel_limit(CMixedLimit{1.0, SumBehavior::kUnknown, 0.0}, 0.0), UnknownSumConvergence);
}

TEST_CASE("distance to the limit is nonincreasing in depth for cases 3 to 9") {
  std::mt19937_64 rng(34);
  for (int table_case = 3; table_case <= 9; ++table_case) {
    for (int draw = 0; draw < 5; ++draw) {
      const Pgf f = make_theta_pgf(oracles::draw_case(table_case, rng));
      for (double rho : {-0.5, 0.0, 0.5, 0.9}) {
        const double limit = kernel_limit(f, rho);
        double prev = std::abs(pure_kernel_at(f, 1, rho) - limit);
        for (int n = 2; n <= 40; ++n) {
          const double d = std::abs(pure_kernel_at(f, n, rho) - limit);
          INFO("case " << table_case << " rho " << rho << " n " << n);
          // Floor at the rounding level of values near 1.
          CHECK(d <= prev + 1e-13);
          prev = d;
        }
      }
    }
  }
}

TEST_CASE("c-mixed dichotomy with c_k = 1/k") {
  std::vector<double> c;
  double prev = 0.0, harmonic = 0.0;
  for (int n = 1; n <= 2000; ++n) {
    c.push_back(1.0 / n);
    harmonic += 1.0 / n;
    const double v = cmixed_kernel_at(1.0, c, 0.0);
    CHECK(v > prev);
    CHECK(std::abs(v - (1.0 - 1.0 / (1.0 + harmonic))) <= 1e-12);
    prev = v;
  }
  CHECK(prev > 1.0 - 0.2);
}

TEST_CASE("kernel symmetry is exact") {
  const KernelSpec k = KernelSpec::pure(make_theta_pgf({.theta = 0.3, .a = 0.6, .q = 0.1, .r = 2.0}), 4);
  const std::vector<double> x{0.3, 1.2, -0.4}, z{-2.0, 0.5, 0.8};
  CHECK(k(x, z) == k(z, x));
}

TEST_CASE("gram matrices") {
  const KernelSpec pure6 = KernelSpec::pure(make_theta_pgf({.theta = -1.0, .a = 0.5, .q = 0.0}), 1);
  const auto g = gram(pure6, {{1.0, 0.0}, {-2.0, 0.0}});
  CHECK(g(0, 0) == doctest::Approx(0.5));
  CHECK(g(1, 1) == doctest::Approx(0.5));
  CHECK(g(0, 1) == doctest::Approx(-0.5));
  CHECK(g(1, 0) == g(0, 1));
  const auto one = gram(pure6, {{0.0, 3.0}});
  CHECK(one(0, 0) == doctest::Approx(pure6.at(1.0)));
  CHECK_THROWS_AS(gram(pure6, {{0.0, 0.0}}), ZeroVector);
  CHECK_THROWS_AS(gram(pure6, {{1.0, 0.0}, {1.0}}), DimensionMismatch);
}

TEST_CASE("gram matrices are PSD on the sphere") {
  std::mt19937_64 rng(35);
  for (int m : {3, 10}) {
    for (int table_case : {2, 3, 6, 8, 9}) {
      const KernelSpec spec = KernelSpec::pure(make_theta_pgf(oracles::draw_case(table_case, rng)), 3);
      const auto g = gram(spec, sphere_points(200, m, 100 + static_cast<std::uint64_t>(m)));
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
      INFO("m " << m << " case " << table_case);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8 * g.trace());
    }
  }
}

TEST_CASE("sphere multiplicities") {
  CHECK(sphere_multiplicity(3, 0) == 1);
  CHECK(sphere_multiplicity(3, 1) == 3);
  CHECK(sphere_multiplicity(3, 2) == 5);
  CHECK(sphere_multiplicity(4, 2) == 9);
  CHECK(sphere_multiplicity(10, 1) == 10);
  CHECK(sphere_multiplicity(2, 5) == 2);
  CHECK_THROWS_AS(sphere_multiplicity(1, 2), DimensionUnsupported);
  CHECK(sphere_surface_area(3) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(sphere_surface_area(2) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("eigensystem") {
  const KernelSpec spec = KernelSpec::pure(make_theta_pgf({.theta = 0.0, .a = 0.4, .q = 0.0, .r = 1.0}), 2);
  const Eigensystem sys = eigensystem(spec, 3, 20);
  CHECK(sys.entries.size() == 21);
  CHECK(std::abs(sys.entries[0].lambda) <= 1e-12);
  double lhs = 0.0, rhs = 0.0;
  for (const auto& e : sys.entries) {
    CHECK(e.lambda >= -1e-12);
    lhs += e.lambda * static_cast<double>(e.multiplicity);
    rhs += e.p;
  }
  rhs *= sphere_surface_area(3);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
  CHECK(lhs <= sphere_surface_area(3) * pure_kernel_at(spec.layers()[0], 2, 1.0) + 1e-8);
  CHECK_THROWS_AS(eigensystem(spec, 1, 5), DimensionUnsupported);
}

TEST_CASE("kernel spec dispatch") {
  const Pgf f = make_theta_pgf({.theta = 1.0, .a = 1.0, .c = 1.0, .r = 1.0});
  const KernelSpec pure = KernelSpec::pure(f, 2);
  CHECK(pure.at(0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(std::abs(pure.at(std::complex<double>(0.0, 0.0)) - 2.0 / 3.0) <= 1e-15);
  const KernelSpec cm = KernelSpec::cmixed(1.0, {1.0, 2.0});
  CHECK(cm.at(0.0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(KernelSpec::pure(f, 0), ValidationError);
  CHECK_THROWS_AS(KernelSpec::mixed({}), EmptySequence);
}

}  // TEST_SUITE
