// Copyright 2026 The gpmpc Authors
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

#include "gpmpc/linearize.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "gpmpc/plant.hpp"

using gpmpc::NonlinearSystem;
using gpmpc::TwoTankParams;

namespace {

NonlinearSystem scalar_linear_system() {
  NonlinearSystem sys;
  sys.state_dim = 1;
  sys.control_dim = 1;
  sys.rhs = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return -x + u;
  };
  return sys;
}

// Closed-form equilibrium of the two-tank system:
// x2 = u^2 / (2 g c2r^2), x1 = x2 + u^2 / (2 g c12^2).
Eigen::Vector2d analytic_equilibrium(double u, const TwoTankParams& p) {
  const double x2 = u * u / (2.0 * p.gravity * p.c2r * p.c2r);
  const double x1 = x2 + u * u / (2.0 * p.gravity * p.c12 * p.c12);
  return {x1, x2};
}

}  // namespace

TEST_CASE("find_equilibrium on a linear system") {
  const NonlinearSystem sys = scalar_linear_system();
  const Eigen::VectorXd x = gpmpc::find_equilibrium(sys, Eigen::VectorXd::Zero(1),
                                                    Eigen::VectorXd::Constant(1, 3.0));
  CHECK(std::abs(x[0]) < 1e-10);
}

TEST_CASE("find_equilibrium reproduces the analytic two-tank values") {
  const TwoTankParams p;
  const NonlinearSystem sys = gpmpc::two_tank_system(p);
  for (const double frac : {0.2, 0.3}) {
    const double u = frac * p.u1_max;
    const Eigen::Vector2d expected = analytic_equilibrium(u, p);
    const Eigen::VectorXd x = gpmpc::find_equilibrium(
        sys, Eigen::VectorXd::Constant(1, u), Eigen::Vector2d(0.4, 0.2), 1e-13);
    CHECK(std::abs(x[0] - expected[0]) <= 1e-8 * expected[0]);
    CHECK(std::abs(x[1] - expected[1]) <= 1e-8 * expected[1]);
    const double residual =
        sys.rhs(x, Eigen::VectorXd::Constant(1, u)).lpNorm<Eigen::Infinity>();
    CHECK(residual < 1e-12);
  }
  // The frozen reference values (u = 0.2 u_max and 0.3 u_max).
  CHECK(analytic_equilibrium(4e-5, p)[0] == doctest::Approx(0.26095).epsilon(1e-4));
  CHECK(analytic_equilibrium(4e-5, p)[1] == doctest::Approx(0.13048).epsilon(1e-4));
  CHECK(analytic_equilibrium(6e-5, p)[0] == doctest::Approx(0.58716).epsilon(1e-4));
  CHECK(analytic_equilibrium(6e-5, p)[1] == doctest::Approx(0.29358).epsilon(1e-4));
}

TEST_CASE("find_equilibrium reports non-convergence") {
  NonlinearSystem sys;
  sys.state_dim = 1;
  sys.control_dim = 1;
  // exp(-x) has no root; every Newton step improves the residual but never
  // reaches the tolerance within the iteration budget.
  sys.rhs = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, std::exp(-x[0]));
  };
  CHECK_THROWS_WITH_AS(gpmpc::find_equilibrium(sys, Eigen::VectorXd::Zero(1),
                                               Eigen::VectorXd::Zero(1), 1e-10, 8),
                       doctest::Contains("no convergence"), std::runtime_error);
}

TEST_CASE("find_equilibrium reports a singular Jacobian") {
  NonlinearSystem sys;
  sys.state_dim = 1;
  sys.control_dim = 1;
  sys.rhs = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, x[0] * x[0] + 1.0);  // f'(0) = 0
  };
  CHECK_THROWS_WITH_AS(gpmpc::find_equilibrium(sys, Eigen::VectorXd::Zero(1),
                                               Eigen::VectorXd::Zero(1), 1e-10, 25),
                       doctest::Contains("singular"), std::runtime_error);
}

TEST_CASE("jacobians of a linear system are exact") {
  const NonlinearSystem sys = scalar_linear_system();
  const auto [a, b] = gpmpc::jacobians(sys, Eigen::VectorXd::Constant(1, 0.7),
                                       Eigen::VectorXd::Constant(1, -0.2));
  CHECK(a(0, 0) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(b(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("two-tank analytic Jacobians match finite differences") {
  const TwoTankParams p;
  const NonlinearSystem sys = gpmpc::two_tank_system(p);
  NonlinearSystem fd_sys = sys;
  fd_sys.analytic_jacobians = nullptr;

  const Eigen::Vector2d x_eq = analytic_equilibrium(0.2 * p.u1_max, p);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, 0.2 * p.u1_max);

  const auto [a_an, b_an] = gpmpc::jacobians(sys, x_eq, u);
  const auto [a_fd, b_fd] = gpmpc::jacobians(fd_sys, x_eq, u);
  CHECK((a_an - a_fd).norm() / a_an.norm() < 1e-5);
  CHECK((b_an - b_fd).norm() / b_an.norm() < 1e-5);

  // A_e has the closed form [[-a, a], [a, -a-b]].
  const double a = (p.c12 / p.tank_area) * p.gravity /
                   std::sqrt(2.0 * p.gravity * (x_eq[0] - x_eq[1]));
  const double b = (p.c2r / p.tank_area) * p.gravity / std::sqrt(2.0 * p.gravity * x_eq[1]);
  CHECK(a_an(0, 0) == doctest::Approx(-a).epsilon(1e-12));
  CHECK(a_an(0, 1) == doctest::Approx(a).epsilon(1e-12));
  CHECK(a_an(1, 0) == doctest::Approx(a).epsilon(1e-12));
  CHECK(a_an(1, 1) == doctest::Approx(-a - b).epsilon(1e-12));
  CHECK(b_an(0, 0) == doctest::Approx(1.0 / p.tank_area).epsilon(1e-12));
  CHECK(b_an(1, 0) == 0.0);
}

TEST_CASE("finite-difference jacobians on smooth test functions") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double c1 = uni(rng), c2 = uni(rng), c3 = uni(rng);
    NonlinearSystem sys;
    sys.state_dim = 2;
    sys.control_dim = 1;
    sys.rhs = [=](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
      Eigen::VectorXd f(2);
      f << c1 * x[0] * x[0] + c2 * x[1] + u[0], c3 * x[0] * x[1] - u[0] * u[0];
      return f;
    };
    const Eigen::Vector2d x(uni(rng), uni(rng));
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, uni(rng));
    const auto [a, b] = gpmpc::jacobians(sys, x, u);

    Eigen::MatrixXd a_exact(2, 2), b_exact(2, 1);
    a_exact << 2.0 * c1 * x[0], c2, c3 * x[1], c3 * x[0];
    b_exact << 1.0, -2.0 * u[0];
    CHECK((a - a_exact).lpNorm<Eigen::Infinity>() < 1e-5);
    CHECK((b - b_exact).lpNorm<Eigen::Infinity>() < 1e-5);
  }
}

TEST_CASE("stability of diagonal and rotational systems") {
  Eigen::MatrixXd stable(2, 2);
  stable << -1.0, 0.0, 0.0, -2.0;
  CHECK(gpmpc::check_asymptotic_stability(stable));

  Eigen::MatrixXd rotation(2, 2);
  rotation << 0.0, 1.0, -1.0, 0.0;  // eigenvalues +-i
  CHECK_THROWS_AS(gpmpc::check_asymptotic_stability(rotation), gpmpc::MarginalStabilityError);

  Eigen::MatrixXd unstable(2, 2);
  unstable << 1.0, 0.0, 0.0, -2.0;
  CHECK_FALSE(gpmpc::check_asymptotic_stability(unstable));
}

TEST_CASE("two-tank equilibria are asymptotically stable") {
  const TwoTankParams p;
  const NonlinearSystem sys = gpmpc::two_tank_system(p);
  for (const double frac : {0.2, 0.3}) {
    const Eigen::Vector2d x_eq = analytic_equilibrium(frac * p.u1_max, p);
    const auto [a, b] = gpmpc::jacobians(sys, x_eq, Eigen::VectorXd::Constant(1, frac * p.u1_max));
    // 2x2 oracle: stable iff trace < 0 and det > 0.
    CHECK(a.trace() < 0.0);
    CHECK(a.determinant() > 0.0);
    CHECK(gpmpc::check_asymptotic_stability(a));
  }
}

TEST_CASE("stability agrees with an eigensolver oracle on random matrices") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + trial % 2;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = uni(rng);
    const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues();
    const double max_real = eigs.real().maxCoeff();
    if (std::abs(max_real) < 1e-6) continue;  // skip near-marginal draws
    CHECK(gpmpc::check_asymptotic_stability(a) == (max_real < 0.0));
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("build_operator_matrix shapes and entries") {
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << -1.0;
  b << 1.0;
  const gpmpc::OperatorMatrix h = gpmpc::build_operator_matrix(a, b);
  CHECK(h.rows() == 1);
  CHECK(h.cols() == 2);
  // -1 - dt | 1
  CHECK(h(0, 0) == gpmpc::OperatorPoly({gpmpc::Rational(-1), gpmpc::Rational(-1)}));
  CHECK(h(0, 1) == gpmpc::OperatorPoly(gpmpc::Rational(1)));

  Eigen::MatrixXd b0 = Eigen::MatrixXd::Zero(1, 1);
  const gpmpc::OperatorMatrix h0 = gpmpc::build_operator_matrix(a, b0);
  CHECK(h0(0, 1).is_zero());
}

TEST_CASE("two-tank operator matrix has degree-1 diagonal") {
  const TwoTankParams p;
  const NonlinearSystem sys = gpmpc::two_tank_system(p);
  const auto lin = gpmpc::linearize(sys, Eigen::VectorXd::Constant(1, 0.3 * p.u1_max),
                                    Eigen::Vector2d(0.4, 0.2));
  CHECK(lin.asymptotically_stable);
  const gpmpc::OperatorMatrix h = gpmpc::build_operator_matrix(lin.A, lin.B);
  CHECK(h.rows() == 2);
  CHECK(h.cols() == 3);
  CHECK(h(0, 0).degree() == 1);
  CHECK(h(1, 1).degree() == 1);
  CHECK(h(0, 1).degree() == 0);
  CHECK(h(1, 2).is_zero());
}
