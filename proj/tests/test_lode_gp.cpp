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

#include "gpmpc/lode_gp.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "gpmpc/mpc.hpp"
#include "test_helpers.hpp"

using gpmpc::LatentKind;
using gpmpc::LodeGpModel;
using gpmpc::OperatorMatrix;
using gpmpc::OperatorPoly;
using gpmpc::Rational;
using gpmpc::testing::make_two_tank_fixture;

namespace {
const OperatorPoly kDt = gpmpc::dt_operator();
const OperatorPoly kOne{Rational(1)};

LodeGpModel identity_se_model(int dz, gpmpc::Hyperparameters hyper) {
  gpmpc::LatentKernelSpec latent(static_cast<std::size_t>(dz),
                                 {LatentKind::SquaredExponential, {}});
  return LodeGpModel(OperatorMatrix::identity(dz), latent, Eigen::VectorXd::Zero(dz), dz - 1, 1,
                     hyper);
}

}  // namespace

TEST_CASE("latent kernel classification for the two-tank Smith form") {
  const auto fixture = make_two_tank_fixture();
  // D = [[1,0,0],[0,1,0]]: two pinned dimensions, one degree of freedom,
  // matching the single control input.
  const auto spec = gpmpc::construct_latent_kernel(fixture.smith.D);
  REQUIRE(spec.size() == 3);
  CHECK(spec[0].kind == LatentKind::Zero);
  CHECK(spec[1].kind == LatentKind::Zero);
  CHECK(spec[2].kind == LatentKind::SquaredExponential);
}

TEST_CASE("latent kernel classification of constants and polynomials") {
  OperatorMatrix one(1, 1);
  one(0, 0) = kOne;
  const auto spec = gpmpc::construct_latent_kernel(one);
  REQUIRE(spec.size() == 1);
  CHECK(spec[0].kind == LatentKind::Zero);

  // (dt - 1)(dt - 2) = dt^2 - 3 dt + 2: distinct rational roots {1, 2}.
  OperatorMatrix solution(1, 1);
  solution(0, 0) = (kDt - kOne) * (kDt - OperatorPoly(Rational(2)));
  const auto spec2 = gpmpc::construct_latent_kernel(solution);
  REQUIRE(spec2.size() == 1);
  REQUIRE(spec2[0].kind == LatentKind::Solution);
  REQUIRE(spec2[0].roots.size() == 2);
  CHECK(spec2[0].roots[0] == Rational(1));
  CHECK(spec2[0].roots[1] == Rational(2));
}

TEST_CASE("latent kernel rejects repeated and non-rational roots") {
  OperatorMatrix repeated(1, 1);
  repeated(0, 0) = (kDt - kOne) * (kDt - kOne);
  CHECK_THROWS_AS(gpmpc::construct_latent_kernel(repeated), gpmpc::UnsupportedSystemError);

  OperatorMatrix complex_roots(1, 1);
  complex_roots(0, 0) = kDt * kDt + kOne;  // roots +-i
  CHECK_THROWS_AS(gpmpc::construct_latent_kernel(complex_roots), gpmpc::UnsupportedSystemError);

  OperatorMatrix irrational(1, 1);
  irrational(0, 0) = kDt * kDt - OperatorPoly(Rational(2));  // roots +-sqrt(2)
  CHECK_THROWS_AS(gpmpc::construct_latent_kernel(irrational), gpmpc::UnsupportedSystemError);

  OperatorMatrix off_diagonal(2, 2);
  off_diagonal(0, 1) = kOne;
  CHECK_THROWS_AS(gpmpc::construct_latent_kernel(off_diagonal), std::invalid_argument);
}

TEST_CASE("latent kernels of random controllable linearizations are 0/1") {
  // Smith diagonals of [A - I dt | B] stay within {0, 1} entries for
  // generic (A, B); the latent spec then mixes Zero and SE only.
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int dx = 1 + trial % 4;
    const int du = 1 + trial % 2;
    Eigen::MatrixXd a(dx, dx), b(dx, du);
    for (int i = 0; i < dx; ++i) {
      for (int j = 0; j < dx; ++j) a(i, j) = uni(rng);
      for (int j = 0; j < du; ++j) b(i, j) = uni(rng);
    }
    const auto smith = smith_normal_form(gpmpc::build_operator_matrix(a, b, 1000000));
    const auto spec = gpmpc::construct_latent_kernel(smith.D);
    for (const auto& dim : spec)
      CHECK(dim.kind != LatentKind::Solution);
  }
}

TEST_CASE("identity pushforward gives a diagonal SE covariance") {
  const gpmpc::Hyperparameters hyper{1.44, 2.0};
  const LodeGpModel model = identity_se_model(3, hyper);
  const Eigen::MatrixXd k = model.covariance(0.7, -0.4);
  const double expected = gpmpc::se_kernel(0.7, -0.4, hyper);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(k(i, j) == doctest::Approx(i == j ? expected : 0.0));
}

TEST_CASE("two-tank covariance at equal inputs is symmetric PSD") {
  const auto fixture = make_two_tank_fixture();
  const Eigen::MatrixXd k = fixture.model.covariance(1.0, 1.0);
  REQUIRE(k.rows() == 3);
  CHECK((k - k.transpose()).lpNorm<Eigen::Infinity>() < 1e-10 * k.norm());
  const Eigen::VectorXd eigs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues();
  CHECK(eigs.minCoeff() > -1e-8 * eigs.maxCoeff());
}

TEST_CASE("covariance transposition symmetry") {
  const auto fixture = make_two_tank_fixture();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double t = uni(rng), t2 = uni(rng);
    const Eigen::MatrixXd k = fixture.model.covariance(t, t2);
    const Eigen::MatrixXd kt = fixture.model.covariance(t2, t);
    CHECK((k - kt.transpose()).lpNorm<Eigen::Infinity>() <
          1e-12 * std::max(1.0, k.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("solution kernels satisfy their scalar ODE") {
  // Latent dim with roots {-1, -1/2}: k(t,t') = sum_r e^(rt) e^(rt'). Any
  // posterior-style combination f(t) = k(t, c) must satisfy
  // (dt + 1)(dt + 1/2) f = 0; check with finite differences.
  OperatorMatrix d(1, 1);
  d(0, 0) = (kDt + kOne) * (kDt + OperatorPoly(Rational(1, 2)));
  const auto spec = gpmpc::construct_latent_kernel(d);
  const LodeGpModel model(OperatorMatrix::identity(1), spec, Eigen::VectorXd::Zero(1), 0, 1,
                          gpmpc::Hyperparameters{1.0, 1.0});
  const auto f = [&](double t) { return model.covariance(t, 0.3)(0, 0); };
  const double h = 1e-4;
  for (const double t : {-0.5, 0.0, 0.8, 2.0}) {
    const double d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    const double d1 = (f(t + h) - f(t - h)) / (2.0 * h);
    const double ode = d2 + 1.5 * d1 + 0.5 * f(t);
    CHECK(std::abs(ode) < 1e-6);
  }
}

TEST_CASE("prior mean is the constant equilibrium stack") {
  const auto fixture = make_two_tank_fixture();
  const Eigen::VectorXd mu = fixture.model.prior_mean(12.3);
  REQUIRE(mu.size() == 3);
  CHECK(mu[0] == doctest::Approx(0.58716).epsilon(1e-4));
  CHECK(mu[1] == doctest::Approx(0.29358).epsilon(1e-4));
  CHECK(mu[2] == doctest::Approx(6e-5).epsilon(1e-10));
  CHECK(fixture.model.prior_mean(0.0) == fixture.model.prior_mean(1e4));
}

TEST_CASE("ode_residual vanishes on the constant equilibrium trajectory") {
  const auto fixture = make_two_tank_fixture();
  const Eigen::VectorXd z_eq = fixture.model.mean_shift();
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  const double res =
      gpmpc::ode_residual(fixture.model, [&](double) { return z_eq; }, grid);
  CHECK(res < 1e-14);
}

TEST_CASE("ode_residual flags a corrupted trajectory") {
  const auto fixture = make_two_tank_fixture();
  const Eigen::VectorXd z_eq = fixture.model.mean_shift();
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  // Adding sin(t) to x1 leaves a residual of about |cos(t)| ~ 1 near its max.
  const auto corrupted = [&](double t) {
    Eigen::VectorXd z = z_eq;
    z[0] += std::sin(t);
    return z;
  };
  const double res = gpmpc::ode_residual(fixture.model, corrupted, grid);
  CHECK(res > 0.1);
  CHECK_THROWS_AS(gpmpc::ode_residual(fixture.model, corrupted, {0.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("posterior mean of a conditioned model satisfies the ODE system") {
  const auto fixture = make_two_tank_fixture();
  gpmpc::Dataset data = gpmpc::make_init_point(
      0.0, fixture.start.x_eq, Eigen::VectorXd::Constant(1, 0.2 * fixture.params.u1_max));
  const auto post = gpmpc::condition(fixture.model, data);

  std::vector<double> grid;
  const int n = 500;
  for (int i = 0; i <= n; ++i) grid.push_back(20.0 * i / n);
  const auto mean_fn = [&](double t) { return post.mean(t); };
  const double res = gpmpc::ode_residual(fixture.model, mean_fn, grid);

  // Scale of dx/dt along the posterior mean, for a relative bound.
  double scale = 0.0;
  for (int i = 1; i < n; ++i) {
    const Eigen::VectorXd d =
        (post.mean(grid[i + 1]).head(2) - post.mean(grid[i - 1]).head(2)) / (grid[2] - grid[0]);
    scale = std::max(scale, d.lpNorm<Eigen::Infinity>());
  }
  CHECK(res <= 1e-3 * scale);

  // Halving the grid step shrinks the residual about 4x (second order).
  std::vector<double> fine;
  for (int i = 0; i <= 2 * n; ++i) fine.push_back(20.0 * i / (2 * n));
  const double res_fine = gpmpc::ode_residual(fixture.model, mean_fn, fine);
  CHECK(res_fine < res / 3.0);
}

TEST_CASE("lode gp model validates inputs") {
  const auto fixture = make_two_tank_fixture();
  CHECK_THROWS_AS(fixture.model.with_hyper({-1.0, 1.0}), std::invalid_argument);
  gpmpc::LatentKernelSpec latent(2, {LatentKind::SquaredExponential, {}});
  CHECK_THROWS_AS(LodeGpModel(OperatorMatrix::identity(3), latent, Eigen::VectorXd::Zero(3), 2, 1,
                              gpmpc::Hyperparameters{1.0, 1.0}),
                  std::invalid_argument);
}
