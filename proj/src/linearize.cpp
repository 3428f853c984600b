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

#include <cmath>
#include <sstream>
#include <vector>

namespace gpmpc {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& at, int out_dim) {
  Eigen::MatrixXd jac(out_dim, at.size());
  Eigen::VectorXd probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double h = std::max(1e-6, 1e-6 * std::abs(at[i]));
    probe[i] = at[i] + h;
    const Eigen::VectorXd fp = f(probe);
    probe[i] = at[i] - h;
    const Eigen::VectorXd fm = f(probe);
    probe[i] = at[i];
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  if (!all_finite(jac))
    throw std::runtime_error("jacobians: non-finite finite differences (nondifferentiable point?)");
  return jac;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> jacobians(const NonlinearSystem& sys,
                                                      const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& u) {
  if (sys.analytic_jacobians) {
    auto [a, b] = sys.analytic_jacobians(x, u);
    if (!all_finite(a) || !all_finite(b))
      throw std::runtime_error("jacobians: analytic Jacobian non-finite");
    return {a, b};
  }
  const Eigen::MatrixXd a =
      fd_jacobian([&](const Eigen::VectorXd& xx) { return sys.rhs(xx, u); }, x, sys.state_dim);
  const Eigen::MatrixXd b =
      fd_jacobian([&](const Eigen::VectorXd& uu) { return sys.rhs(x, uu); }, u, sys.state_dim);
  return {a, b};
}

Eigen::VectorXd find_equilibrium(const NonlinearSystem& sys, const Eigen::VectorXd& u_eq,
                                 const Eigen::VectorXd& x_guess, double tol, int max_iter) {
  if (tol <= 0) throw std::invalid_argument("find_equilibrium: tol must be positive");
  Eigen::VectorXd x = x_guess;
  Eigen::VectorXd fx = sys.rhs(x, u_eq);
  double res = fx.lpNorm<Eigen::Infinity>();

  for (int it = 0; it < max_iter; ++it) {
    if (res <= tol) return x;
    const Eigen::MatrixXd jac = jacobians(sys, x, u_eq).first;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible())
      throw std::runtime_error("find_equilibrium: singular Jacobian at iterate");
    const Eigen::VectorXd step = lu.solve(fx);

    // Step halving keeps the iteration inside the region where the residual
    // improves; the square-root dynamics blow up near x1 = x2.
    double damping = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      Eigen::VectorXd cand = x - damping * step;
      if (sys.state_lower.size() == cand.size()) cand = cand.cwiseMax(sys.state_lower);
      if (sys.state_upper.size() == cand.size()) cand = cand.cwiseMin(sys.state_upper);
      const Eigen::VectorXd fc = sys.rhs(cand, u_eq);
      const double rc = fc.lpNorm<Eigen::Infinity>();
      if (std::isfinite(rc) && rc < res) {
        x = cand;
        fx = fc;
        res = rc;
        accepted = true;
        break;
      }
      damping *= 0.5;
    }
    if (!accepted) break;
  }
  if (res <= tol) return x;
  std::ostringstream msg;
  msg << "find_equilibrium: no convergence, final residual " << res << " > tol " << tol;
  throw std::runtime_error(msg.str());
}

bool check_asymptotic_stability(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw std::invalid_argument("check_asymptotic_stability: need a square matrix, d_x >= 1");
  const int n = static_cast<int>(A.rows());
  constexpr double kMarginTol = 1e-12;

  // Characteristic coefficients lambda^n + c[1] lambda^(n-1) + ... + c[n]
  // via the Faddeev-LeVerrier recurrence.
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = A * m + c[static_cast<std::size_t>(k - 1)] * Eigen::MatrixXd::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(A * m).trace() / k;
  }

  // Routh array; stability iff the first column stays positive.
  const int width = n / 2 + 1;
  std::vector<std::vector<double>> routh(static_cast<std::size_t>(n) + 1,
                                         std::vector<double>(static_cast<std::size_t>(width) + 1, 0.0));
  for (int j = 0; 2 * j <= n; ++j) routh[0][static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(2 * j)];
  for (int j = 0; 2 * j + 1 <= n; ++j) routh[1][static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(2 * j + 1)];

  for (int i = 2; i <= n; ++i) {
    const double pivot = routh[static_cast<std::size_t>(i - 1)][0];
    if (std::abs(pivot) <= kMarginTol)
      throw MarginalStabilityError(
          "check_asymptotic_stability: marginal case (characteristic root on the imaginary axis)");
    for (int j = 0; j < width; ++j) {
      routh[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          (pivot * routh[static_cast<std::size_t>(i - 2)][static_cast<std::size_t>(j + 1)] -
           routh[static_cast<std::size_t>(i - 2)][0] *
               routh[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j + 1)]) /
          pivot;
    }
  }

  bool stable = true;
  for (int i = 0; i <= n; ++i) {
    const double lead = routh[static_cast<std::size_t>(i)][0];
    if (std::abs(lead) <= kMarginTol)
      throw MarginalStabilityError(
          "check_asymptotic_stability: marginal case (characteristic root on the imaginary axis)");
    if (lead < 0.0) stable = false;
  }
  return stable;
}

OperatorMatrix build_operator_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     std::int64_t max_denominator) {
  if (A.rows() != A.cols() || B.rows() != A.rows())
    throw std::invalid_argument("build_operator_matrix: incompatible shapes");
  const int dx = static_cast<int>(A.rows());
  const int du = static_cast<int>(B.cols());
  OperatorMatrix h(dx, dx + du);
  for (int i = 0; i < dx; ++i) {
    for (int j = 0; j < dx; ++j) {
      OperatorPoly e(rational_from_double(A(i, j), max_denominator));
      if (i == j) e -= dt_operator();
      h(i, j) = e;
    }
    for (int j = 0; j < du; ++j)
      h(i, dx + j) = OperatorPoly(rational_from_double(B(i, j), max_denominator));
  }
  return h;
}

LinearizedSystem linearize(const NonlinearSystem& sys, const Eigen::VectorXd& u_eq,
                           const Eigen::VectorXd& x_guess, double tol) {
  LinearizedSystem lin;
  lin.u_eq = u_eq;
  lin.x_eq = find_equilibrium(sys, u_eq, x_guess, tol);
  std::tie(lin.A, lin.B) = jacobians(sys, lin.x_eq, u_eq);
  lin.asymptotically_stable = check_asymptotic_stability(lin.A);
  return lin;
}

}  // namespace gpmpc
