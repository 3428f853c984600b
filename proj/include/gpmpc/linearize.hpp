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

#ifndef GPMPC_LINEARIZE_HPP_
#define GPMPC_LINEARIZE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

#include "gpmpc/poly_matrix.hpp"

namespace gpmpc {

/// Continuous-time nonlinear system x' = f(x, u).
struct NonlinearSystem {
  int state_dim = 0;
  int control_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> rhs;
  /// Optional analytic Jacobians (df/dx, df/du); finite differences are used
  /// when absent.
  std::function<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>(const Eigen::VectorXd&,
                                                            const Eigen::VectorXd&)>
      analytic_jacobians;
  /// Optional componentwise state validity box; size-0 vectors mean unbounded.
  Eigen::VectorXd state_lower;
  Eigen::VectorXd state_upper;
};

/// Linearization x' ~= A (x - x_eq) + B (u - u_eq) about an equilibrium.
struct LinearizedSystem {
  Eigen::VectorXd x_eq;
  Eigen::VectorXd u_eq;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  bool asymptotically_stable = false;
};

/// Thrown when the stability test meets a characteristic root on (or
/// numerically indistinguishable from) the imaginary axis.
struct MarginalStabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Damped Newton iteration on x -> f(x, u_eq) from x_guess. Returns x_eq with
/// ||f(x_eq, u_eq)||_inf <= tol. The starting guess selects the solution
/// branch when several equilibria exist.
Eigen::VectorXd find_equilibrium(const NonlinearSystem& sys, const Eigen::VectorXd& u_eq,
                                 const Eigen::VectorXd& x_guess, double tol = 1e-10,
                                 int max_iter = 100);

/// (df/dx, df/du) at (x, u): analytic if the system provides them, otherwise
/// central differences with step max(1e-6, 1e-6*|coordinate|).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> jacobians(const NonlinearSystem& sys,
                                                      const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& u);

/// True iff every characteristic root of A has negative real part, decided by
/// the Routh-Hurwitz criterion on Faddeev-LeVerrier characteristic
/// coefficients. Throws MarginalStabilityError when a Routh pivot falls
/// within 1e-12 of zero.
bool check_asymptotic_stability(const Eigen::MatrixXd& A);

/// Homogeneous operator matrix [A - I*dt | B] with entries converted to exact
/// rationals (denominators bounded by max_denominator).
OperatorMatrix build_operator_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     std::int64_t max_denominator = 1000000000000LL);

/// Convenience pipeline: equilibrium, Jacobians, stability flag.
LinearizedSystem linearize(const NonlinearSystem& sys, const Eigen::VectorXd& u_eq,
                           const Eigen::VectorXd& x_guess, double tol = 1e-10);

}  // namespace gpmpc

#endif  // GPMPC_LINEARIZE_HPP_
