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

#include "gpmpc/plant.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpmpc {

Eigen::Vector2d two_tank_rhs(const Eigen::Vector2d& x, double u1, const TwoTankParams& p) {
  if (x[0] < 0.0 || x[1] < 0.0)
    throw std::domain_error("two_tank_rhs: negative water level (caller must clamp)");
  const double diff = x[0] - x[1];
  const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  const double q12 = p.c12 * sign * std::sqrt(2.0 * p.gravity * std::abs(diff));
  const double q2r = p.c2r * std::sqrt(2.0 * p.gravity * x[1]);
  Eigen::Vector2d dx;
  dx[0] = (u1 - q12) / p.tank_area;
  dx[1] = (q12 - q2r) / p.tank_area;
  return dx;
}

NonlinearSystem two_tank_system(const TwoTankParams& p) {
  if (p.tank_area <= 0.0 || p.u1_max <= 0.0 || p.c12 <= 0.0 || p.c2r <= 0.0 || p.gravity <= 0.0)
    throw std::invalid_argument("two_tank_system: parameters must be strictly positive");
  NonlinearSystem sys;
  sys.state_dim = 2;
  sys.control_dim = 1;
  sys.rhs = [p](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return two_tank_rhs(Eigen::Vector2d(x[0], x[1]), u[0], p);
  };
  // d/dx of the signed square-root flows; valid away from x1 = x2 and x2 = 0.
  sys.analytic_jacobians = [p](const Eigen::VectorXd& x, const Eigen::VectorXd&)
      -> std::pair<Eigen::MatrixXd, Eigen::MatrixXd> {
    const double diff = x[0] - x[1];
    const double a = (p.c12 / p.tank_area) * p.gravity / std::sqrt(2.0 * p.gravity * std::abs(diff));
    const double b = (p.c2r / p.tank_area) * p.gravity / std::sqrt(2.0 * p.gravity * x[1]);
    Eigen::MatrixXd jac_x(2, 2);
    jac_x << -a, a, a, -a - b;
    Eigen::MatrixXd jac_u(2, 1);
    jac_u << 1.0 / p.tank_area, 0.0;
    return {jac_x, jac_u};
  };
  sys.state_lower = Eigen::Vector2d::Zero();
  return sys;
}

namespace {

// Intermediate RK4 stages may poke outside the validity domain even when the
// full step stays inside; keep stage inputs evaluable.
Eigen::VectorXd clamp_to_domain(const NonlinearSystem& sys, Eigen::VectorXd x) {
  if (sys.state_lower.size() == x.size()) x = x.cwiseMax(sys.state_lower);
  if (sys.state_upper.size() == x.size()) x = x.cwiseMin(sys.state_upper);
  return x;
}

}  // namespace

Eigen::VectorXd rk4_step(const NonlinearSystem& sys, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u, double h, long* clamp_counter) {
  if (h <= 0.0) throw std::invalid_argument("rk4_step: step size must be positive");
  const Eigen::VectorXd k1 = sys.rhs(x, u);
  const Eigen::VectorXd k2 = sys.rhs(clamp_to_domain(sys, x + 0.5 * h * k1), u);
  const Eigen::VectorXd k3 = sys.rhs(clamp_to_domain(sys, x + 0.5 * h * k2), u);
  const Eigen::VectorXd k4 = sys.rhs(clamp_to_domain(sys, x + h * k3), u);
  Eigen::VectorXd next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw std::runtime_error("rk4_step: integration produced non-finite state");
  bool clamped = false;
  if (sys.state_lower.size() == next.size()) {
    clamped = (next.array() < sys.state_lower.array()).any();
    next = next.cwiseMax(sys.state_lower);
  }
  if (sys.state_upper.size() == next.size()) {
    clamped = clamped || (next.array() > sys.state_upper.array()).any();
    next = next.cwiseMin(sys.state_upper);
  }
  if (clamped && clamp_counter) ++*clamp_counter;
  return next;
}

PlantState simulate_hold(const NonlinearSystem& sys, const Eigen::VectorXd& x0,
                         const Eigen::VectorXd& u, double duration, double h,
                         long* clamp_counter) {
  if (duration < 0.0) throw std::invalid_argument("simulate_hold: negative duration");
  if (h <= 0.0) throw std::invalid_argument("simulate_hold: substep must be positive");
  PlantState state{x0, 0.0};
  double remaining = duration;
  while (remaining > 1e-15 * std::max(1.0, duration)) {
    const double step = std::min(h, remaining);
    state.x = rk4_step(sys, state.x, u, step, clamp_counter);
    state.t += step;
    remaining -= step;
  }
  state.t = duration;
  return state;
}

}  // namespace gpmpc
