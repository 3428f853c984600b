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

#ifndef GPMPC_PLANT_HPP_
#define GPMPC_PLANT_HPP_

#include <Eigen/Dense>

#include "gpmpc/linearize.hpp"

namespace gpmpc {

/// Two connected water tanks: the pump feeds tank 1, valve V12 couples the
/// tanks, valve V2R drains tank 2 into the reservoir. All values SI.
struct TwoTankParams {
  double tank_area = 0.015;  // m^2
  double u1_max = 2e-4;      // m^3/s
  double c12 = 2.5e-5;       // m^2
  double c2r = 2.5e-5;       // m^2
  double gravity = 9.81;     // m/s^2
};

/// Right-hand side of the two-tank ODEs. Levels must be nonnegative.
Eigen::Vector2d two_tank_rhs(const Eigen::Vector2d& x, double u1, const TwoTankParams& p);

/// The two-tank plant as a NonlinearSystem (d_x = 2, d_u = 1) with analytic
/// Jacobians and the nonnegativity domain attached.
NonlinearSystem two_tank_system(const TwoTankParams& p);

struct PlantState {
  Eigen::VectorXd x;
  double t = 0.0;
};

/// One classical RK4 step with zero-order-hold control; the result is clamped
/// to the system's state domain. Throws on non-finite values. clamp_counter,
/// when given, is incremented once per step whose result required clamping.
Eigen::VectorXd rk4_step(const NonlinearSystem& sys, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u, double h, long* clamp_counter = nullptr);

/// Integrate with constant control over [0, duration] in substeps of size h
/// (the final substep is shortened to fit).
PlantState simulate_hold(const NonlinearSystem& sys, const Eigen::VectorXd& x0,
                         const Eigen::VectorXd& u, double duration, double h = 0.01,
                         long* clamp_counter = nullptr);

}  // namespace gpmpc

#endif  // GPMPC_PLANT_HPP_
