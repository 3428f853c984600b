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

#ifndef GPMPC_MPC_HPP_
#define GPMPC_MPC_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gpmpc/gp.hpp"
#include "gpmpc/plant.hpp"

namespace gpmpc {

/// Componentwise bounds on the stacked vector z = [x; u], plant units.
struct BoxConstraints {
  Eigen::VectorXd z_min;
  Eigen::VectorXd z_max;

  void validate() const {
    if (z_min.size() != z_max.size() || (z_min.array() > z_max.array()).any())
      throw std::invalid_argument("BoxConstraints: need z_min <= z_max componentwise");
  }
};

enum class ConstraintMode { PhysicalBox, ReferenceBand };

struct MpcConfig {
  double horizon = 10.0;         // T_h, seconds
  int n_constraint_points = 10;  // m_c
  double dt = 1.0;               // control sample time, seconds
  bool use_endpoint = false;
  double t_ref = 100.0;          // endpoint time (absolute), seconds
  bool post_ref_hold = false;    // apply u_eq directly once t >= t_ref
  Eigen::VectorXd z_ref;         // [x_ref; u_eq]
  ConstraintMode mode = ConstraintMode::PhysicalBox;
  double band_fraction = 0.1;    // ReferenceBand half-width as fraction of z_ref
  BoxConstraints physical_box;

  /// The box the soft constraints encode (and the violation metric uses):
  /// the physical box, or the band [(1-f) z_ref, (1+f) z_ref].
  BoxConstraints active_box() const;

  void validate() const;
};

/// Soft box encoding: one pseudo-observation per time at the box midpoint
/// with noise variance a quarter of the box width.
Dataset make_soft_constraints(const BoxConstraints& box, const std::vector<double>& times);

/// Hard initial-condition pin [x0; u_prev] with jitter-level noise.
Dataset make_init_point(double t0, const Eigen::VectorXd& x0, const Eigen::VectorXd& u_prev);

/// Endpoint constraint at t_ref with zero noise (lifted to jitter at Gram
/// assembly).
Dataset make_endpoint(double t_ref, const Eigen::VectorXd& z_ref);

/// Receding-horizon controller: each step conditions the LODE-GP on the
/// moving-horizon dataset and reads the control from the posterior mean.
class Controller {
 public:
  Controller(LodeGpModel model, MpcConfig config, Eigen::VectorXd u_initial);

  /// Constraint dataset for the current step, in relative time (init point
  /// at 0, soft constraints spanning [1 s, horizon], endpoint at t_ref - t
  /// while not yet passed).
  Dataset assemble_dataset(const Eigen::VectorXd& x_measured) const;

  /// One MPC step: returns the applied (clamped) control and advances the
  /// controller clock by dt. In the post-reference hold phase returns u_eq.
  Eigen::VectorXd step(const Eigen::VectorXd& x_measured);

  const Eigen::VectorXd& last_raw_control() const { return u_raw_; }
  const Eigen::VectorXd& previous_control() const { return u_prev_; }
  double time() const { return t_; }
  const LodeGpModel& model() const { return model_; }
  const MpcConfig& config() const { return config_; }

 private:
  LodeGpModel model_;
  MpcConfig config_;
  double t_ = 0.0;
  Eigen::VectorXd u_prev_;
  Eigen::VectorXd u_raw_;
};

struct TracePoint {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;      // applied (clamped) control
  Eigen::VectorXd u_raw;  // posterior control before clamping
};

struct ClosedLoopTrace {
  std::vector<TracePoint> points;
  long clamp_events = 0;    // plant-state clamps during integration
  long control_clamps = 0;  // steps where the posterior control was clamped
};

/// Run the closed loop for t_total seconds: measure, step the controller,
/// hold the control on the plant for dt. The trace has floor(t_total/dt)+1
/// rows; the final row repeats the last control for plotting.
ClosedLoopTrace run_closed_loop(const NonlinearSystem& plant, Controller& controller,
                                const Eigen::VectorXd& x0, double t_total,
                                double substep = 0.01);

}  // namespace gpmpc

#endif  // GPMPC_MPC_HPP_
