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

#include "gpmpc/mpc.hpp"

#include <cmath>
#include <utility>

namespace gpmpc {

BoxConstraints MpcConfig::active_box() const {
  if (mode == ConstraintMode::PhysicalBox) return physical_box;
  BoxConstraints band;
  band.z_min = (1.0 - band_fraction) * z_ref;
  band.z_max = (1.0 + band_fraction) * z_ref;
  // Negative reference components would flip the interval.
  for (Eigen::Index i = 0; i < band.z_min.size(); ++i)
    if (band.z_min[i] > band.z_max[i]) std::swap(band.z_min[i], band.z_max[i]);
  return band;
}

void MpcConfig::validate() const {
  if (dt <= 0.0) throw std::invalid_argument("MpcConfig: dt must be positive");
  if (n_constraint_points < 1) throw std::invalid_argument("MpcConfig: m_c must be >= 1");
  if (use_endpoint && t_ref <= 0.0)
    throw std::invalid_argument("MpcConfig: endpoint requires t_ref > 0");
  physical_box.validate();
  active_box().validate();
}

Dataset make_soft_constraints(const BoxConstraints& box, const std::vector<double>& times) {
  box.validate();
  Dataset data;
  const Eigen::VectorXd mid = 0.5 * (box.z_max + box.z_min);
  // Noise std a quarter of the box width: +-2 sigma spans exactly the box.
  const Eigen::VectorXd std_dev = 0.25 * (box.z_max - box.z_min);
  const Eigen::VectorXd var = std_dev.cwiseProduct(std_dev);
  for (const double t : times) data.add({t, mid, var});
  return data;
}

Dataset make_init_point(double t0, const Eigen::VectorXd& x0, const Eigen::VectorXd& u_prev) {
  Eigen::VectorXd z(x0.size() + u_prev.size());
  z << x0, u_prev;
  Dataset data;
  data.add({t0, z, Eigen::VectorXd::Constant(z.size(), kJitter)});
  return data;
}

Dataset make_endpoint(double t_ref, const Eigen::VectorXd& z_ref) {
  Dataset data;
  data.add({t_ref, z_ref, Eigen::VectorXd::Zero(z_ref.size())});
  return data;
}

Controller::Controller(LodeGpModel model, MpcConfig config, Eigen::VectorXd u_initial)
    : model_(std::move(model)), config_(std::move(config)), u_prev_(std::move(u_initial)) {
  config_.validate();
  if (u_prev_.size() != model_.control_dim())
    throw std::invalid_argument("Controller: initial control has wrong dimension");
  u_raw_ = u_prev_;
}

Dataset Controller::assemble_dataset(const Eigen::VectorXd& x_measured) const {
  Dataset data = make_init_point(0.0, x_measured, u_prev_);

  // Soft constraints ride with the horizon (relative times 1 s .. T_h); the
  // endpoint stays anchored to the episode clock.
  std::vector<double> times;
  const int mc = config_.n_constraint_points;
  if (mc == 1) {
    times.push_back(config_.horizon);
  } else {
    for (int k = 0; k < mc; ++k)
      times.push_back(1.0 + k * (config_.horizon - 1.0) / (mc - 1));
  }
  data.merge(make_soft_constraints(config_.active_box(), times));

  if (config_.use_endpoint && config_.t_ref - t_ > 0.0)
    data.merge(make_endpoint(config_.t_ref - t_, config_.z_ref));
  return data;
}

Eigen::VectorXd Controller::step(const Eigen::VectorXd& x_measured) {
  const int du = model_.control_dim();
  const Eigen::VectorXd u_eq = model_.mean_shift().tail(du);

  Eigen::VectorXd u;
  if (config_.post_ref_hold && t_ >= config_.t_ref) {
    u = u_eq;
    u_raw_ = u_eq;
  } else {
    const Posterior post = condition(model_, assemble_dataset(x_measured));
    u_raw_ = post.mean(config_.dt).tail(du);
    const Eigen::VectorXd u_min = config_.physical_box.z_min.tail(du);
    const Eigen::VectorXd u_max = config_.physical_box.z_max.tail(du);
    u = u_raw_.cwiseMax(u_min).cwiseMin(u_max);
  }
  u_prev_ = u;
  t_ += config_.dt;
  return u;
}

ClosedLoopTrace run_closed_loop(const NonlinearSystem& plant, Controller& controller,
                                const Eigen::VectorXd& x0, double t_total, double substep) {
  const double dt = controller.config().dt;
  const long n_steps = static_cast<long>(std::floor(t_total / dt + 1e-9));
  if (n_steps < 1) throw std::invalid_argument("run_closed_loop: t_total shorter than one step");

  ClosedLoopTrace trace;
  trace.points.reserve(static_cast<std::size_t>(n_steps) + 1);
  Eigen::VectorXd x = x0;
  for (long k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Eigen::VectorXd u = controller.step(x);
    const Eigen::VectorXd raw = controller.last_raw_control();
    if ((u - raw).lpNorm<Eigen::Infinity>() > 0.0) ++trace.control_clamps;
    trace.points.push_back({t, x, u, raw});
    x = simulate_hold(plant, x, u, dt, substep, &trace.clamp_events).x;
  }
  trace.points.push_back({static_cast<double>(n_steps) * dt, x, trace.points.back().u,
                          trace.points.back().u_raw});
  return trace;
}

}  // namespace gpmpc
