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

#ifndef GPMPC_GP_HPP_
#define GPMPC_GP_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "gpmpc/lode_gp.hpp"

namespace gpmpc {

/// Noise floor applied to every observation; zero-noise ("hard") constraints
/// are lifted to this jitter at Gram assembly.
inline constexpr double kJitter = 1e-8;

/// Largest noise floor the conditioning escalation is allowed to reach.
inline constexpr double kMaxJitter = 1e-4;

/// One observation of the full output vector z = [x; u] with per-dimension
/// noise variance (heteroscedastic).
struct DataPoint {
  double t = 0.0;
  Eigen::VectorXd z;
  Eigen::VectorXd noise_var;
};

/// Observations sorted ascending by time; ties keep insertion order.
class Dataset {
 public:
  void add(DataPoint p);
  void merge(const Dataset& other);
  const std::vector<DataPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<DataPoint> points_;
};

struct IllConditionedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Symmetric N*d_z block Gram matrix of the model covariance plus the
/// per-point per-dimension noise diagonal (floored at noise_floor).
Eigen::MatrixXd build_gram(const LodeGpModel& model, const Dataset& data,
                           double noise_floor = kJitter);

/// Conditioned GP. Holds the Cholesky factor of the regularized Gram and the
/// weight vector alpha = K^-1 (z - mu); prediction is pure and thread-safe.
class Posterior {
 public:
  Posterior(LodeGpModel model, const Dataset& data);

  Eigen::VectorXd mean(double t) const;
  Eigen::MatrixXd cov(double t, double t2) const;

  const LodeGpModel& model() const { return model_; }
  /// Noise floor that the escalation settled on (kJitter when no escalation
  /// was needed).
  double noise_floor() const { return noise_floor_; }

 private:
  Eigen::MatrixXd cross_covariance(double t) const;  // N*d_z x d_z

  LodeGpModel model_;
  std::vector<double> times_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd alpha_;
  double noise_floor_ = kJitter;
};

Posterior condition(const LodeGpModel& model, const Dataset& data);

/// Log marginal likelihood -1/2 r^T Kz^-1 r - 1/2 log det Kz with residuals
/// r taken against the prior mean; the constant term is omitted.
double log_marginal_likelihood(const LodeGpModel& model, const Dataset& data);

struct OptimizerConfig {
  int grid_points = 5;  // per axis
  double sigma_f_min = 1e-3, sigma_f_max = 1e1;
  double ell_min = 0.1, ell_max = 100.0;
  int max_simplex_iter = 200;
  double simplex_tol = 1e-10;
};

/// Maximize the MLL over (log sigma_f, log lengthscale): log-grid seeding
/// followed by Nelder-Mead refinement from the best seed. Deterministic;
/// grid ties resolve to the lexicographically smallest point in log space.
Hyperparameters optimize_hyperparameters(const LodeGpModel& model, const Dataset& data,
                                         const OptimizerConfig& config = {});

}  // namespace gpmpc

#endif  // GPMPC_GP_HPP_
