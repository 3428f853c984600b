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

#ifndef GPMPC_LODE_GP_HPP_
#define GPMPC_LODE_GP_HPP_

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gpmpc/kernels.hpp"
#include "gpmpc/linearize.hpp"
#include "gpmpc/smith.hpp"

namespace gpmpc {

/// Kernel assigned to one latent dimension, read off the diagonal of the
/// Smith form D:
///  - Zero: nonzero constant entry; the only solution of c*h = 0 is h = 0.
///  - SquaredExponential: zero entry; a free function (degree of freedom).
///  - Solution: entry with distinct rational roots r_k; solution space is
///    spanned by exp(r_k t), covered by k(t,t') = sum_k exp(r_k t) exp(r_k t').
enum class LatentKind { Zero, SquaredExponential, Solution };

struct LatentDimension {
  LatentKind kind = LatentKind::Zero;
  std::vector<Rational> roots;  // Solution only, pairwise distinct
};

using LatentKernelSpec = std::vector<LatentDimension>;

/// Raised when a diagonal entry of D has repeated or non-rational roots;
/// such systems are outside the supported latent-kernel constructions.
struct UnsupportedSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Classify each latent dimension of a diagonal operator matrix D. Latent
/// dimensions beyond the row count carry no equation, i.e. a zero entry.
LatentKernelSpec construct_latent_kernel(const OperatorMatrix& D);

/// Multi-output GP over z = [x; u] whose realizations satisfy the linearized
/// system: covariance V k V'^T with latent k from the Smith diagonal, mean
/// [x_eq; u_eq]. Immutable after construction; evaluation is thread-safe.
class LodeGpModel {
 public:
  LodeGpModel(const LinearizedSystem& lin, const SmithDecomposition<Rational>& smith,
              Hyperparameters hyper);

  /// Assembles a model from parts; meant for synthetic configurations in
  /// tests (e.g. identity pushforward with all-SE latent).
  LodeGpModel(OperatorMatrix v, LatentKernelSpec latent, Eigen::VectorXd mean_shift,
              int state_dim, int control_dim, Hyperparameters hyper,
              Eigen::MatrixXd A = Eigen::MatrixXd(), Eigen::MatrixXd B = Eigen::MatrixXd());

  LodeGpModel with_hyper(Hyperparameters hyper) const;

  int output_dim() const { return static_cast<int>(mean_shift_.size()); }
  int state_dim() const { return state_dim_; }
  int control_dim() const { return control_dim_; }
  const Eigen::VectorXd& mean_shift() const { return mean_shift_; }
  const Hyperparameters& hyper() const { return hyper_; }
  const LatentKernelSpec& latent() const { return latent_; }
  const OperatorMatrix& pushforward() const { return v_; }
  const Eigen::MatrixXd& state_matrix() const { return a_; }
  const Eigen::MatrixXd& input_matrix() const { return b_; }

  /// Constant prior mean [x_eq; u_eq]; the argument only mirrors the general
  /// mean-function signature.
  Eigen::VectorXd prior_mean(double t = 0.0) const;

  /// Prior covariance block K(t, t') of shape d_z x d_z.
  Eigen::MatrixXd covariance(double t, double t2) const;

 private:
  void precompute();

  OperatorMatrix v_;
  LatentKernelSpec latent_;
  Eigen::VectorXd mean_shift_;
  int state_dim_ = 0;
  int control_dim_ = 0;
  Hyperparameters hyper_;
  Eigen::MatrixXd a_, b_;

  struct ActiveLatent {
    LatentKind kind;
    std::vector<double> roots;
    // coeff[i][k]: coefficient of dt^k in V(i, m), as double
    std::vector<std::vector<double>> coeff;
    int max_degree = 0;
  };
  std::vector<ActiveLatent> active_;
};

inline Eigen::MatrixXd covariance(const LodeGpModel& m, double t, double t2) {
  return m.covariance(t, t2);
}
inline Eigen::VectorXd prior_mean(const LodeGpModel& m, double t = 0.0) {
  return m.prior_mean(t);
}

/// Max-norm residual of dx/dt - A dx - B du over the interior grid points,
/// with the time derivative estimated by central differences of
/// trajectory_mean. Diagnostic for how well a trajectory satisfies the
/// linearized dynamics (in delta coordinates around the model equilibrium).
double ode_residual(const LodeGpModel& model,
                    const std::function<Eigen::VectorXd(double)>& trajectory_mean,
                    const std::vector<double>& grid);

}  // namespace gpmpc

#endif  // GPMPC_LODE_GP_HPP_
