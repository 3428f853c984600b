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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace gpmpc {

namespace {

// Distinct rational roots of a polynomial of degree >= 1, or throws
// UnsupportedSystemError. Roots are located numerically via the companion
// matrix and then verified exactly; candidates are rationalized with a
// ladder of denominator bounds so that eigenvalue noise cannot shadow a
// small true root (e.g. 1.9999999999997 must still be recognized as 2).
std::vector<Rational> distinct_rational_roots(const OperatorPoly& p, int entry_index) {
  const std::string where =
      "construct_latent_kernel: diagonal entry " + std::to_string(entry_index) + " = " +
      to_string(p);
  const int n = p.degree();
  std::vector<Rational> roots;
  if (n == 1) {
    roots.push_back(-p.coeff(0) / p.coeff(1));
    return roots;
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lead = p.coeff(n).to_double();
  for (int i = 0; i < n; ++i) {
    companion(i, n - 1) = -p.coeff(i).to_double() / lead;
    if (i > 0) companion(i, i - 1) = 1.0;
  }
  const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();

  for (int i = 0; i < n; ++i) {
    const std::complex<double> lambda = eigs[i];
    if (std::abs(lambda.imag()) > 1e-8 * std::max(1.0, std::abs(lambda)))
      throw UnsupportedSystemError(where + " has complex roots");
    bool verified = false;
    for (std::int64_t max_den = 1; max_den <= 1000000000000LL; max_den *= 10) {
      const Rational cand = rational_from_double(lambda.real(), max_den);
      if (p.evaluate(cand).is_zero()) {
        roots.push_back(cand);
        verified = true;
        break;
      }
    }
    if (!verified)
      throw UnsupportedSystemError(where + " has roots that are not rational");
  }
  std::sort(roots.begin(), roots.end());
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (roots[i] == roots[i - 1])
      throw UnsupportedSystemError(where + " has repeated roots");
  return roots;
}

}  // namespace

LatentKernelSpec construct_latent_kernel(const OperatorMatrix& d) {
  if (!d.is_diagonal())
    throw std::invalid_argument("construct_latent_kernel: D must be diagonal");
  LatentKernelSpec spec;
  spec.reserve(static_cast<std::size_t>(d.cols()));
  for (int m = 0; m < d.cols(); ++m) {
    const OperatorPoly entry = m < d.rows() ? d(m, m) : OperatorPoly();
    LatentDimension dim;
    if (entry.is_zero()) {
      dim.kind = LatentKind::SquaredExponential;
    } else if (entry.is_constant()) {
      dim.kind = LatentKind::Zero;
    } else {
      dim.kind = LatentKind::Solution;
      dim.roots = distinct_rational_roots(entry, m);
    }
    spec.push_back(std::move(dim));
  }
  return spec;
}

LodeGpModel::LodeGpModel(const LinearizedSystem& lin, const SmithDecomposition<Rational>& smith,
                         Hyperparameters hyper)
    : LodeGpModel(smith.V, construct_latent_kernel(smith.D),
                  [&lin] {
                    Eigen::VectorXd m(lin.x_eq.size() + lin.u_eq.size());
                    m << lin.x_eq, lin.u_eq;
                    return m;
                  }(),
                  static_cast<int>(lin.x_eq.size()), static_cast<int>(lin.u_eq.size()),
                  hyper, lin.A, lin.B) {}

LodeGpModel::LodeGpModel(OperatorMatrix v, LatentKernelSpec latent, Eigen::VectorXd mean_shift,
                         int state_dim, int control_dim, Hyperparameters hyper,
                         Eigen::MatrixXd A, Eigen::MatrixXd B)
    : v_(std::move(v)),
      latent_(std::move(latent)),
      mean_shift_(std::move(mean_shift)),
      state_dim_(state_dim),
      control_dim_(control_dim),
      hyper_(hyper),
      a_(std::move(A)),
      b_(std::move(B)) {
  hyper_.validate();
  const int dz = output_dim();
  if (state_dim_ + control_dim_ != dz || v_.rows() != dz || v_.cols() != dz ||
      static_cast<int>(latent_.size()) != dz)
    throw std::invalid_argument("LodeGpModel: inconsistent dimensions");
  precompute();
}

LodeGpModel LodeGpModel::with_hyper(Hyperparameters hyper) const {
  LodeGpModel copy(*this);
  hyper.validate();
  copy.hyper_ = hyper;
  return copy;
}

void LodeGpModel::precompute() {
  active_.clear();
  const int dz = output_dim();
  for (int m = 0; m < dz; ++m) {
    if (latent_[static_cast<std::size_t>(m)].kind == LatentKind::Zero) continue;
    ActiveLatent act;
    act.kind = latent_[static_cast<std::size_t>(m)].kind;
    for (const auto& r : latent_[static_cast<std::size_t>(m)].roots)
      act.roots.push_back(r.to_double());
    act.coeff.resize(static_cast<std::size_t>(dz));
    double scale = 0.0;
    for (int i = 0; i < dz; ++i) {
      const OperatorPoly& p = v_(i, m);
      auto& ci = act.coeff[static_cast<std::size_t>(i)];
      ci.resize(static_cast<std::size_t>(p.degree()) + 1);
      for (int k = 0; k <= p.degree(); ++k) {
        ci[static_cast<std::size_t>(k)] = p.coeff(k).to_double();
        scale = std::max(scale, std::abs(ci[static_cast<std::size_t>(k)]));
      }
      act.max_degree = std::max(act.max_degree, p.degree());
    }
    // The Smith form fixes V only up to a unit per column; the raw columns
    // can carry coefficients of order 1e6, which wrecks the Gram conditioning
    // and detaches sigma_f from the output scale. Rescaling a column is
    // absorbed by the latent kernel variance, so normalize to unit max
    // coefficient.
    if (scale > 0.0) {
      for (auto& ci : act.coeff)
        for (auto& c : ci) c /= scale;
    }
    active_.push_back(std::move(act));
  }
}

Eigen::VectorXd LodeGpModel::prior_mean(double) const { return mean_shift_; }

Eigen::MatrixXd LodeGpModel::covariance(double t, double t2) const {
  const int dz = output_dim();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dz, dz);

  for (const auto& act : active_) {
    if (act.kind == LatentKind::SquaredExponential) {
      // Table of d^a/dt^a d^b/dt'^b k_SE for all orders used by V.
      const int dmax = act.max_degree;
      Eigen::MatrixXd table(dmax + 1, dmax + 1);
      for (int a = 0; a <= dmax; ++a)
        for (int b = 0; b <= dmax; ++b) table(a, b) = se_mixed_derivative(a, b, t, t2, hyper_);
      for (int i = 0; i < dz; ++i) {
        const auto& ci = act.coeff[static_cast<std::size_t>(i)];
        if (ci.empty()) continue;
        for (int j = 0; j < dz; ++j) {
          const auto& cj = act.coeff[static_cast<std::size_t>(j)];
          double acc = 0.0;
          for (std::size_t a = 0; a < ci.size(); ++a)
            for (std::size_t b = 0; b < cj.size(); ++b)
              acc += ci[a] * cj[b] * table(static_cast<int>(a), static_cast<int>(b));
          k(i, j) += acc;
        }
      }
    } else {  // Solution: k_m(t,t') = sum_r exp(r t) exp(r t')
      for (const double r : act.roots) {
        const double et = std::exp(r * t);
        const double et2 = std::exp(r * t2);
        Eigen::VectorXd left(dz), right(dz);
        for (int i = 0; i < dz; ++i) {
          const auto& ci = act.coeff[static_cast<std::size_t>(i)];
          // Applying the operator V(i,m) to exp(r t) multiplies by V(i,m)(r).
          double pi = 0.0, powr = 1.0;
          for (const double c : ci) {
            pi += c * powr;
            powr *= r;
          }
          left[i] = pi * et;
          right[i] = pi * et2;
        }
        k += left * right.transpose();
      }
    }
  }
  return k;
}

double ode_residual(const LodeGpModel& model,
                    const std::function<Eigen::VectorXd(double)>& trajectory_mean,
                    const std::vector<double>& grid) {
  if (grid.size() < 3)
    throw std::invalid_argument("ode_residual: need at least 3 grid points");
  if (model.state_matrix().size() == 0)
    throw std::invalid_argument("ode_residual: model carries no linearized system matrices");
  const int dx = model.state_dim();
  const int du = model.control_dim();
  const Eigen::VectorXd x_eq = model.mean_shift().head(dx);
  const Eigen::VectorXd u_eq = model.mean_shift().tail(du);

  std::vector<Eigen::VectorXd> vals;
  vals.reserve(grid.size());
  for (const double t : grid) vals.push_back(trajectory_mean(t));

  double residual = 0.0;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double span = grid[i + 1] - grid[i - 1];
    const Eigen::VectorXd dxdt = (vals[i + 1].head(dx) - vals[i - 1].head(dx)) / span;
    const Eigen::VectorXd dx_i = vals[i].head(dx) - x_eq;
    const Eigen::VectorXd du_i = vals[i].tail(du) - u_eq;
    const Eigen::VectorXd r =
        dxdt - model.state_matrix() * dx_i - model.input_matrix() * du_i;
    residual = std::max(residual, r.lpNorm<Eigen::Infinity>());
  }
  return residual;
}

}  // namespace gpmpc
