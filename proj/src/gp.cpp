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

#include "gpmpc/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

namespace gpmpc {

void Dataset::add(DataPoint p) {
  if (p.z.size() != p.noise_var.size())
    throw std::invalid_argument("Dataset: z and noise_var must have equal size");
  if ((p.noise_var.array() < 0.0).any())
    throw std::invalid_argument("Dataset: negative noise variance");
  auto it = std::upper_bound(points_.begin(), points_.end(), p.t,
                             [](double t, const DataPoint& q) { return t < q.t; });
  points_.insert(it, std::move(p));
}

void Dataset::merge(const Dataset& other) {
  for (const auto& p : other.points_) add(p);
}

Eigen::MatrixXd build_gram(const LodeGpModel& model, const Dataset& data, double noise_floor) {
  const int dz = model.output_dim();
  const int n = static_cast<int>(data.size());
  if (n < 1) throw std::invalid_argument("build_gram: empty dataset");
  Eigen::MatrixXd gram(n * dz, n * dz);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Eigen::MatrixXd block =
          model.covariance(data.points()[static_cast<std::size_t>(i)].t,
                           data.points()[static_cast<std::size_t>(j)].t);
      gram.block(i * dz, j * dz, dz, dz) = block;
      if (j > i) gram.block(j * dz, i * dz, dz, dz) = block.transpose();
    }
  }
  gram = 0.5 * (gram + gram.transpose()).eval();  // scrub assembly asymmetry
  for (int i = 0; i < n; ++i) {
    const auto& nv = data.points()[static_cast<std::size_t>(i)].noise_var;
    for (int d = 0; d < dz; ++d) gram(i * dz + d, i * dz + d) += std::max(nv[d], noise_floor);
  }
  return gram;
}

namespace {

Eigen::VectorXd stacked_residuals(const LodeGpModel& model, const Dataset& data) {
  const int dz = model.output_dim();
  Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()) * dz);
  const Eigen::VectorXd mu = model.prior_mean();
  for (std::size_t i = 0; i < data.size(); ++i)
    r.segment(static_cast<Eigen::Index>(i) * dz, dz) = data.points()[i].z - mu;
  return r;
}

// Factorize with the escalating noise floor policy: kJitter, then x10 per
// retry up to kMaxJitter.
std::pair<Eigen::LLT<Eigen::MatrixXd>, double> factorize(const LodeGpModel& model,
                                                         const Dataset& data) {
  for (double floor = kJitter; floor <= kMaxJitter * (1.0 + 1e-12); floor *= 10.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(build_gram(model, data, floor));
    if (llt.info() == Eigen::Success) return {std::move(llt), floor};
  }
  throw IllConditionedError("condition: Gram factorization failed up to noise floor 1e-4");
}

}  // namespace

Posterior::Posterior(LodeGpModel model, const Dataset& data) : model_(std::move(model)) {
  if (data.empty()) throw std::invalid_argument("condition: empty dataset");
  times_.reserve(data.size());
  for (const auto& p : data.points()) times_.push_back(p.t);
  std::tie(factor_, noise_floor_) = factorize(model_, data);
  alpha_ = factor_.solve(stacked_residuals(model_, data));
  if (!alpha_.allFinite()) throw IllConditionedError("condition: non-finite weights");
}

Posterior condition(const LodeGpModel& model, const Dataset& data) {
  return Posterior(model, data);
}

Eigen::MatrixXd Posterior::cross_covariance(double t) const {
  const int dz = model_.output_dim();
  Eigen::MatrixXd ks(static_cast<Eigen::Index>(times_.size()) * dz, dz);
  for (std::size_t i = 0; i < times_.size(); ++i)
    ks.block(static_cast<Eigen::Index>(i) * dz, 0, dz, dz) = model_.covariance(times_[i], t);
  return ks;
}

Eigen::VectorXd Posterior::mean(double t) const {
  return model_.prior_mean(t) + cross_covariance(t).transpose() * alpha_;
}

Eigen::MatrixXd Posterior::cov(double t, double t2) const {
  const Eigen::MatrixXd ks = cross_covariance(t);
  const Eigen::MatrixXd ks2 = t2 == t ? ks : cross_covariance(t2);
  return model_.covariance(t, t2) - ks.transpose() * factor_.solve(ks2);
}

double log_marginal_likelihood(const LodeGpModel& model, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("log_marginal_likelihood: empty dataset");
  auto [llt, floor] = factorize(model, data);
  (void)floor;
  const Eigen::VectorXd r = stacked_residuals(model, data);
  const Eigen::VectorXd alpha = llt.solve(r);
  const double quad = r.dot(alpha);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * quad - 0.5 * logdet;
}

namespace {

struct SimplexPoint {
  Eigen::Vector2d x;  // (log sigma_f, log ell)
  double value = -std::numeric_limits<double>::infinity();
};

Hyperparameters hyper_from_log(const Eigen::Vector2d& x) {
  const double sigma_f = std::exp(x[0]);
  return Hyperparameters{sigma_f * sigma_f, std::exp(x[1])};
}

}  // namespace

Hyperparameters optimize_hyperparameters(const LodeGpModel& model, const Dataset& data,
                                         const OptimizerConfig& config) {
  if (data.empty()) throw std::invalid_argument("optimize_hyperparameters: empty dataset");

  // The grid ranges double as the search domain: the simplex refinement may
  // not leave them (the MLL of jitter-pinned datasets rises along a
  // degenerate infinite-lengthscale ridge that makes a useless controller).
  const Eigen::Vector2d lo(std::log(config.sigma_f_min), std::log(config.ell_min));
  const Eigen::Vector2d hi(std::log(config.sigma_f_max), std::log(config.ell_max));
  const auto objective = [&](const Eigen::Vector2d& x) -> double {
    if ((x.array() < lo.array()).any() || (x.array() > hi.array()).any())
      return -std::numeric_limits<double>::infinity();
    try {
      const double value = log_marginal_likelihood(model.with_hyper(hyper_from_log(x)), data);
      return std::isfinite(value) ? value : -std::numeric_limits<double>::infinity();
    } catch (const IllConditionedError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  // Log-grid seeding.
  const int g = config.grid_points;
  SimplexPoint best;
  bool any = false;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      Eigen::Vector2d x;
      x[0] = std::log(config.sigma_f_min) +
             (g == 1 ? 0.0
                     : i * (std::log(config.sigma_f_max) - std::log(config.sigma_f_min)) / (g - 1));
      x[1] = std::log(config.ell_min) +
             (g == 1 ? 0.0 : j * (std::log(config.ell_max) - std::log(config.ell_min)) / (g - 1));
      const double value = objective(x);
      if (!std::isfinite(value)) continue;
      const bool better =
          !any || value > best.value ||
          (value == best.value &&
           std::make_pair(x[0], x[1]) < std::make_pair(best.x[0], best.x[1]));
      if (better) best = {x, value};
      any = true;
    }
  }
  if (!any)
    throw IllConditionedError("optimize_hyperparameters: every grid seed failed factorization");

  // Nelder-Mead refinement from the best seed; initial offsets point into
  // the search box.
  const auto offset = [&](int axis) {
    Eigen::Vector2d x = best.x;
    x[axis] += (x[axis] + 0.5 <= hi[axis]) ? 0.5 : -0.5;
    return x;
  };
  std::array<SimplexPoint, 3> simplex{
      SimplexPoint{best.x, best.value},
      SimplexPoint{offset(0), 0.0},
      SimplexPoint{offset(1), 0.0}};
  simplex[1].value = objective(simplex[1].x);
  simplex[2].value = objective(simplex[2].x);
  SimplexPoint incumbent = best;
  const auto consider = [&incumbent](const SimplexPoint& p) {
    if (p.value > incumbent.value ||
        (p.value == incumbent.value &&
         std::make_pair(p.x[0], p.x[1]) < std::make_pair(incumbent.x[0], incumbent.x[1])))
      incumbent = p;
  };
  consider(simplex[1]);
  consider(simplex[2]);

  for (int it = 0; it < config.max_simplex_iter; ++it) {
    std::sort(simplex.begin(), simplex.end(), [](const SimplexPoint& a, const SimplexPoint& b) {
      if (a.value != b.value) return a.value > b.value;  // best first
      return std::make_pair(a.x[0], a.x[1]) < std::make_pair(b.x[0], b.x[1]);
    });
    if ((simplex[0].x - simplex[2].x).norm() < config.simplex_tol) break;

    const Eigen::Vector2d centroid = 0.5 * (simplex[0].x + simplex[1].x);
    const auto evaluate = [&](const Eigen::Vector2d& x) {
      SimplexPoint p{x, objective(x)};
      consider(p);
      return p;
    };

    const SimplexPoint reflect = evaluate(centroid + (centroid - simplex[2].x));
    if (reflect.value > simplex[0].value) {
      const SimplexPoint expand = evaluate(centroid + 2.0 * (centroid - simplex[2].x));
      simplex[2] = expand.value > reflect.value ? expand : reflect;
    } else if (reflect.value > simplex[1].value) {
      simplex[2] = reflect;
    } else {
      const SimplexPoint contract = evaluate(centroid + 0.5 * (simplex[2].x - centroid));
      if (contract.value > simplex[2].value) {
        simplex[2] = contract;
      } else {  // shrink toward the best vertex
        simplex[1] = evaluate(simplex[0].x + 0.5 * (simplex[1].x - simplex[0].x));
        simplex[2] = evaluate(simplex[0].x + 0.5 * (simplex[2].x - simplex[0].x));
      }
    }
  }

  return hyper_from_log(incumbent.x);
}

}  // namespace gpmpc
