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

#ifndef GPMPC_KERNELS_HPP_
#define GPMPC_KERNELS_HPP_

#include <stdexcept>

namespace gpmpc {

/// Squared-exponential kernel hyperparameters. Both strictly positive; the
/// hyperparameter optimizer works on (log sigma_f, log lengthscale).
struct Hyperparameters {
  double signal_variance = 1.0;  // sigma_f^2
  double lengthscale = 1.0;      // seconds

  void validate() const {
    if (!(signal_variance > 0.0) || !(lengthscale > 0.0))
      throw std::invalid_argument("Hyperparameters: values must be strictly positive");
  }
};

/// k(t, t') = sigma_f^2 exp(-(t - t')^2 / (2 l^2)).
double se_kernel(double t, double t2, const Hyperparameters& hyper);

/// Mixed derivative d^a/dt^a d^b/dt'^b of the SE kernel in closed form:
/// with r = t - t' and s = 1/(l*sqrt(2)),
///   (-1)^b (-s)^(a+b) H_{a+b}(s r) k(t, t')
/// where H_n is the physicists' Hermite polynomial. Exact to machine
/// precision, which matters because the operator pushforward stacks these
/// up to the degree of the V entries.
double se_mixed_derivative(int a, int b, double t, double t2, const Hyperparameters& hyper);

}  // namespace gpmpc

#endif  // GPMPC_KERNELS_HPP_
