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

#include "gpmpc/kernels.hpp"

#include <cmath>

namespace gpmpc {

namespace {

// Physicists' Hermite polynomial H_n(x), H_{n+1} = 2x H_n - 2n H_{n-1}.
double hermite(int n, double x) {
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

}  // namespace

double se_kernel(double t, double t2, const Hyperparameters& hyper) {
  const double r = t - t2;
  return hyper.signal_variance * std::exp(-r * r / (2.0 * hyper.lengthscale * hyper.lengthscale));
}

double se_mixed_derivative(int a, int b, double t, double t2, const Hyperparameters& hyper) {
  if (a < 0 || b < 0) throw std::invalid_argument("se_mixed_derivative: negative order");
  const double r = t - t2;
  const double s = 1.0 / (hyper.lengthscale * std::sqrt(2.0));
  const double sign = ((a + b) + b) % 2 == 0 ? 1.0 : -1.0;  // (-1)^b * (-1)^(a+b)
  return sign * std::pow(s, a + b) * hermite(a + b, s * r) * se_kernel(t, t2, hyper);
}

}  // namespace gpmpc
