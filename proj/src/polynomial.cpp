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

#include "gpmpc/polynomial.hpp"

namespace gpmpc {

std::string to_string(const OperatorPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int i = p.degree(); i >= 0; --i) {
    const Rational c = p.coeff(i);
    if (c.is_zero()) continue;
    const Rational a = abs(c);
    if (out.empty()) {
      if (c.sign() < 0) out += "-";
    } else {
      out += c.sign() < 0 ? " - " : " + ";
    }
    const bool unit = a.is_one();
    if (i == 0) {
      out += a.str();
    } else {
      if (!unit) out += a.str() + "*";
      out += i == 1 ? "dt" : "dt^" + std::to_string(i);
    }
  }
  return out;
}

}  // namespace gpmpc
