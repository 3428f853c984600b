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

#ifndef GPMPC_POLYNOMIAL_HPP_
#define GPMPC_POLYNOMIAL_HPP_

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gpmpc/rational.hpp"

namespace gpmpc {

/// Univariate polynomial over a field T, dense coefficient representation:
/// coeff(i) multiplies x^i. The zero polynomial has no stored coefficients
/// and degree -1; otherwise the leading coefficient is nonzero.
///
/// Instantiated with T = Rational this is the ring of differential operators
/// with constant coefficients in d/dt, where multiplication is plain
/// convolution (constant-coefficient operators commute).
template <typename T>
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const T& constant) {  // NOLINT(google-explicit-constructor)
    if (!(constant == T(0))) coeffs_.push_back(constant);
  }
  Polynomial(std::initializer_list<T> coeffs) : coeffs_(coeffs) { trim(); }
  explicit Polynomial(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  /// The monomial c * x^k.
  static Polynomial monomial(const T& c, int k) {
    if (c == T(0)) return Polynomial();
    std::vector<T> v(static_cast<std::size_t>(k) + 1, T(0));
    v.back() = c;
    return Polynomial(std::move(v));
  }

  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  T coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(coeffs_.size())) return T(0);
    return coeffs_[static_cast<std::size_t>(i)];
  }
  const std::vector<T>& coeffs() const { return coeffs_; }

  const T& leading_coefficient() const {
    if (is_zero()) throw std::domain_error("Polynomial: zero polynomial has no leading coefficient");
    return coeffs_.back();
  }

  Polynomial operator-() const {
    Polynomial r(*this);
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> v(std::max(a.coeffs_.size(), b.coeffs_.size()), T(0));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
    return Polynomial(std::move(v));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<T> v(a.coeffs_.size() + b.coeffs_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(v));
  }
  friend Polynomial operator*(const T& c, const Polynomial& p) { return Polynomial(c) * p; }

  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  /// Euclidean division: a = q*b + r with r = 0 or degree(r) < degree(b).
  friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw std::domain_error("Polynomial: division by zero polynomial");
    Polynomial q;
    Polynomial r = a;
    const T& lead = b.leading_coefficient();
    while (!r.is_zero() && r.degree() >= b.degree()) {
      const T c = r.leading_coefficient() / lead;
      const int k = r.degree() - b.degree();
      const Polynomial term = monomial(c, k);
      q += term;
      r -= term * b;
    }
    return {q, r};
  }
  friend Polynomial operator/(const Polynomial& a, const Polynomial& b) { return divmod(a, b).first; }
  friend Polynomial operator%(const Polynomial& a, const Polynomial& b) { return divmod(a, b).second; }

  bool divides(const Polynomial& other) const {
    if (is_zero()) return other.is_zero();
    return (other % *this).is_zero();
  }

  Polynomial monic() const {
    if (is_zero()) return *this;
    Polynomial r(*this);
    const T lead = coeffs_.back();
    for (auto& c : r.coeffs_) c = c / lead;
    return r;
  }

  T evaluate(const T& x) const {  // Horner
    T acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == T(0)) coeffs_.pop_back();
  }
  std::vector<T> coeffs_;
};

using OperatorPoly = Polynomial<Rational>;

/// The differential operator d/dt as a polynomial.
inline OperatorPoly dt_operator() { return OperatorPoly::monomial(Rational(1), 1); }

/// Plain-text rendering, e.g. "dt^2 - 3/2*dt + 2"; the zero polynomial is "0".
std::string to_string(const OperatorPoly& p);

}  // namespace gpmpc

#endif  // GPMPC_POLYNOMIAL_HPP_
