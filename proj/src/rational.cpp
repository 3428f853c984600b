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

#include "gpmpc/rational.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gpmpc {

Rational::Rational(long num, long den) : value_(num, den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  canonicalize();
}

Rational::Rational(mpz_class num, mpz_class den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  value_ = mpq_class(std::move(num), std::move(den));
  canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  value_ /= o.value_;
  return *this;
}

std::string Rational::str() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

namespace {

// |a/b - p/q| as an exact nonnegative rational, b, q > 0.
mpq_class abs_diff(const mpz_class& a, const mpz_class& b, const mpz_class& p,
                   const mpz_class& q) {
  mpq_class d(a * q - p * b, b * q);
  d.canonicalize();
  return d < 0 ? mpq_class(-d) : d;
}

}  // namespace

Rational rational_from_double(double x, std::int64_t max_denominator) {
  if (!std::isfinite(x)) throw std::domain_error("rational_from_double: non-finite input");
  if (max_denominator < 1) throw std::domain_error("rational_from_double: max_denominator < 1");
  if (x == 0.0) return Rational(0);

  // Exact decomposition x = sign * mant * 2^exp with a 53-bit integer mantissa.
  int exp = 0;
  const double frac = std::frexp(std::abs(x), &exp);
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  exp -= 53;

  mpz_class num(static_cast<long>(mant));
  mpz_class den(1);
  if (exp >= 0) {
    num <<= exp;
  } else {
    den <<= -exp;
  }
  const mpz_class limit(static_cast<long>(max_denominator));

  // Continued-fraction convergents p/q of num/den; h2/k2 and h1/k1 are the
  // two previous convergents.
  mpz_class h2(0), k2(1), h1(1), k1(0);
  mpz_class n = num, d = den;
  while (true) {
    const mpz_class a = n / d;  // exact floor: n, d >= 0
    mpz_class h = a * h1 + h2;
    mpz_class k = a * k1 + k2;
    if (k > limit) {
      // The convergent h1/k1 is the best approximation with denominator
      // <= k1; the only other candidate is the largest semiconvergent that
      // still fits the bound.
      const mpz_class t = (limit - k2) / k1;
      mpz_class sh = t * h1 + h2;
      mpz_class sk = t * k1 + k2;
      Rational best(h1, k1);
      if (sk >= 1 && abs_diff(num, den, sh, sk) < abs_diff(num, den, h1, k1)) {
        best = Rational(sh, sk);
      }
      return x < 0 ? -best : best;
    }
    h2 = h1; k2 = k1;
    h1 = h; k1 = k;
    mpz_class r = n - a * d;
    n = d;
    d = r;
    if (d == 0) break;  // exact
  }
  Rational exact(h1, k1);
  return x < 0 ? -exact : exact;
}

}  // namespace gpmpc
