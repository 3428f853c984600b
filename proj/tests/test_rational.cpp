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

#include <doctest.h>

#include <cmath>
#include <random>

using gpmpc::Rational;
using gpmpc::rational_from_double;

TEST_CASE("rational canonical form") {
  const Rational r(6, -4);
  CHECK(r.numerator() == -3);
  CHECK(r.denominator() == 2);
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(-5).str() == "-5");
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("rational field arithmetic") {
  const Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(-a == Rational(-1, 3));
  CHECK(a < Rational(1, 2));
  CHECK(gpmpc::abs(Rational(-7, 2)) == Rational(7, 2));
}

TEST_CASE("rational_from_double trivial values") {
  CHECK(rational_from_double(0.5, 1000000) == Rational(1, 2));
  CHECK(rational_from_double(0.0, 1000000) == Rational(0));
  CHECK(rational_from_double(-0.25, 1000000) == Rational(-1, 4));
  CHECK(rational_from_double(3.0, 10) == Rational(3));
}

TEST_CASE("rational_from_double recovers 1/3 from its nearest double") {
  // The double closest to 1/3 is not 1/3, but the best approximation with
  // denominator <= 1e6 of that double is.
  const Rational r = rational_from_double(1.0 / 3.0, 1000000);
  CHECK(r == Rational(1, 3));
  CHECK(rational_from_double(2.0 / 3.0, 1000000) == Rational(2, 3));
  CHECK(rational_from_double(200.0 / 3.0, 1000000000000LL) == Rational(200, 3));
}

TEST_CASE("rational_from_double rejects non-finite input") {
  CHECK_THROWS_AS(rational_from_double(std::nan(""), 100), std::domain_error);
  CHECK_THROWS_AS(rational_from_double(INFINITY, 100), std::domain_error);
  CHECK_THROWS_AS(rational_from_double(0.5, 0), std::domain_error);
}

TEST_CASE("rational_from_double round-trips dyadic rationals exactly") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> num(-4096, 4096);
  std::uniform_int_distribution<int> shift(0, 10);
  for (int i = 0; i < 500; ++i) {
    const int n = num(rng);
    const int k = shift(rng);
    const double x = static_cast<double>(n) / static_cast<double>(1 << k);
    const Rational r = rational_from_double(x, 1 << k);
    CHECK(r == Rational(n, 1 << k));
  }
}

TEST_CASE("rational_from_double matches brute-force best approximation") {
  // Oracle: enumerate every denominator up to the bound and keep the closest
  // fraction (ties to the smaller denominator), comparing exactly.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int trial = 0; trial < 60; ++trial) {
    const double x = uni(rng);
    const std::int64_t max_den = 1 + (trial % 200);

    const Rational exact = rational_from_double(x, 1LL << 60);  // x itself, exactly
    Rational best(0);
    Rational best_err(-1);
    for (std::int64_t q = 1; q <= max_den; ++q) {
      const auto p = static_cast<long>(std::llround(x * static_cast<double>(q)));
      for (long dp = -1; dp <= 1; ++dp) {
        const Rational cand(p + dp, static_cast<long>(q));
        const Rational err = gpmpc::abs(cand - exact);
        if (best_err.sign() < 0 || err < best_err) {
          best = cand;
          best_err = err;
        }
      }
    }

    const Rational got = rational_from_double(x, max_den);
    CHECK(got.denominator() <= max_den);
    CHECK(gpmpc::abs(got - exact) == best_err);
  }
}
