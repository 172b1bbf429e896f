/*
 * Copyright 2026 The fockfusion Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fockfusion/numerics.hpp"

using namespace fockfusion;

TEST_CASE("binomial coefficients") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(60, 30) == mpz_class("118264581564861424"));
  // Pascal's rule as an independent route
  for (int a = 1; a <= 80; ++a) {
    for (int b = 1; b < a; ++b) {
      REQUIRE(binomial(a, b) == binomial(a - 1, b - 1) + binomial(a - 1, b));
    }
  }
  CHECK_THROWS_AS(binomial(3, 4), std::domain_error);
  CHECK_THROWS_AS(binomial(-1, 0), std::domain_error);
  CHECK(binomial_double(60, 30) == 118264581564861424.0);
  CHECK(binomial_double(52, 5) == 2598960.0);
}

TEST_CASE("factorials") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK(factorial(20) == mpz_class("2432902008176640000"));
  for (int k : {5, 50, 170, 500, 2000, 2001, 5000, 100000}) {
    const double ref = std::lgamma(k + 1.0);
    CHECK(log_factorial(k) == doctest::Approx(ref).epsilon(1e-12));
  }
  // product route for an exact table entry
  mpz_class p = 1;
  for (int i = 2; i <= 300; ++i) p *= i;
  CHECK(factorial(300) == p);
  CHECK(log_binomial(60, 30) == doctest::Approx(std::log(118264581564861424.0)).epsilon(1e-13));
}

TEST_CASE("compensated summation keeps small terms") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-17);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-14).epsilon(1e-6));
}

TEST_CASE("rational snapping") {
  Ratio r;
  REQUIRE(snap_to_ratio(0.5, 64, 1e-15, r));
  CHECK(r == Ratio{1, 2});
  REQUIRE(snap_to_ratio(0.36, 64, 1e-15, r));
  CHECK(r == Ratio{9, 25});
  CHECK_FALSE(snap_to_ratio(std::sqrt(2.0) / 2, 64, 1e-15, r));
}

TEST_CASE("exact rationals from doubles") {
  CHECK(exact_rational(0.5) == mpq_class(1, 2));
  CHECK(exact_rational(0.1) != mpq_class(1, 10));
  CHECK(to_double(exact_rational(0.1)) == 0.1);
  CHECK(to_double(mpq_class(1, 3)) == 1.0 / 3.0);
}
