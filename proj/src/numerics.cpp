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

#include "fockfusion/numerics.hpp"

#include <mpfr.h>

#include <array>
#include <vector>

namespace fockfusion {

namespace {

const std::vector<mpz_class>& factorial_table() {
  static const std::vector<mpz_class> table = [] {
    std::vector<mpz_class> t(kExactFactorialLimit + 1);
    t[0] = 1;
    for (int k = 1; k <= kExactFactorialLimit; ++k) {
      t[k] = t[k - 1] * k;
    }
    return t;
  }();
  return table;
}

// ln(k!) rounded from the exact integer, computed once with MPFR.
const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kExactFactorialLimit + 1);
    mpfr_t x;
    mpfr_init2(x, 128);
    for (int k = 0; k <= kExactFactorialLimit; ++k) {
      mpfr_set_z(x, factorial_table()[k].get_mpz_t(), MPFR_RNDN);
      mpfr_log(x, x, MPFR_RNDN);
      t[k] = mpfr_get_d(x, MPFR_RNDN);
    }
    mpfr_clear(x);
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(std::int64_t k) {
  if (k < 0) {
    throw std::domain_error("log_factorial: negative argument");
  }
  if (k <= kExactFactorialLimit) {
    return log_factorial_table()[static_cast<std::size_t>(k)];
  }
  return std::lgamma(static_cast<double>(k) + 1.0);
}

const mpz_class& factorial(int k) {
  if (k < 0 || k > kExactFactorialLimit) {
    throw std::domain_error("factorial: argument outside [0, " +
                            std::to_string(kExactFactorialLimit) + "]");
  }
  return factorial_table()[static_cast<std::size_t>(k)];
}

mpz_class binomial(int a, int b) {
  if (a < 0 || b < 0 || b > a) {
    throw std::domain_error("binomial: requires 0 <= b <= a");
  }
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
  return out;
}

double binomial_double(int a, int b) {
  if (a < 0 || b < 0 || b > a) {
    throw std::domain_error("binomial: requires 0 <= b <= a");
  }
  if (b > a - b) b = a - b;
  // Multiplicative form is exact while intermediate values stay below 2^53.
  double c = 1.0;
  for (int i = 1; i <= b; ++i) {
    c = c * static_cast<double>(a - b + i) / static_cast<double>(i);
  }
  return c;
}

double log_binomial(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 0 || b > a) {
    throw std::domain_error("log_binomial: requires 0 <= b <= a");
  }
  return log_factorial(a) - log_factorial(b) - log_factorial(a - b);
}

bool snap_to_ratio(double x, std::int64_t max_den, double tol, Ratio& out) {
  if (!std::isfinite(x)) return false;
  for (std::int64_t q = 1; q <= max_den; ++q) {
    const double p = std::round(x * static_cast<double>(q));
    if (std::fabs(x - p / static_cast<double>(q)) <= tol) {
      out = Ratio{static_cast<std::int64_t>(p), q};
      return true;
    }
  }
  return false;
}

mpq_class exact_rational(double x) {
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), x);
  q.canonicalize();
  return q;
}

double to_double(const mpq_class& q) {
  // mpq_get_d truncates; go through MPFR for round-to-nearest.
  mpfr_t x;
  mpfr_init2(x, 53);
  mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
  const double d = mpfr_get_d(x, MPFR_RNDN);
  mpfr_clear(x);
  return d;
}

}  // namespace fockfusion
