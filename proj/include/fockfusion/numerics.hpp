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

#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fockfusion {

/// Raised when a numerical result cannot be trusted at the requested accuracy.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an input exceeds a fixed validation-scale capacity.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Largest argument for which factorials and binomials are kept as exact integers.
inline constexpr int kExactFactorialLimit = 2000;

/// ln(k!). Exact-integer based up to kExactFactorialLimit, lgamma beyond.
double log_factorial(std::int64_t k);

/// k! as an exact integer, k <= kExactFactorialLimit.
const mpz_class& factorial(int k);

/// Exact binomial coefficient C(a, b). Throws std::domain_error when b > a or
/// either argument is negative.
mpz_class binomial(int a, int b);

/// C(a, b) as a double; exact whenever the value fits in 53 bits.
double binomial_double(int a, int b);

/// ln C(a, b).
double log_binomial(std::int64_t a, std::int64_t b);

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Small exact fraction num/den with den > 0.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// Finds p/q with q <= max_den and |x - p/q| <= tol, smallest q first.
/// Returns false when no such fraction exists.
bool snap_to_ratio(double x, std::int64_t max_den, double tol, Ratio& out);

/// Exact rational value of a double (every finite double is dyadic).
mpq_class exact_rational(double x);

/// Double nearest to an exact rational.
double to_double(const mpq_class& q);

}  // namespace fockfusion
