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

#include "fockfusion/baselines.hpp"

#include <mpfr.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fockfusion/numerics.hpp"

namespace fockfusion {

namespace {

void require_nbar(double nbar) {
  if (!(nbar > 0.0) || !std::isfinite(nbar)) {
    throw std::domain_error("nbar must be positive and finite");
  }
}

// log(nbar / (nbar + 1)) without cancellation for large nbar.
double log_thermal_ratio(double nbar) { return -std::log1p(1.0 / nbar); }

// ln(n! / n^k) rounded from a 160-bit evaluation.
double log_factorial_over_power(PhotonCount n, PhotonCount k) {
  mpfr_t f, p;
  mpfr_init2(f, 160);
  mpfr_init2(p, 160);
  mpfr_fac_ui(f, static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_ui_pow_ui(p, static_cast<unsigned long>(n), static_cast<unsigned long>(k), MPFR_RNDN);
  mpfr_div(f, f, p, MPFR_RNDN);
  mpfr_log(f, f, MPFR_RNDN);
  const double out = mpfr_get_d(f, MPFR_RNDN);
  mpfr_clear(f);
  mpfr_clear(p);
  return out;
}

// P_sub(0 | k, k) at eta^2 = 1/2.
mpq_class equal_zero_loss(PhotonCount k) { return p_sub_equal_balanced_exact(k); }

// Sum_{s <= floor(n/2)} P_sub(s | n, n) at eta^2 = 1/2. The alternating sum
// collapses there: it is the x^s coefficient of (1 - x^2)^n, so only even
// outcomes survive and P(2k) = C(2n,n) C(n,k)^2 / (4^n C(2n,2k)).
mpq_class limited_exact(PhotonCount n) {
  mpq_class sum = 0;
  for (PhotonCount k = 0; 2 * k <= n / 2; ++k) {
    const mpz_class c = binomial(n, k);
    sum += mpq_class(c * c, binomial(2 * n, 2 * k));
  }
  sum.canonicalize();
  return sum * p_sub_equal_balanced_exact(n);
}

}  // namespace

double spdc_lambda_sq(double nbar, PhotonCount n) {
  require_nbar(nbar);
  if (n < 0) {
    throw std::domain_error("photon number must be nonnegative");
  }
  return std::exp(n * log_thermal_ratio(nbar)) / (nbar + 1.0);
}

double spdc_pprep(double nbar, PhotonCount d) {
  require_nbar(nbar);
  if (d < 0) {
    throw std::domain_error("d must be nonnegative");
  }
  return std::exp(d * log_thermal_ratio(nbar));
}

SpdcTruncation spdc_truncation(double nbar, double tail) {
  require_nbar(nbar);
  if (!(tail > 0.0 && tail < 1.0)) {
    throw std::domain_error("tail mass must lie in (0, 1)");
  }
  // Tail beyond the first K terms is q^K.
  const double lq = log_thermal_ratio(nbar);
  auto terms = static_cast<PhotonCount>(std::ceil(std::log(tail) / lq));
  while (std::exp(terms * lq) >= tail) {
    ++terms;
  }
  SpdcTruncation out;
  out.terms = std::max<PhotonCount>(terms, 1);
  CompensatedSum mass;
  for (PhotonCount n = 0; n < out.terms; ++n) {
    mass.add(spdc_lambda_sq(nbar, n));
  }
  out.mass = mass.value();
  return out;
}

double single_shot_pbunch(PhotonCount n) {
  if (n < 1) {
    throw std::domain_error("single_shot_pbunch requires n >= 1");
  }
  return std::exp(log_factorial_over_power(n, n));
}

double log_single_shot_rate(PhotonCount d) {
  if (d < 1) {
    throw std::domain_error("single_shot_rate requires d >= 1");
  }
  return log_factorial_over_power(d, d + 1);
}

double single_shot_rate(PhotonCount d) { return std::exp(log_single_shot_rate(d)); }

DoublingEstimate doubling_expected_singles(PhotonCount d) {
  if (d < 1 || d > 1024) {
    throw std::domain_error("doubling ladder supports 1 <= d <= 1024");
  }
  DoublingEstimate out;
  out.requested = d;
  out.target = 1;
  while (out.target < d) {
    out.target *= 2;
  }
  mpq_class singles = 1;
  mpq_class fusions = 0;
  for (PhotonCount k = 2; k <= out.target; k *= 2) {
    const mpq_class p = equal_zero_loss(k / 2);
    singles *= 2 / p;
    fusions = (1 + 2 * fusions) / p;
  }
  out.expected_singles = to_double(singles);
  out.expected_fusions = to_double(fusions);
  return out;
}

double doubling_stirling_form(double d) {
  const double l2 = std::log2(d);
  return std::pow(d, 0.75 + std::log2(std::numbers::pi) / 2.0 + l2 / 4.0);
}

ScalingReport doubling_scaling_report(PhotonCount d) {
  ScalingReport r;
  const DoublingEstimate e = doubling_expected_singles(d);
  r.d = e.target;
  r.exact_value = e.expected_singles;
  r.approx_value = doubling_stirling_form(e.target);
  r.ratio = r.exact_value / r.approx_value;
  return r;
}

double limited_recycling_success(PhotonCount n) {
  if (n < 1 || 2 * n > kExactFactorialLimit) {
    throw std::domain_error("limited_recycling_success requires 1 <= n <= 1000");
  }
  return to_double(limited_exact(n));
}

std::vector<double> limited_recycling_curve(PhotonCount n_max) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(n_max, 0)));
  for (PhotonCount n = 1; n <= n_max; ++n) {
    out.push_back(limited_recycling_success(n));
  }
  return out;
}

double limited_recycling_exponent() { return std::log(6.0) / std::log(1.5); }

double limited_recycling_scaling(double d) {
  if (!(d > 0.0)) {
    throw std::domain_error("d must be positive");
  }
  return std::pow(d, limited_recycling_exponent());
}

double limited_recycling_expected_singles(PhotonCount d) {
  if (d < 1 || d > kExactFactorialLimit / 2) {
    throw std::domain_error("limited recycling ladder supports 1 <= d <= 1000");
  }
  mpq_class singles = 1;
  for (PhotonCount n = 1; n < d; n = (3 * n + 1) / 2) {
    singles *= 2 / limited_exact(n);
  }
  return to_double(singles);
}

}  // namespace fockfusion
