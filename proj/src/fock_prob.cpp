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

#include "fockfusion/fock_prob.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fockfusion {

namespace {

constexpr std::int64_t kSnapDenominator = 64;
constexpr double kSnapTolerance = 4.0 * DBL_EPSILON;
constexpr double kNegativeClamp = -1e-15;
constexpr mpfr_prec_t kMaxBits = 1 << 15;

void check_counts(PhotonCount s, PhotonCount m, PhotonCount n) {
  if (m < 0 || n < 0 || s < 0) {
    throw std::domain_error("photon counts must be non-negative");
  }
  if (s > m + n) {
    throw std::domain_error("detected photons s=" + std::to_string(s) +
                            " exceed m+n=" + std::to_string(m + n));
  }
}

double clamp_probability(double p) {
  if (p < 0.0 && p > kNegativeClamp) return 0.0;
  return p;
}

struct TermRange {
  int j0;
  int j1;
  int a;  // power of u outside the sum
  int b;  // power of 1-u outside the sum
};

TermRange term_range(int s, int m, int n) {
  const int j0 = std::max(0, s - n);
  const int j1 = std::min(m, s);
  return {j0, j1, n - s + 2 * j0, m + s - 2 * j1};
}

double log_prefactor(int s, int m, int n) {
  return log_factorial(s) + log_factorial(m + n - s) - log_factorial(m) - log_factorial(n);
}

// ---------------------------------------------------------------------------
// double path

class DoubleKernel {
 public:
  DoubleKernel(int m, int n, double u, double v) : m_(m), n_(n) {
    const int total = m + n;
    cm_.resize(m + 1);
    cn_.resize(n + 1);
    for (int j = 0; j <= m; ++j) cm_[j] = binomial_double(m, j);
    for (int k = 0; k <= n; ++k) cn_[k] = binomial_double(n, k);
    upow_.resize(total + 1);
    vpow_.resize(total + 1);
    upow_[0] = vpow_[0] = 1.0;
    for (int k = 1; k <= total; ++k) {
      upow_[k] = upow_[k - 1] * u;
      vpow_[k] = vpow_[k - 1] * v;
    }
  }

  // condition receives sum|t_j| / |sum t_j|.
  double entry(int s, double& condition) const {
    const TermRange r = term_range(s, m_, n_);
    CompensatedSum sum;
    CompensatedSum magnitude;
    for (int j = r.j0; j <= r.j1; ++j) {
      const double t = cm_[j] * cn_[s - j] * upow_[j - r.j0] * vpow_[r.j1 - j];
      sum.add((j & 1) ? -t : t);
      magnitude.add(t);
    }
    const double total = sum.value();
    const double mag = magnitude.value();
    if (total == 0.0) {
      condition = mag == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
      condition = mag / std::fabs(total);
    }
    return std::exp(log_prefactor(s, m_, n_)) * upow_[r.a] * vpow_[r.b] * total * total;
  }

 private:
  int m_;
  int n_;
  std::vector<double> cm_;
  std::vector<double> cn_;
  std::vector<double> upow_;
  std::vector<double> vpow_;
};

// ---------------------------------------------------------------------------
// exact path

class ExactKernel {
 public:
  ExactKernel(int m, int n, const mpq_class& stay) : m_(m), n_(n) {
    if (m + n > kExactFactorialLimit) {
      throw CapacityError("exact path supports m+n <= " + std::to_string(kExactFactorialLimit));
    }
    const int total = m + n;
    const mpz_class p = stay.get_num();
    const mpz_class q = stay.get_den();
    const mpz_class r = q - p;
    cm_.resize(m + 1);
    cn_.resize(n + 1);
    for (int j = 0; j <= m; ++j) cm_[j] = binomial(m, j);
    for (int k = 0; k <= n; ++k) cn_[k] = binomial(n, k);
    ppow_.resize(total + 1);
    rpow_.resize(total + 1);
    ppow_[0] = rpow_[0] = 1;
    for (int k = 1; k <= total; ++k) {
      ppow_[k] = ppow_[k - 1] * p;
      rpow_[k] = rpow_[k - 1] * r;
    }
    mpz_class qn;
    mpz_pow_ui(qn.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(total));
    denominator_ = qn * factorial(m) * factorial(n);
  }

  // With u = p/q: P = s!(N-s)! p^a (q-p)^b Tz^2 / (m! n! q^N), Tz an integer.
  mpz_class numerator(int s) const {
    const TermRange r = term_range(s, m_, n_);
    mpz_class sum = 0;
    for (int j = r.j0; j <= r.j1; ++j) {
      mpz_class t = cm_[j] * cn_[s - j] * ppow_[j - r.j0] * rpow_[r.j1 - j];
      if (j & 1) {
        sum -= t;
      } else {
        sum += t;
      }
    }
    return factorial(s) * factorial(m_ + n_ - s) * ppow_[r.a] * rpow_[r.b] * sum * sum;
  }

  const mpz_class& denominator() const { return denominator_; }

  mpq_class entry(int s) const {
    mpq_class out(numerator(s), denominator_);
    out.canonicalize();
    return out;
  }

 private:
  int m_;
  int n_;
  std::vector<mpz_class> cm_;
  std::vector<mpz_class> cn_;
  std::vector<mpz_class> ppow_;
  std::vector<mpz_class> rpow_;
  mpz_class denominator_;
};

// ---------------------------------------------------------------------------
// MPFR path

class Big {
 public:
  explicit Big(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
  ~Big() { mpfr_clear(v_); }
  Big(const Big&) = delete;
  Big& operator=(const Big&) = delete;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

class MpfrKernel {
 public:
  MpfrKernel(int m, int n, const Reflectivity& eta, int min_digits)
      : m_(m), n_(n), eta_(eta) {
    if (m + n > kExactFactorialLimit) {
      throw CapacityError("high-precision path supports m+n <= " +
                          std::to_string(kExactFactorialLimit));
    }
    min_bits_ = static_cast<mpfr_prec_t>(std::ceil(min_digits * 3.3219280948873622)) + 8;
    cm_.resize(m + 1);
    cn_.resize(n + 1);
    for (int j = 0; j <= m; ++j) cm_[j] = binomial(m, j);
    for (int k = 0; k <= n; ++k) cn_[k] = binomial(n, k);
  }

  double entry(int s) const {
    mpfr_prec_t bits = min_bits_;
    for (;;) {
      mpfr_prec_t wanted = 0;
      const double p = attempt(s, bits, wanted);
      if (wanted == 0) return p;
      if (bits >= kMaxBits) {
        throw PrecisionError("P_sub cancellation exceeds " + std::to_string(kMaxBits) + " bits");
      }
      bits = std::min(kMaxBits, std::max(wanted, 2 * bits));
    }
  }

 private:
  void set_stay(Big& u, Big& v) const {
    if (const auto& ratio = eta_.exact_stay()) {
      mpfr_set_si(u.get(), ratio->num, MPFR_RNDN);
      mpfr_div_si(u.get(), u.get(), ratio->den, MPFR_RNDN);
    } else {
      mpfr_set_d(u.get(), eta_.stay(), MPFR_RNDN);
    }
    mpfr_ui_sub(v.get(), 1, u.get(), MPFR_RNDN);
  }

  // Returns the probability, or sets wanted to a larger precision when the
  // alternating sum lost too many bits.
  double attempt(int s, mpfr_prec_t bits, mpfr_prec_t& wanted) const {
    const TermRange r = term_range(s, m_, n_);
    Big u(bits), v(bits), sum(bits), mag(bits), t(bits), w(bits);
    set_stay(u, v);
    mpfr_set_zero(sum.get(), 1);
    mpfr_set_zero(mag.get(), 1);
    for (int j = r.j0; j <= r.j1; ++j) {
      mpfr_set_z(t.get(), cm_[j].get_mpz_t(), MPFR_RNDN);
      mpfr_mul_z(t.get(), t.get(), cn_[s - j].get_mpz_t(), MPFR_RNDN);
      mpfr_pow_ui(w.get(), u.get(), static_cast<unsigned long>(j - r.j0), MPFR_RNDN);
      mpfr_mul(t.get(), t.get(), w.get(), MPFR_RNDN);
      mpfr_pow_ui(w.get(), v.get(), static_cast<unsigned long>(r.j1 - j), MPFR_RNDN);
      mpfr_mul(t.get(), t.get(), w.get(), MPFR_RNDN);
      if (j & 1) {
        mpfr_sub(sum.get(), sum.get(), t.get(), MPFR_RNDN);
      } else {
        mpfr_add(sum.get(), sum.get(), t.get(), MPFR_RNDN);
      }
      mpfr_add(mag.get(), mag.get(), t.get(), MPFR_RNDN);
    }

    if (mpfr_zero_p(sum.get())) {
      if (mpfr_zero_p(mag.get()) || bits >= kMaxBits) return 0.0;
      wanted = 2 * bits;
      return 0.0;
    }
    mpfr_abs(w.get(), sum.get(), MPFR_RNDN);
    mpfr_div(w.get(), mag.get(), w.get(), MPFR_RNDN);
    mpfr_log2(w.get(), w.get(), MPFR_RNDN);
    const double lost = mpfr_get_d(w.get(), MPFR_RNDU);
    if (static_cast<double>(bits) - lost < 64.0) {
      wanted = static_cast<mpfr_prec_t>(lost) + 128;
      return 0.0;
    }

    // prefactor s!(N-s)!/(m! n!) u^a v^b, then times sum^2
    mpfr_set_z(t.get(), factorial(s).get_mpz_t(), MPFR_RNDN);
    mpfr_mul_z(t.get(), t.get(), factorial(m_ + n_ - s).get_mpz_t(), MPFR_RNDN);
    mpfr_div_z(t.get(), t.get(), factorial(m_).get_mpz_t(), MPFR_RNDN);
    mpfr_div_z(t.get(), t.get(), factorial(n_).get_mpz_t(), MPFR_RNDN);
    mpfr_pow_ui(w.get(), u.get(), static_cast<unsigned long>(r.a), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), w.get(), MPFR_RNDN);
    mpfr_pow_ui(w.get(), v.get(), static_cast<unsigned long>(r.b), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), w.get(), MPFR_RNDN);
    mpfr_sqr(w.get(), sum.get(), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), w.get(), MPFR_RNDN);
    return mpfr_get_d(t.get(), MPFR_RNDN);
  }

  int m_;
  int n_;
  Reflectivity eta_;
  mpfr_prec_t min_bits_ = 176;
  std::vector<mpz_class> cm_;
  std::vector<mpz_class> cn_;
};

mpq_class exact_stay_of(const Reflectivity& eta) {
  if (const auto& ratio = eta.exact_stay()) {
    mpq_class q(mpz_class(static_cast<long>(ratio->num)), mpz_class(static_cast<long>(ratio->den)));
    q.canonicalize();
    return q;
  }
  return exact_rational(eta.stay());
}

// Evaluates entries under a policy, building the heavier kernels on demand.
class Evaluator {
 public:
  Evaluator(int m, int n, const Reflectivity& eta, const PrecisionPolicy& policy)
      : m_(m), n_(n), eta_(eta), policy_(policy) {}

  double entry(int s) {
    switch (policy_.mode) {
      case PrecisionMode::Double: {
        double condition = 0.0;
        return double_kernel().entry(s, condition);
      }
      case PrecisionMode::Exact:
        return to_double(exact_kernel().entry(s));
      case PrecisionMode::HighPrecision:
        return mpfr_kernel().entry(s);
      case PrecisionMode::Auto:
        break;
    }
    if (m_ + n_ <= policy_.switch_threshold) {
      double condition = 0.0;
      const double p = double_kernel().entry(s, condition);
      if (condition <= policy_.max_condition) return p;
    }
    return escalated(s);
  }

  double escalated(int s) {
    if (eta_.exact_stay()) return to_double(exact_kernel().entry(s));
    return mpfr_kernel().entry(s);
  }

 private:
  DoubleKernel& double_kernel() {
    if (!dbl_) dbl_.emplace(m_, n_, eta_.stay(), eta_.pass());
    return *dbl_;
  }
  ExactKernel& exact_kernel() {
    if (!exact_) exact_.emplace(m_, n_, exact_stay_of(eta_));
    return *exact_;
  }
  MpfrKernel& mpfr_kernel() {
    if (!mpfr_) mpfr_.emplace(m_, n_, eta_, policy_.min_digits);
    return *mpfr_;
  }

  int m_;
  int n_;
  Reflectivity eta_;
  PrecisionPolicy policy_;
  std::optional<DoubleKernel> dbl_;
  std::optional<ExactKernel> exact_;
  std::optional<MpfrKernel> mpfr_;
};

double distribution_error(const std::vector<double>& probs) {
  CompensatedSum sum;
  for (double p : probs) sum.add(p);
  return std::fabs(sum.value() - 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------

Reflectivity Reflectivity::from_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("reflectivity eta must lie in [0, 1]");
  }
  Reflectivity r;
  r.eta_ = eta;
  r.stay_ = eta * eta;
  r.pass_ = (1.0 - eta) * (1.0 + eta);
  Ratio ratio;
  if (snap_to_ratio(r.stay_, kSnapDenominator, kSnapTolerance, ratio)) {
    r.exact_ = ratio;
    r.stay_ = ratio.value();
    r.pass_ = static_cast<double>(ratio.den - ratio.num) / static_cast<double>(ratio.den);
  }
  return r;
}

Reflectivity Reflectivity::from_stay(Ratio stay) {
  if (stay.den <= 0 || stay.num < 0 || stay.num > stay.den) {
    throw std::domain_error("stay fraction must be a ratio in [0, 1]");
  }
  const std::int64_t g = std::gcd(stay.num, stay.den);
  stay = Ratio{stay.num / g, stay.den / g};
  Reflectivity r;
  r.exact_ = stay;
  r.stay_ = stay.value();
  r.pass_ = static_cast<double>(stay.den - stay.num) / static_cast<double>(stay.den);
  r.eta_ = std::sqrt(r.stay_);
  return r;
}

Reflectivity Reflectivity::complement() const {
  if (exact_) return from_stay(Ratio{exact_->den - exact_->num, exact_->den});
  Reflectivity r = from_eta(std::sqrt(pass_));
  return r;
}

double SubtractionDistribution::total() const {
  CompensatedSum sum;
  for (double p : probs) sum.add(p);
  return sum.value();
}

double p_sub(PhotonCount s, PhotonCount m, PhotonCount n, const Reflectivity& eta,
             const PrecisionPolicy& policy) {
  check_counts(s, m, n);
  Evaluator eval(m, n, eta, policy);
  return clamp_probability(eval.entry(s));
}

mpq_class p_sub_exact(PhotonCount s, PhotonCount m, PhotonCount n, const mpq_class& stay) {
  check_counts(s, m, n);
  if (stay < 0 || stay > 1) {
    throw std::domain_error("stay fraction must lie in [0, 1]");
  }
  return ExactKernel(m, n, stay).entry(s);
}

SubtractionDistribution subtraction_distribution(PhotonCount m, PhotonCount n,
                                                 const Reflectivity& eta,
                                                 const PrecisionPolicy& policy) {
  check_counts(0, m, n);
  if (m + n < 1) {
    throw std::domain_error("subtraction_distribution requires m+n >= 1");
  }
  SubtractionDistribution out;
  out.m = m;
  out.n = n;
  out.eta = eta.eta();
  out.probs.resize(static_cast<std::size_t>(m + n + 1));

  Evaluator eval(m, n, eta, policy);
  for (int s = 0; s <= m + n; ++s) {
    out.probs[s] = clamp_probability(eval.entry(s));
  }
  double error = distribution_error(out.probs);
  if (policy.mode == PrecisionMode::Auto && error > 1e-10) {
    for (int s = 0; s <= m + n; ++s) {
      out.probs[s] = clamp_probability(eval.escalated(s));
    }
    error = distribution_error(out.probs);
  }
  if (error > 1e-8) {
    throw PrecisionError("subtraction distribution for m=" + std::to_string(m) +
                         ", n=" + std::to_string(n) + " is off normalization by " +
                         std::to_string(error));
  }
  return out;
}

std::vector<double> subtraction_prefix(PhotonCount m, PhotonCount n, const Reflectivity& eta,
                                       PhotonCount last, const PrecisionPolicy& policy) {
  check_counts(std::max(last, 0), m, n);
  std::vector<double> out;
  if (last < 0) return out;
  out.resize(static_cast<std::size_t>(last + 1));
  Evaluator eval(m, n, eta, policy);
  for (int s = 0; s <= last; ++s) out[s] = clamp_probability(eval.entry(s));
  return out;
}

std::vector<mpq_class> subtraction_distribution_exact(PhotonCount m, PhotonCount n,
                                                      const mpq_class& stay) {
  check_counts(0, m, n);
  if (stay < 0 || stay > 1) {
    throw std::domain_error("stay fraction must lie in [0, 1]");
  }
  ExactKernel kernel(m, n, stay);
  std::vector<mpq_class> out(static_cast<std::size_t>(m + n + 1));
  for (int s = 0; s <= m + n; ++s) out[s] = kernel.entry(s);
  return out;
}

double p_grow(PhotonCount m, PhotonCount n, const Reflectivity& eta, bool recycled,
              const PrecisionPolicy& policy) {
  if (m < 1 || n < 1) {
    throw std::domain_error("p_grow requires m, n >= 1");
  }
  Evaluator eval(m, n, eta, policy);
  if (!recycled) return clamp_probability(eval.entry(0));
  const int last = m + n - std::max(m, n) - 1;
  CompensatedSum sum;
  for (int s = 0; s <= last; ++s) sum.add(clamp_probability(eval.entry(s)));
  return sum.value();
}

double p_sub_equal_balanced(PhotonCount n) {
  if (n < 1) {
    throw std::domain_error("p_sub_equal_balanced requires n >= 1");
  }
  return std::exp(log_factorial(2 * static_cast<std::int64_t>(n)) - 2.0 * log_factorial(n) -
                  2.0 * n * std::log(2.0));
}

mpq_class p_sub_equal_balanced_exact(PhotonCount n) {
  if (n < 1 || 2 * n > kExactFactorialLimit) {
    throw std::domain_error("p_sub_equal_balanced_exact requires 1 <= n <= 1000");
  }
  mpz_class four_n;
  mpz_ui_pow_ui(four_n.get_mpz_t(), 4, static_cast<unsigned long>(n));
  mpq_class out(factorial(2 * n), factorial(n) * factorial(n) * four_n);
  out.canonicalize();
  return out;
}

}  // namespace fockfusion
