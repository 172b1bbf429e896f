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

#include <optional>
#include <vector>

#include "fockfusion/numerics.hpp"

namespace fockfusion {

/// Photon number of a single-mode Fock state.
using PhotonCount = int;

/**
 * Beamsplitter reflectivity. The amplitude eta is in [0, 1]; a photon in the
 * monitored input keeps to the monitored output with probability eta^2
 * (the "stay" fraction u).
 *
 * When u is a small rational (denominator <= 64) it is also stored exactly so
 * that the exact-arithmetic path can be used. from_eta() snaps u = eta^2 to
 * such a rational when it lies within a few ulps of one, which makes
 * from_eta(1/sqrt(2)) identical to balanced().
 */
class Reflectivity {
 public:
  static Reflectivity from_eta(double eta);
  static Reflectivity from_stay(Ratio stay);
  static Reflectivity balanced() { return from_stay(Ratio{1, 2}); }

  double eta() const { return eta_; }
  double stay() const { return stay_; }
  double pass() const { return pass_; }
  const std::optional<Ratio>& exact_stay() const { return exact_; }

  /// The mirror reflectivity sqrt(1 - eta^2).
  Reflectivity complement() const;

 private:
  Reflectivity() = default;

  double eta_ = 0.0;
  double stay_ = 0.0;
  double pass_ = 1.0;
  std::optional<Ratio> exact_;
};

enum class PrecisionMode {
  Auto,           ///< double below the switch threshold, escalating on cancellation
  Double,         ///< compensated double only
  Exact,          ///< exact rationals (u is taken as its exact binary value if not small-rational)
  HighPrecision,  ///< MPFR with adaptive precision of at least min_digits decimal digits
};

struct PrecisionPolicy {
  PrecisionMode mode = PrecisionMode::Auto;
  int switch_threshold = 40;  ///< m + n above this leaves the double path
  int min_digits = 50;
  double max_condition = 1e6;  ///< sum|terms| / |sum| tolerated on the double path
};

/// Outcome distribution of one fusion: probs[s] for s in [0, m + n].
struct SubtractionDistribution {
  PhotonCount m = 0;
  PhotonCount n = 0;
  double eta = 0.0;
  std::vector<double> probs;

  double operator[](PhotonCount s) const { return probs.at(static_cast<std::size_t>(s)); }
  PhotonCount max_outcome() const { return m + n; }
  double total() const;
};

/**
 * Probability of detecting s photons in the monitored output when |m, n> is
 * mixed on a beamsplitter of reflectivity eta.
 *
 * Evaluated in the factored form
 *   P = s!(N-s)!/(m! n!) * u^a (1-u)^b * T^2,
 *   T = sum_j (-1)^j C(m,j) C(n,s-j) u^(j-j0) (1-u)^(j1-j),
 * with N = m + n, j0 = max(0, s-n), j1 = min(m, s), a = n - s + 2 j0 and
 * b = m + s - 2 j1, which has no negative powers and is valid at u = 0 and 1.
 */
double p_sub(PhotonCount s, PhotonCount m, PhotonCount n, const Reflectivity& eta,
             const PrecisionPolicy& policy = {});

/// Exact P_sub for a rational stay fraction u = eta^2.
mpq_class p_sub_exact(PhotonCount s, PhotonCount m, PhotonCount n, const mpq_class& stay);

SubtractionDistribution subtraction_distribution(PhotonCount m, PhotonCount n,
                                                 const Reflectivity& eta,
                                                 const PrecisionPolicy& policy = {});

/// probs[s] for s in [0, last] only; the partial sums the optimizer needs.
std::vector<double> subtraction_prefix(PhotonCount m, PhotonCount n, const Reflectivity& eta,
                                       PhotonCount last, const PrecisionPolicy& policy = {});

/// All outcomes exactly; sums to 1 identically.
std::vector<mpq_class> subtraction_distribution_exact(PhotonCount m, PhotonCount n,
                                                      const mpq_class& stay);

/// Probability that the heralded state is at least as large as both inputs
/// (recycled), or of the lossless s = 0 outcome alone (non-recycled).
double p_grow(PhotonCount m, PhotonCount n, const Reflectivity& eta, bool recycled,
              const PrecisionPolicy& policy = {});

/// P_sub(0 | n, n) at a balanced beamsplitter, 2^(-2n) (2n)! / (n!)^2, in log space.
double p_sub_equal_balanced(PhotonCount n);

/// The same value as an exact rational.
mpq_class p_sub_equal_balanced_exact(PhotonCount n);

}  // namespace fockfusion
