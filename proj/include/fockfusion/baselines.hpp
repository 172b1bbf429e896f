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

// Closed-form reference schemes: heralded SPDC, single-shot bunching, the
// non-recycled doubling ladder and the limited-recycling ladder.

#include <vector>

#include "fockfusion/fock_prob.hpp"

namespace fockfusion {

/// Thermal photon-number law of one SPDC arm, 1/(nbar+1) (nbar/(nbar+1))^n.
double spdc_lambda_sq(double nbar, PhotonCount n);

/// P(at least d photons heralded) = (nbar/(nbar+1))^d.
double spdc_pprep(double nbar, PhotonCount d);

struct SpdcTruncation {
  PhotonCount terms = 0;  ///< photon numbers 0 .. terms-1 kept
  double mass = 0.0;      ///< their total probability
};

/// Smallest prefix of the thermal law whose geometric tail is below `tail`.
SpdcTruncation spdc_truncation(double nbar, double tail = 1e-12);

/// n!/n^n: all n photons of a balanced n-mode interferometer leave in one mode.
double single_shot_pbunch(PhotonCount n);

/// d!/d^(d+1): single-shot success per beamsplitter of a d-beamsplitter chain.
double single_shot_rate(PhotonCount d);
double log_single_shot_rate(PhotonCount d);

/// Non-recycled doubling ladder 1 -> 2 -> 4 -> ... at balanced beamsplitters.
struct DoublingEstimate {
  PhotonCount requested = 0;
  PhotonCount target = 0;         ///< requested rounded up to a power of two
  double expected_singles = 0.0;  ///< prod_j 2 / P_sub(0 | target/2^j, target/2^j)
  double expected_fusions = 0.0;  ///< F(k) = (1 + 2 F(k/2)) / P_sub(0 | k/2, k/2), F(1) = 0
};

DoublingEstimate doubling_expected_singles(PhotonCount d);

/// d^(3/4 + log2(pi)/2 + log2(d)/4), the Stirling-form growth of expected_singles.
double doubling_stirling_form(double d);

struct ScalingReport {
  PhotonCount d = 0;
  double exact_value = 0.0;
  double approx_value = 0.0;
  double ratio = 0.0;  ///< exact / approx
};

ScalingReport doubling_scaling_report(PhotonCount d);

/// Success of fusing two n-photon states at a balanced beamsplitter while
/// losing no more than floor(n/2) photons. Exact rational evaluation.
double limited_recycling_success(PhotonCount n);

/// The same for every n in [1, n_max], sharing work across n.
std::vector<double> limited_recycling_curve(PhotonCount n_max);

/// log_{3/2} 6
double limited_recycling_exponent();

/// d^(log_{3/2} 6): singles for the limited-recycling ladder at success 1/3.
double limited_recycling_scaling(double d);

/// Expected singles of the limited-recycling ladder 1 -> 2 -> 3 -> 5 -> ...,
/// each level ceil(3n/2), with the exact per-level success.
double limited_recycling_expected_singles(PhotonCount d);

}  // namespace fockfusion
