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

// Brute-force references for the fusion outcome distribution. Validation
// scale only: nothing here is used on the simulation path.

#include <Eigen/Dense>

#include "fockfusion/fock_prob.hpp"

namespace fockfusion::oracle {

inline constexpr PhotonCount kMatrixCap = 24;
inline constexpr PhotonCount kConvolutionCap = 60;

/// Tridiagonal a^dag b + a b^dag restricted to the N-photon block, basis
/// |k, N-k> ordered by k.
Eigen::MatrixXd generator_block(PhotonCount total);

/// exp(-i theta G) on the N-photon block. Photons entering mode one stay there
/// with amplitude cos(theta), so eta = cos(theta).
Eigen::MatrixXcd beamsplitter_unitary(PhotonCount total, double theta);

/// max |(U^dag U - I)_{ij}|
double unitarity_defect(const Eigen::MatrixXcd& u);

/// probs[s] = |<s, m+n-s| U(arccos eta) |m, n>|^2
SubtractionDistribution oracle_distribution(PhotonCount m, PhotonCount n, double eta);

/// Expands (eta a^dag + t b^dag)^m (t a^dag - eta b^dag)^n with t = sqrt(1-eta^2)
/// by convolving the two binomial coefficient sequences, then applies the
/// sqrt(k!) normalizations. Works in 50-digit floating point.
SubtractionDistribution convolution_distribution(PhotonCount m, PhotonCount n, double eta);

}  // namespace fockfusion::oracle
