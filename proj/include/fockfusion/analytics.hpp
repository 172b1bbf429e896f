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

#include <span>
#include <utility>
#include <vector>

#include "fockfusion/fock_prob.hpp"

namespace fockfusion {

/// rate ~ prefactor * d^exponent, least squares on (ln d, ln rate).
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

struct FitPoint {
  double d = 0.0;
  double rate = 0.0;
  double weight = 1.0;  ///< used only by weighted fits
};

/// Needs at least 4 points with d > 0; a nonpositive rate is a domain error.
PowerLawFit fit_power_law(std::span<const FitPoint> points, bool weighted = false);
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

/// Points with d_min <= d <= d_max.
std::vector<FitPoint> fit_window(std::span<const FitPoint> points, double d_min, double d_max);

/// nbar with (nbar/(nbar+1))^d = target_rate, by bisection to 1e-10 in nbar.
double spdc_crossover(PhotonCount d, double target_rate);

/// scheme_a_rate / scheme_b_rate.
double improvement_factor(double scheme_a_rate, double scheme_b_rate);

}  // namespace fockfusion
