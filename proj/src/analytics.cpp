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

#include "fockfusion/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fockfusion/baselines.hpp"

namespace fockfusion {

PowerLawFit fit_power_law(std::span<const FitPoint> points, bool weighted) {
  if (points.size() < 4) {
    throw std::invalid_argument("power-law fit needs at least 4 points");
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const FitPoint& p : points) {
    if (!(p.d > 0.0)) {
      throw std::domain_error("fit abscissa must be positive");
    }
    if (!(p.rate > 0.0)) {
      throw std::domain_error("fit rates must be positive");
    }
    const double w = weighted ? p.weight : 1.0;
    if (!(w > 0.0)) {
      throw std::domain_error("fit weights must be positive");
    }
    sw += w;
    sx += w * std::log(p.d);
    sy += w * std::log(p.rate);
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const FitPoint& p : points) {
    const double w = weighted ? p.weight : 1.0;
    const double x = std::log(p.d) - mx;
    const double y = std::log(p.rate) - my;
    sxx += w * x * x;
    sxy += w * x * y;
    syy += w * y * y;
  }
  if (sxx == 0.0) {
    throw std::domain_error("fit needs at least two distinct d values");
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double ss_res = 0.0;
  for (const FitPoint& p : points) {
    const double w = weighted ? p.weight : 1.0;
    const double r = std::log(p.rate) - (my + fit.exponent * (std::log(p.d) - mx));
    ss_res += w * r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.points_used = static_cast<int>(points.size());
  return fit;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  std::vector<FitPoint> p;
  p.reserve(points.size());
  for (const auto& [d, rate] : points) {
    p.push_back({d, rate, 1.0});
  }
  return fit_power_law(p);
}

std::vector<FitPoint> fit_window(std::span<const FitPoint> points, double d_min, double d_max) {
  std::vector<FitPoint> out;
  std::copy_if(points.begin(), points.end(), std::back_inserter(out),
               [&](const FitPoint& p) { return p.d >= d_min && p.d <= d_max; });
  return out;
}

double spdc_crossover(PhotonCount d, double target_rate) {
  if (d < 1) {
    throw std::domain_error("spdc_crossover requires d >= 1");
  }
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw std::domain_error("target rate must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (spdc_pprep(hi, d) < target_rate) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw std::domain_error("no crossover below the largest double");
    }
  }
  // pprep is increasing in nbar; keep pprep(lo) < target <= pprep(hi).
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      break;
    }
    if (spdc_pprep(mid, d) < target_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double improvement_factor(double scheme_a_rate, double scheme_b_rate) {
  if (!(scheme_a_rate > 0.0) || !(scheme_b_rate > 0.0)) {
    throw std::domain_error("improvement factor needs positive rates");
  }
  return scheme_a_rate / scheme_b_rate;
}

}  // namespace fockfusion
