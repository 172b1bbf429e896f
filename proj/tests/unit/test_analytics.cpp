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
#include <vector>

#include "fockfusion/analytics.hpp"
#include "fockfusion/baselines.hpp"

using namespace fockfusion;

TEST_CASE("power-law fit recovers a clean law") {
  std::vector<FitPoint> pts;
  for (double d = 6; d <= 24; d += 2) pts.push_back({d, 7.5 * std::pow(d, -3.0)});
  const PowerLawFit f = fit_power_law(pts);
  CHECK(f.exponent == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(7.5).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.points_used == 10);
  const PowerLawFit w = fit_power_law(pts, true);
  CHECK(w.exponent == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("fit exponent ignores the rate scale") {
  std::vector<std::pair<double, double>> a, b;
  for (double d : {4.0, 8.0, 12.0, 16.0, 20.0}) {
    const double r = std::pow(d, -2.5) * (1.0 + 0.05 * std::sin(d));
    a.emplace_back(d, r);
    b.emplace_back(d, 1e3 * r);
  }
  const PowerLawFit fa = fit_power_law(a);
  const PowerLawFit fb = fit_power_law(b);
  CHECK(fa.exponent == doctest::Approx(fb.exponent).epsilon(1e-12));
  CHECK(fb.prefactor == doctest::Approx(1e3 * fa.prefactor).epsilon(1e-10));
  CHECK(fa.r_squared < 1.0);
  CHECK(fa.r_squared > 0.99);
}

TEST_CASE("fit input checks") {
  std::vector<FitPoint> three{{2, 1}, {3, 0.5}, {4, 0.2}};
  CHECK_THROWS_AS(fit_power_law(three), std::invalid_argument);
  std::vector<FitPoint> zero{{2, 1}, {3, 0.5}, {4, 0.0}, {5, 0.1}};
  CHECK_THROWS_AS(fit_power_law(zero), std::domain_error);
  std::vector<FitPoint> neg_d{{-2, 1}, {3, 0.5}, {4, 0.2}, {5, 0.1}};
  CHECK_THROWS_AS(fit_power_law(neg_d), std::domain_error);
  std::vector<FitPoint> all{{2, 1}, {6, 1}, {10, 1}, {24, 1}, {30, 1}};
  CHECK(fit_window(all, 6, 24).size() == 3);
}

TEST_CASE("spdc crossover") {
  CHECK(spdc_crossover(1, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
  for (PhotonCount d : {2, 10, 20}) {
    for (double target : {1e-6, 1e-3, 0.4}) {
      const double nbar = spdc_crossover(d, target);
      REQUIRE(spdc_pprep(nbar, d) == doctest::Approx(target).epsilon(1e-9));
    }
  }
  CHECK(spdc_crossover(20, 1e-3) > spdc_crossover(20, 1e-4));
  CHECK(spdc_crossover(10, 1e-3) < spdc_crossover(20, 1e-3));
  CHECK_THROWS_AS(spdc_crossover(10, 0.0), std::domain_error);
  CHECK_THROWS_AS(spdc_crossover(10, 1.0), std::domain_error);
}

TEST_CASE("improvement factor") {
  CHECK(improvement_factor(1e-4, 1e-9) == doctest::Approx(1e5));
  CHECK_THROWS(improvement_factor(1e-4, 0.0));
}
