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
#include <complex>
#include <numbers>

#include "fockfusion/fock_oracle.hpp"
#include "fockfusion/fock_prob.hpp"

using namespace fockfusion;

namespace {
const double kHalf = std::numbers::sqrt2 / 2;
}

TEST_CASE("small unitary blocks") {
  const auto u0 = oracle::beamsplitter_unitary(0, 0.3);
  REQUIRE(u0.rows() == 1);
  CHECK(std::abs(u0(0, 0) - 1.0) <= 1e-14);

  const double theta = 0.4;
  const auto u1 = oracle::beamsplitter_unitary(1, theta);
  CHECK(std::abs(u1(0, 0)) == doctest::Approx(std::cos(theta)));
  CHECK(std::abs(u1(0, 1)) == doctest::Approx(std::sin(theta)));
  CHECK(std::abs(u1(1, 0)) == doctest::Approx(std::sin(theta)));

  const auto u2 = oracle::beamsplitter_unitary(2, std::numbers::pi / 4);
  CHECK(std::norm(u2(1, 1)) <= 1e-28);
}

TEST_CASE("generator is symmetric tridiagonal") {
  const auto g = oracle::generator_block(6);
  for (int i = 0; i <= 6; ++i) {
    CHECK(g(i, i) == 0.0);
    if (i < 6) {
      CHECK(g(i, i + 1) == doctest::Approx(std::sqrt((i + 1.0) * (6 - i))));
      CHECK(g(i, i + 1) == g(i + 1, i));
    }
  }
}

TEST_CASE("unitarity") {
  for (int total = 0; total <= oracle::kMatrixCap; ++total) {
    for (double theta : {0.0, 0.3, std::numbers::pi / 4, 1.2, std::numbers::pi / 2}) {
      REQUIRE(oracle::unitarity_defect(oracle::beamsplitter_unitary(total, theta)) <= 1e-11);
    }
  }
}

TEST_CASE("both oracle routes reproduce HOM") {
  for (const auto& d : {oracle::oracle_distribution(1, 1, kHalf),
                        oracle::convolution_distribution(1, 1, kHalf)}) {
    CHECK(d[0] == doctest::Approx(0.5));
    CHECK(std::fabs(d[1]) <= 1e-15);
    CHECK(d[2] == doctest::Approx(0.5));
  }
  const auto v = oracle::convolution_distribution(0, 0, 0.3);
  REQUIRE(v.probs.size() == 1);
  CHECK(v[0] == doctest::Approx(1.0));
}

TEST_CASE("single photon on a beamsplitter") {
  const auto d = oracle::oracle_distribution(1, 0, 0.6);
  CHECK(d[1] == doctest::Approx(0.36));
  CHECK(d[0] == doctest::Approx(0.64));
}

TEST_CASE("convolution matches the balanced equal-input law") {
  const auto d = oracle::convolution_distribution(5, 5, kHalf);
  CHECK(d[0] == doctest::Approx(252.0 / 1024.0).epsilon(1e-14));
}

TEST_CASE("triple agreement on the validation grid") {
  for (double eta : {0.2, 0.5, kHalf, 0.9}) {
    for (int m = 0; m <= 8; ++m) {
      for (int n = 0; n <= 8; ++n) {
        if (m + n == 0) continue;
        const auto a = oracle::oracle_distribution(m, n, eta);
        const auto b = oracle::convolution_distribution(m, n, eta);
        const auto c = subtraction_distribution(m, n, Reflectivity::from_eta(eta));
        REQUIRE(std::fabs(a.total() - 1.0) <= 1e-11);
        for (int s = 0; s <= m + n; ++s) {
          REQUIRE(std::fabs(a[s] - b[s]) <= 1e-9);
          REQUIRE(std::fabs(a[s] - c[s]) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("capacity limits") {
  CHECK_THROWS_AS(oracle::oracle_distribution(13, 12, 0.5), CapacityError);
  CHECK_THROWS_AS(oracle::convolution_distribution(31, 30, 0.5), CapacityError);
  CHECK_NOTHROW(oracle::convolution_distribution(30, 30, 0.5));
}
