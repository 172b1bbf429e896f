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

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <stdexcept>

#include "fockfusion/baselines.hpp"
#include "fockfusion/growth_sim.hpp"

using namespace fockfusion;

namespace {

// Expected reduction ops by solving (I - Q) t = 1 on the transient states.
double reduction_ops_by_matrix(int n_start, int d, double p) {
  const int k = n_start - d;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
  for (int i = 0; i < k; ++i) {
    const int size = d + 1 + i;
    for (int j = 0; j < k; ++j) {
      const int next = d + 1 + j;
      if (next > size) continue;
      const int lost = size - next;
      a(i, j) -= std::exp(log_binomial(size, lost)) * std::pow(p, lost) *
                 std::pow(1 - p, size - lost);
    }
  }
  const Eigen::VectorXd t = a.lu().solve(Eigen::VectorXd::Ones(k));
  return t(k - 1);
}

SimConfig config(int d, Strategy s, std::uint64_t steps, std::uint64_t seed = 1) {
  SimConfig c;
  c.d = d;
  c.strategy = s;
  c.steps = steps;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("random numbers") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.uniform() == b.uniform());
  Rng r(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.below(5);
    REQUIRE(v < 5);
    seen.insert(v);
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  CHECK(seen.size() == 5);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("seed parsing") {
  CHECK(parse_seed("42") == 42);
  CHECK(parse_seed("0x2a") == 42);
  CHECK(parse_seed("0X2A") == 42);
  CHECK(parse_seed("18446744073709551615") == 18446744073709551615ULL);
  CHECK_THROWS_AS(parse_seed("forty"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed("12x"), std::invalid_argument);
}

TEST_CASE("buckets") {
  Buckets b(1, 9);
  CHECK(b.count(1) == Buckets::kInfinite);
  CHECK(b.largest() == 1);
  CHECK(b.largest_pair() == 1);
  b.put(4);
  b.put(6);
  b.put(4);
  CHECK(b.largest() == 6);
  CHECK(b.largest_pair() == 4);
  CHECK(b.stored_photons() == 14);
  b.take(1);
  CHECK(b.count(1) == Buckets::kInfinite);
  b.take(6);
  CHECK_THROWS_AS(b.take(6), std::logic_error);
  CHECK(b.nonempty_sizes() == std::vector<PhotonCount>{1, 4});
  CHECK_THROWS_AS(b.put(10), std::logic_error);
}

TEST_CASE("pair selection") {
  EtaPolicy policy(simulation_optimizer_settings());
  Rng rng(3);
  Buckets b(1, 11);
  b.put(5);
  b.put(5);
  b.put(7);
  CHECK(select_pair(b, Strategy::balanced(), 12, rng, policy) == std::pair{5, 5});
  CHECK(select_pair(b, Strategy::modesty(), 12, rng, policy) == std::pair{7, 1});
  for (int i = 0; i < 50; ++i) {
    const auto [m, n] = select_pair(b, Strategy::random(), 12, rng, policy);
    REQUIRE((m == 1 || m == 5 || m == 7));
    REQUIRE((n == 1 || n == 5 || n == 7));
    REQUIRE(!(m == 7 && n == 7));
  }
  // frugal with d' = d: two 7s would overshoot, so the window pair (7, 5) wins
  b.put(7);
  const auto f = select_pair(b, Strategy::frugal(), 12, rng, policy);
  CHECK(f.first + f.second >= 12);
  CHECK(f.first + f.second <= 12);
  // balanced region below floor(d'/2)
  Buckets c(1, 11);
  c.put(3);
  c.put(3);
  CHECK(select_pair(c, Strategy::frugal(), 12, rng, policy) == std::pair{3, 3});
  // two 6s at d = d' = 10: (6, 6) overshoots the window, nothing lands in it
  Buckets e(1, 9);
  e.put(6);
  e.put(6);
  CHECK(select_pair(e, Strategy::frugal(), 10, rng, policy) == std::pair{6, 1});
}

TEST_CASE("d = 2 harvests every other fusion") {
  const RateEstimate e = run(config(2, Strategy::balanced(), 400'000));
  CHECK(std::fabs(e.rate - 0.5) <= 3 * e.std_error + 1e-12);
  CHECK(e.std_error > 0.0);
  CHECK(e.batch_rates.size() == 20);
}

TEST_CASE("photon ledger balances") {
  for (Strategy s : {Strategy::balanced(), Strategy::modesty(), Strategy::random(),
                     Strategy::frugal(14)}) {
    for (bool recycled : {true, false}) {
      for (int x : {1, 3}) {
        SimConfig c = config(11, s, 60'000, 5);
        c.recycled = recycled;
        c.source_size = x;
        c.exact = s.kind == StrategyKind::Frugal;
        GrowthSimulator g(c);
        g.run();
        const PhotonLedger& l = g.ledger();
        REQUIRE(l.drawn == l.detected + l.harvested + l.discarded + l.returned +
                               g.buckets().stored_photons());
      }
    }
  }
}

TEST_CASE("same seed, same run") {
  const RateEstimate a = run(config(8, Strategy::random(), 100'000, 99));
  const RateEstimate b = run(config(8, Strategy::random(), 100'000, 99));
  CHECK(a.harvested == b.harvested);
  CHECK(a.batch_rates == b.batch_rates);
  const RateEstimate c = run(config(8, Strategy::random(), 100'000, 100));
  CHECK(a.batch_rates != c.batch_rates);
}

TEST_CASE("non-recycled doubling ladder at d = 4") {
  SimConfig c = config(4, Strategy::balanced(), 1'000'000, 17);
  c.recycled = false;
  const RateEstimate e = run(c);
  const DoublingEstimate est = doubling_expected_singles(4);
  // one d-state per expected_fusions operations
  CHECK(e.rate == doctest::Approx(1.0 / est.expected_fusions).epsilon(0.15));
  // fusions lie between half the singles and the singles
  CHECK(e.rate >= 1.0 / est.expected_singles);
  CHECK(e.rate <= 2.0 / est.expected_singles);
}

TEST_CASE("rates fall with the target") {
  const auto pts = rate_curve({4, 8, 16}, config(4, Strategy::balanced(), 600'000, 2), 1);
  REQUIRE(pts.size() == 3);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& a = pts[i].estimate;
    const auto& b = pts[i + 1].estimate;
    CHECK(a.rate - b.rate > 3 * (a.std_error + b.std_error));
  }
}

TEST_CASE("replicas pool their counts") {
  const RateEstimate p = run_replicas(config(6, Strategy::balanced(), 50'000, 8), 3, 1);
  CHECK(p.steps == 150'000);
  CHECK(p.batch_rates.size() == 60);
  CHECK(p.rate == doctest::Approx(static_cast<double>(p.harvested) / p.measured_steps()));
}

TEST_CASE("configuration checks") {
  CHECK_THROWS_AS(run(config(1, Strategy::balanced(), 1000)), std::invalid_argument);
  SimConfig c = config(6, Strategy::frugal(4), 100'000);
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c = config(6, Strategy::balanced(), 100'000);
  c.source_size = 6;
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c = config(6, Strategy::balanced(), 100);
  c.burn_in = 100;
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  CHECK(default_burn_in(10'000'000) == 100'000);
  CHECK(default_burn_in(100'000) == 10'000);
  CHECK(default_burn_in(1'000) == 500);
  CHECK(Strategy::parse("frugal", 20).d_prime == 20);
  CHECK_THROWS_AS(Strategy::parse("greedy"), std::invalid_argument);
}

TEST_CASE("exact-d harvesting reduces overshoots") {
  SimConfig c = config(8, Strategy::balanced(), 200'000, 4);
  c.exact = true;
  GrowthSimulator g(c);
  const RateEstimate e = g.run();
  CHECK(e.reduction_ops > 0);
  CHECK(e.harvested > 0);
}

TEST_CASE("state reduction") {
  for (auto [n0, d, p] : {std::tuple{12, 10, 0.02}, std::tuple{20, 10, 0.01}, std::tuple{9, 3, 0.3}}) {
    const double exact = expected_reduction_ops(n0, d, p);
    CHECK(exact == doctest::Approx(reduction_ops_by_matrix(n0, d, p)).epsilon(1e-10));
    Rng rng(derive_seed(11, n0));
    double sum = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) sum += reduce_state(rng, n0, d, tap_reflectivity(p)).ops;
    CHECK(sum / trials == doctest::Approx(exact).epsilon(0.03));
  }
  CHECK(expected_reduction_ops(10, 10, 0.1) == 0.0);
  Rng rng(1);
  const auto t = reduce_state(rng, 10, 10, tap_reflectivity(0.1));
  CHECK(t.ops == 0);
  CHECK(t.final_size == 10);
  CHECK_THROWS_AS(reduce_state(rng, 5, 6, tap_reflectivity(0.1)), std::domain_error);
  CHECK_THROWS_AS(tap_reflectivity(0.0), std::domain_error);
  CHECK(tap_reflectivity(0.19).pass() == doctest::Approx(0.19));
}
