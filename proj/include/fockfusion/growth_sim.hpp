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

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fockfusion/eta_opt.hpp"
#include "fockfusion/fock_prob.hpp"

namespace fockfusion {

/// mt19937_64 with explicitly defined mappings, so streams are identical on
/// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 of (seed, stream); used to derive independent child seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Accepts decimal or 0x-prefixed hexadecimal.
std::uint64_t parse_seed(std::string_view text);

enum class StrategyKind { Balanced, Modesty, Random, Frugal };

struct Strategy {
  StrategyKind kind = StrategyKind::Balanced;
  PhotonCount d_prime = 0;  ///< frugal window top; 0 means d

  static Strategy balanced() { return {StrategyKind::Balanced, 0}; }
  static Strategy modesty() { return {StrategyKind::Modesty, 0}; }
  static Strategy random() { return {StrategyKind::Random, 0}; }
  static Strategy frugal(PhotonCount d_prime = 0) { return {StrategyKind::Frugal, d_prime}; }

  std::string name() const;
  static Strategy parse(std::string_view name, PhotonCount d_prime = 0);
};

/**
 * State counts per photon number, plus one source size whose count is
 * infinite. Sizes are bounded by a fixed capacity; products at or above the
 * target are harvested before they would be stored.
 */
class Buckets {
 public:
  static constexpr std::uint64_t kInfinite = std::numeric_limits<std::uint64_t>::max();

  Buckets(PhotonCount source_size, PhotonCount capacity);

  PhotonCount source_size() const { return source_; }
  PhotonCount capacity() const { return static_cast<PhotonCount>(counts_.size()) - 1; }

  /// kInfinite for the source size.
  std::uint64_t count(PhotonCount size) const;
  bool has(PhotonCount size, std::uint64_t needed = 1) const;

  /// Removes one state; a no-op on the source. Throws std::logic_error on an empty bucket.
  void take(PhotonCount size);
  void put(PhotonCount size);

  /// Largest size with at least one state (the source counts).
  PhotonCount largest() const;
  /// Largest size holding at least two states (the source counts).
  PhotonCount largest_pair() const;
  std::vector<PhotonCount> nonempty_sizes() const;

  /// Photons held in finite buckets.
  std::uint64_t stored_photons() const;

 private:
  PhotonCount source_;
  std::vector<std::uint64_t> counts_;
};

/// Pair (m, n) to fuse next, per the strategy's rule. Frugal window pairs are
/// ranked by the frugal-above optimum from the policy.
std::pair<PhotonCount, PhotonCount> select_pair(const Buckets& buckets, const Strategy& strategy,
                                                PhotonCount d, Rng& rng, EtaPolicy& policy);

struct SimConfig {
  PhotonCount d = 2;
  Strategy strategy;
  bool recycled = true;
  std::uint64_t steps = 10'000'000;
  std::optional<std::uint64_t> burn_in;  ///< default_burn_in(steps) when unset
  std::uint64_t seed = 1;
  PhotonCount source_size = 1;
  /// Reduce products above d to exactly d before harvesting.
  bool exact = false;
  /// Tap probability for reductions; 0 chooses 0.1 / (photon number).
  double reduction_tap = 0.0;
  int batches = 20;
  /// Shared optimum cache; a private one with simulation_optimizer_settings()
  /// is created when null.
  std::shared_ptr<EtaPolicy> eta_policy;

  void validate() const;
};

/// 1% of steps with a floor of 10^4, kept below half the run.
std::uint64_t default_burn_in(std::uint64_t steps);

struct StepOutcome {
  PhotonCount m = 0;
  PhotonCount n = 0;
  PhotonCount s = 0;
  PhotonCount result_size = 0;
  bool harvested = false;
};

struct RateEstimate {
  std::uint64_t harvested = 0;
  std::uint64_t steps = 0;
  std::uint64_t burn_in = 0;
  double rate = 0.0;
  double std_error = 0.0;  ///< batch-means standard error of rate
  std::uint64_t reduction_ops = 0;
  std::uint64_t reduction_overshoots = 0;
  std::vector<double> batch_rates;

  std::uint64_t measured_steps() const { return steps - burn_in; }
};

/// Photon bookkeeping of a run;
/// drawn == detected + harvested + discarded + returned + stored.
struct PhotonLedger {
  std::uint64_t drawn = 0;      ///< photons taken from the source
  std::uint64_t detected = 0;   ///< photons absorbed by fusion and reduction detectors
  std::uint64_t harvested = 0;  ///< photons in harvested states
  std::uint64_t discarded = 0;  ///< photons in products rejected without recycling
  std::uint64_t returned = 0;   ///< photons in products of the source size, merged into the source
};

/// Bucket random walk for one configuration. Strictly sequential.
class GrowthSimulator {
 public:
  explicit GrowthSimulator(SimConfig config);

  StepOutcome step();
  RateEstimate run();

  const Buckets& buckets() const { return buckets_; }
  const PhotonLedger& ledger() const { return ledger_; }
  const SimConfig& config() const { return config_; }
  std::uint64_t reduction_ops() const { return reduction_ops_; }

  /// Reflectivity and outcome distribution used for the ordered pair (m, n).
  double eta_for(PhotonCount m, PhotonCount n);
  const std::vector<double>& cdf_for(PhotonCount m, PhotonCount n);

 private:
  struct Fusion {
    bool ready = false;
    double eta = 0.0;
    double frugal_score = 0.0;
    std::vector<double> cdf;
  };

  Fusion& fusion(PhotonCount m, PhotonCount n);
  EtaObjective objective_for(PhotonCount m, PhotonCount n) const;
  std::pair<PhotonCount, PhotonCount> choose();
  bool harvest(PhotonCount size);

  SimConfig config_;
  PhotonCount window_top_;
  Buckets buckets_;
  Rng rng_;
  PhotonLedger ledger_;
  std::uint64_t reduction_ops_ = 0;
  std::uint64_t reduction_overshoots_ = 0;
  PhotonCount table_dim_;
  std::vector<Fusion> fusions_;
  std::vector<PhotonCount> scratch_;
};

RateEstimate run(const SimConfig& config);

/// Independent replicas with seeds derived from config.seed, pooled by summing
/// harvested states and measured steps.
RateEstimate run_replicas(const SimConfig& config, int replicas, unsigned threads = 0);

struct RatePoint {
  PhotonCount d = 0;
  std::uint64_t seed = 0;
  RateEstimate estimate;
};

/// One run per target, seeds derived from the template seed and d. Runs in
/// parallel; the result is ordered as d_values.
std::vector<RatePoint> rate_curve(const std::vector<PhotonCount>& d_values,
                                  const SimConfig& config_template, unsigned threads = 0);

struct ReductionTrace {
  std::uint64_t ops = 0;
  PhotonCount final_size = 0;
  bool overshoot = false;
};

/// Repeated low-reflectivity taps against vacuum. Each op removes
/// k ~ Binomial(current, p_tap) photons with p_tap = 1 - eta_r^2; stops at d,
/// or below d on an overshoot.
ReductionTrace reduce_state(Rng& rng, PhotonCount n_start, PhotonCount d,
                            const Reflectivity& eta_r);

/// Expected ops of reduce_state, solved exactly on its absorbing chain.
double expected_reduction_ops(PhotonCount n_start, PhotonCount d, double p_tap);

/// Reflectivity whose tap probability is p_tap.
Reflectivity tap_reflectivity(double p_tap);

}  // namespace fockfusion
