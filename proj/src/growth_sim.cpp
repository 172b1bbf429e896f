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

#include "fockfusion/growth_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace fockfusion {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below needs a positive bound");
  // Lemire, "Fast random integer generation in an interval" (2019)
  std::uint64_t x = engine_();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = engine_();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t parse_seed(std::string_view text) {
  std::string s(text);
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s = s.substr(2);
  }
  if (s.empty() || s[0] == '-' || s[0] == '+') {
    throw std::invalid_argument("invalid seed '" + std::string(text) + "'");
  }
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used, base);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid seed '" + std::string(text) + "'");
  }
  if (used != s.size()) throw std::invalid_argument("invalid seed '" + std::string(text) + "'");
  return v;
}

std::string Strategy::name() const {
  switch (kind) {
    case StrategyKind::Balanced:
      return "balanced";
    case StrategyKind::Modesty:
      return "modesty";
    case StrategyKind::Random:
      return "random";
    case StrategyKind::Frugal:
      return "frugal";
  }
  return "unknown";
}

Strategy Strategy::parse(std::string_view name, PhotonCount d_prime) {
  if (name == "balanced") return balanced();
  if (name == "modesty") return modesty();
  if (name == "random") return random();
  if (name == "frugal") return frugal(d_prime);
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Buckets

Buckets::Buckets(PhotonCount source_size, PhotonCount capacity) : source_(source_size) {
  if (source_size < 1 || capacity < source_size) {
    throw std::invalid_argument("bucket capacity must cover the source size >= 1");
  }
  counts_.assign(static_cast<std::size_t>(capacity) + 1, 0);
}

std::uint64_t Buckets::count(PhotonCount size) const {
  if (size == source_) return kInfinite;
  if (size < 0 || size > capacity()) return 0;
  return counts_[size];
}

bool Buckets::has(PhotonCount size, std::uint64_t needed) const { return count(size) >= needed; }

void Buckets::take(PhotonCount size) {
  if (size == source_) return;
  if (size < 0 || size > capacity() || counts_[size] == 0) {
    throw std::logic_error("take from empty bucket " + std::to_string(size));
  }
  --counts_[size];
}

void Buckets::put(PhotonCount size) {
  if (size == source_) return;
  if (size < 0 || size > capacity()) {
    throw std::logic_error("bucket size " + std::to_string(size) + " outside capacity");
  }
  ++counts_[size];
}

PhotonCount Buckets::largest() const {
  for (PhotonCount k = capacity(); k > source_; --k) {
    if (counts_[k] > 0) return k;
  }
  return source_;
}

PhotonCount Buckets::largest_pair() const {
  for (PhotonCount k = capacity(); k > source_; --k) {
    if (counts_[k] >= 2) return k;
  }
  return source_;
}

std::vector<PhotonCount> Buckets::nonempty_sizes() const {
  std::vector<PhotonCount> out;
  for (PhotonCount k = 1; k <= capacity(); ++k) {
    if (has(k)) out.push_back(k);
  }
  return out;
}

std::uint64_t Buckets::stored_photons() const {
  std::uint64_t total = 0;
  for (PhotonCount k = 0; k <= capacity(); ++k) {
    if (k != source_) total += counts_[k] * static_cast<std::uint64_t>(k);
  }
  return total;
}

// ---------------------------------------------------------------------------
// pair selection

namespace {

bool pair_available(const Buckets& b, PhotonCount m, PhotonCount n) {
  return m == n ? b.has(m, 2) : (b.has(m) && b.has(n));
}

template <class Score>
std::pair<PhotonCount, PhotonCount> frugal_pair(const Buckets& b, PhotonCount d,
                                                PhotonCount window_top, Score&& frugal_score) {
  const PhotonCount k = b.largest_pair();
  if (k <= window_top / 2) return {k, k};

  // best pair landing in [d, window_top], larger partner first
  std::pair<PhotonCount, PhotonCount> best{0, 0};
  double best_score = -1.0;
  for (PhotonCount m = b.capacity(); 2 * m >= d; --m) {
    if (!b.has(m)) continue;
    const PhotonCount hi = std::min(m, window_top - m);
    const PhotonCount lo = std::max<PhotonCount>(1, d - m);
    for (PhotonCount n = hi; n >= lo; --n) {
      if (!pair_available(b, m, n)) continue;
      const double score = frugal_score(m, n);
      if (score > best_score) {
        best_score = score;
        best = {m, n};
      }
    }
  }
  if (best.first > 0) return best;

  // below the target: the two largest distinct sizes, else the largest pair under d
  PhotonCount first = 0;
  PhotonCount second = 0;
  for (PhotonCount m = b.capacity(); m >= 1; --m) {
    if (!b.has(m)) continue;
    if (first == 0) {
      first = m;
    } else {
      second = m;
      break;
    }
  }
  if (second > 0 && first + second < d) return {first, second};
  std::pair<PhotonCount, PhotonCount> fallback{0, 0};
  for (PhotonCount m = b.capacity(); m >= 1; --m) {
    if (!b.has(m)) continue;
    for (PhotonCount n = std::min(m, d - 1 - m); n >= 1; --n) {
      if (pair_available(b, m, n) && m + n > fallback.first + fallback.second) {
        fallback = {m, n};
        break;
      }
    }
  }
  if (fallback.first > 0) return fallback;
  return {b.source_size(), b.source_size()};
}

template <class Score>
std::pair<PhotonCount, PhotonCount> select_impl(const Buckets& b, const Strategy& strategy,
                                                PhotonCount d, Rng& rng,
                                                std::vector<PhotonCount>& scratch,
                                                Score&& frugal_score) {
  switch (strategy.kind) {
    case StrategyKind::Balanced: {
      const PhotonCount k = b.largest_pair();
      return {k, k};
    }
    case StrategyKind::Modesty:
      return {b.largest(), b.source_size()};
    case StrategyKind::Random: {
      scratch.clear();
      for (PhotonCount k = 1; k <= b.capacity(); ++k) {
        if (b.has(k)) scratch.push_back(k);
      }
      const PhotonCount first = scratch[rng.below(scratch.size())];
      if (!b.has(first, 2)) {
        scratch.erase(std::find(scratch.begin(), scratch.end(), first));
      }
      const PhotonCount second = scratch[rng.below(scratch.size())];
      return {first, second};
    }
    case StrategyKind::Frugal: {
      const PhotonCount top = strategy.d_prime > 0 ? strategy.d_prime : d;
      return frugal_pair(b, d, top, frugal_score);
    }
  }
  throw std::logic_error("unknown strategy");
}

}  // namespace

std::pair<PhotonCount, PhotonCount> select_pair(const Buckets& buckets, const Strategy& strategy,
                                                PhotonCount d, Rng& rng, EtaPolicy& policy) {
  std::vector<PhotonCount> scratch;
  return select_impl(buckets, strategy, d, rng, scratch, [&](PhotonCount m, PhotonCount n) {
    return policy.entry(EtaObjective::frugal_above(d), m, n).p_opt;
  });
}

// ---------------------------------------------------------------------------
// simulator

void SimConfig::validate() const {
  if (d < 2) throw std::invalid_argument("target d must be at least 2");
  if (source_size < 1 || source_size >= d) {
    throw std::invalid_argument("source size must lie in [1, d)");
  }
  if (strategy.kind == StrategyKind::Frugal && strategy.d_prime != 0 && strategy.d_prime < d) {
    throw std::invalid_argument("frugal window d' must be at least d");
  }
  if (batches < 2) throw std::invalid_argument("need at least two batches");
  const std::uint64_t burn = burn_in.value_or(default_burn_in(steps));
  if (steps <= burn || steps - burn < static_cast<std::uint64_t>(batches)) {
    throw std::invalid_argument("steps must exceed burn-in by at least one step per batch");
  }
  if (reduction_tap < 0.0 || reduction_tap >= 1.0) {
    throw std::invalid_argument("reduction tap probability must lie in [0, 1)");
  }
}

std::uint64_t default_burn_in(std::uint64_t steps) {
  const std::uint64_t burn = std::max<std::uint64_t>(steps / 100, 10'000);
  return std::min(burn, steps / 2);
}

GrowthSimulator::GrowthSimulator(SimConfig config)
    : config_(std::move(config)),
      window_top_(config_.strategy.d_prime > 0 ? config_.strategy.d_prime : config_.d),
      buckets_(config_.source_size, std::max(config_.d - 1, config_.source_size)),
      rng_(config_.seed),
      table_dim_(std::max(config_.d - 1, config_.source_size) + 1) {
  config_.validate();
  if (!config_.eta_policy) config_.eta_policy = std::make_shared<EtaPolicy>(simulation_optimizer_settings());
  fusions_.resize(static_cast<std::size_t>(table_dim_) * table_dim_);
}

EtaObjective GrowthSimulator::objective_for(PhotonCount m, PhotonCount n) const {
  if (config_.strategy.kind == StrategyKind::Frugal) {
    return EtaObjective::frugal_for(m, n, config_.d);
  }
  return config_.recycled ? EtaObjective::recycled_grow() : EtaObjective::nonrecycled_zero_loss();
}

GrowthSimulator::Fusion& GrowthSimulator::fusion(PhotonCount m, PhotonCount n) {
  Fusion& f = fusions_[static_cast<std::size_t>(m) * table_dim_ + n];
  if (f.ready) return f;
  const EtaObjective objective = objective_for(m, n);
  const EtaTableEntry entry = config_.eta_policy->entry(objective, m, n);
  const SubtractionDistribution dist =
      subtraction_distribution(m, n, Reflectivity::from_eta(entry.eta_opt));
  f.eta = entry.eta_opt;
  f.frugal_score = objective.kind == ObjectiveKind::FrugalAbove ? entry.p_opt : 0.0;
  f.cdf.resize(dist.probs.size());
  const double total = dist.total();
  double acc = 0.0;
  for (std::size_t s = 0; s < dist.probs.size(); ++s) {
    acc += dist.probs[s] / total;
    f.cdf[s] = acc;
  }
  f.cdf.back() = 1.0;
  f.ready = true;
  return f;
}

double GrowthSimulator::eta_for(PhotonCount m, PhotonCount n) { return fusion(m, n).eta; }

const std::vector<double>& GrowthSimulator::cdf_for(PhotonCount m, PhotonCount n) {
  return fusion(m, n).cdf;
}

std::pair<PhotonCount, PhotonCount> GrowthSimulator::choose() {
  return select_impl(buckets_, config_.strategy, config_.d, rng_, scratch_,
                     [this](PhotonCount m, PhotonCount n) { return fusion(m, n).frugal_score; });
}

bool GrowthSimulator::harvest(PhotonCount size) {
  if (!config_.exact || size == config_.d) {
    ledger_.harvested += static_cast<std::uint64_t>(size);
    return true;
  }
  const double tap = config_.reduction_tap > 0.0 ? config_.reduction_tap : 0.1 / size;
  const ReductionTrace trace = reduce_state(rng_, size, config_.d, tap_reflectivity(tap));
  reduction_ops_ += trace.ops;
  ledger_.detected += static_cast<std::uint64_t>(size - trace.final_size);
  if (!trace.overshoot) {
    ledger_.harvested += static_cast<std::uint64_t>(trace.final_size);
    return true;
  }
  ++reduction_overshoots_;
  if (config_.recycled && trace.final_size > 0) {
    if (trace.final_size == buckets_.source_size()) {
      ledger_.returned += static_cast<std::uint64_t>(trace.final_size);
    }
    buckets_.put(trace.final_size);
  } else {
    ledger_.discarded += static_cast<std::uint64_t>(trace.final_size);
  }
  return false;
}

StepOutcome GrowthSimulator::step() {
  const auto [m, n] = choose();
  const PhotonCount x = buckets_.source_size();
  buckets_.take(m);
  buckets_.take(n);
  if (m == x) ledger_.drawn += static_cast<std::uint64_t>(x);
  if (n == x) ledger_.drawn += static_cast<std::uint64_t>(x);

  const std::vector<double>& cdf = fusion(m, n).cdf;
  const double u = rng_.uniform();
  PhotonCount s = 0;
  while (s < m + n && u >= cdf[s]) ++s;

  StepOutcome out{m, n, s, m + n - s, false};
  ledger_.detected += static_cast<std::uint64_t>(s);
  if (config_.recycled || s == 0) {
    if (out.result_size >= config_.d) {
      out.harvested = harvest(out.result_size);
    } else if (out.result_size > 0) {
      if (out.result_size == x) ledger_.returned += static_cast<std::uint64_t>(x);
      buckets_.put(out.result_size);
    }
  } else {
    ledger_.discarded += static_cast<std::uint64_t>(out.result_size);
  }
  return out;
}

RateEstimate GrowthSimulator::run() {
  const std::uint64_t burn = config_.burn_in.value_or(default_burn_in(config_.steps));
  const std::uint64_t measured = config_.steps - burn;
  const auto batches = static_cast<std::uint64_t>(config_.batches);
  const std::uint64_t batch_len = measured / batches;

  for (std::uint64_t t = 0; t < burn; ++t) step();
  const std::uint64_t ops_before = reduction_ops_;
  const std::uint64_t overshoots_before = reduction_overshoots_;

  RateEstimate est;
  est.steps = config_.steps;
  est.burn_in = burn;
  est.batch_rates.reserve(batches);
  for (std::uint64_t b = 0; b < batches; ++b) {
    const std::uint64_t len = b + 1 == batches ? measured - batch_len * b : batch_len;
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < len; ++t) {
      if (step().harvested) ++hits;
    }
    est.harvested += hits;
    est.batch_rates.push_back(static_cast<double>(hits) / static_cast<double>(len));
  }
  est.rate = static_cast<double>(est.harvested) / static_cast<double>(measured);

  const double mean =
      std::accumulate(est.batch_rates.begin(), est.batch_rates.end(), 0.0) / batches;
  double ss = 0.0;
  for (double r : est.batch_rates) ss += (r - mean) * (r - mean);
  est.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  est.reduction_ops = reduction_ops_ - ops_before;
  est.reduction_overshoots = reduction_overshoots_ - overshoots_before;
  return est;
}

RateEstimate run(const SimConfig& config) { return GrowthSimulator(config).run(); }

namespace {

template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
}

}  // namespace

RateEstimate run_replicas(const SimConfig& config, int replicas, unsigned threads) {
  if (replicas < 1) throw std::invalid_argument("need at least one replica");
  SimConfig shared = config;
  if (!shared.eta_policy) shared.eta_policy = std::make_shared<EtaPolicy>(simulation_optimizer_settings());
  std::vector<RateEstimate> parts(static_cast<std::size_t>(replicas));
  parallel_for(parts.size(), threads, [&](std::size_t i) {
    SimConfig c = shared;
    c.seed = derive_seed(shared.seed, i);
    parts[i] = run(c);
  });

  RateEstimate pooled;
  std::uint64_t measured = 0;
  for (const auto& p : parts) {
    pooled.harvested += p.harvested;
    pooled.steps += p.steps;
    pooled.burn_in += p.burn_in;
    pooled.reduction_ops += p.reduction_ops;
    pooled.reduction_overshoots += p.reduction_overshoots;
    measured += p.measured_steps();
    pooled.batch_rates.insert(pooled.batch_rates.end(), p.batch_rates.begin(),
                              p.batch_rates.end());
  }
  pooled.rate = static_cast<double>(pooled.harvested) / static_cast<double>(measured);
  const double k = static_cast<double>(pooled.batch_rates.size());
  const double mean = std::accumulate(pooled.batch_rates.begin(), pooled.batch_rates.end(), 0.0) / k;
  double ss = 0.0;
  for (double r : pooled.batch_rates) ss += (r - mean) * (r - mean);
  pooled.std_error = std::sqrt(ss / (k - 1.0) / k);
  return pooled;
}

std::vector<RatePoint> rate_curve(const std::vector<PhotonCount>& d_values,
                                  const SimConfig& config_template, unsigned threads) {
  if (!std::is_sorted(d_values.begin(), d_values.end())) {
    throw std::invalid_argument("rate_curve needs ascending d values");
  }
  SimConfig shared = config_template;
  if (!shared.eta_policy) shared.eta_policy = std::make_shared<EtaPolicy>(simulation_optimizer_settings());
  std::vector<RatePoint> out(d_values.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    SimConfig c = shared;
    c.d = d_values[i];
    c.seed = derive_seed(shared.seed, static_cast<std::uint64_t>(d_values[i]));
    out[i] = RatePoint{c.d, c.seed, run(c)};
  });
  return out;
}

// ---------------------------------------------------------------------------
// state reduction

Reflectivity tap_reflectivity(double p_tap) {
  if (!(p_tap > 0.0 && p_tap < 1.0)) {
    throw std::domain_error("tap probability must lie in (0, 1)");
  }
  return Reflectivity::from_eta(std::sqrt(1.0 - p_tap));
}

ReductionTrace reduce_state(Rng& rng, PhotonCount n_start, PhotonCount d,
                            const Reflectivity& eta_r) {
  if (d < 0 || n_start < d) throw std::domain_error("reduce_state needs n_start >= d >= 0");
  const double tap = eta_r.pass();
  if (!(tap > 0.0)) throw std::domain_error("reduce_state needs eta_r < 1");
  ReductionTrace trace{0, n_start, false};
  while (trace.final_size > d) {
    ++trace.ops;
    PhotonCount detected = 0;
    for (PhotonCount i = 0; i < trace.final_size; ++i) {
      if (rng.uniform() < tap) ++detected;
    }
    trace.final_size -= detected;
  }
  trace.overshoot = trace.final_size < d;
  return trace;
}

double expected_reduction_ops(PhotonCount n_start, PhotonCount d, double p_tap) {
  if (d < 0 || n_start < d) throw std::domain_error("needs n_start >= d >= 0");
  if (!(p_tap > 0.0 && p_tap < 1.0)) throw std::domain_error("tap probability must lie in (0, 1)");
  // E[k] for k > d: E[k] = (1 + sum_{j>=1} P(j|k) E[k-j]) / (1 - P(0|k)); E[<= d] = 0
  std::vector<double> expected(static_cast<std::size_t>(n_start) + 1, 0.0);
  const double log_tap = std::log(p_tap);
  const double log_keep = std::log1p(-p_tap);
  for (PhotonCount k = d + 1; k <= n_start; ++k) {
    double acc = 1.0;
    for (PhotonCount j = 1; j <= k - d - 1; ++j) {
      const double pj = std::exp(log_binomial(k, j) + j * log_tap + (k - j) * log_keep);
      acc += pj * expected[k - j];
    }
    expected[k] = acc / -std::expm1(k * log_keep);
  }
  return expected[n_start];
}

}  // namespace fockfusion
