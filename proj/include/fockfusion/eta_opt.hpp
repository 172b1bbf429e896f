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

#include <filesystem>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fockfusion/fock_prob.hpp"

namespace fockfusion {

enum class ObjectiveKind {
  RecycledGrow,         ///< P(heralded state at least as large as both inputs)
  NonrecycledZeroLoss,  ///< P(s = 0)
  FrugalAbove,          ///< P(at least d photons survive), needs m + n >= d
  FrugalBelow,          ///< sum_s (m+n-s-max(m,n)) P(s), needs m + n < d
};

struct EtaObjective {
  ObjectiveKind kind = ObjectiveKind::RecycledGrow;
  PhotonCount target = 0;  // d, frugal kinds only

  static EtaObjective recycled_grow() { return {ObjectiveKind::RecycledGrow, 0}; }
  static EtaObjective nonrecycled_zero_loss() { return {ObjectiveKind::NonrecycledZeroLoss, 0}; }
  static EtaObjective frugal_above(PhotonCount d) { return {ObjectiveKind::FrugalAbove, d}; }
  static EtaObjective frugal_below(PhotonCount d) { return {ObjectiveKind::FrugalBelow, d}; }
  /// The frugal objective that applies to the pair (m, n) for target d.
  static EtaObjective frugal_for(PhotonCount m, PhotonCount n, PhotonCount d) {
    return m + n >= d ? frugal_above(d) : frugal_below(d);
  }

  bool is_frugal() const {
    return kind == ObjectiveKind::FrugalAbove || kind == ObjectiveKind::FrugalBelow;
  }
  bool applies_to(PhotonCount m, PhotonCount n) const;

  std::string name() const;
  /// Accepts the names produced by name(); "frugal" picks frugal-above.
  static EtaObjective parse(std::string_view name, PhotonCount d = 0);

  friend bool operator==(const EtaObjective&, const EtaObjective&) = default;
  friend auto operator<=>(const EtaObjective& a, const EtaObjective& b) {
    return std::tie(a.kind, a.target) <=> std::tie(b.kind, b.target);
  }
};

/// The objective as a function of eta. Throws std::domain_error when the
/// frugal objective does not apply to (m, n).
double objective_value(const EtaObjective& objective, PhotonCount m, PhotonCount n, double eta);

/// Rule for choosing among maximizers of equal value.
enum class TieBreak {
  SmallerEta,       ///< the smallest maximizing eta
  NearestBalanced,  ///< the maximizer closest to 1/sqrt(2), then the smaller eta
};

std::string tie_break_name(TieBreak rule);
TieBreak parse_tie_break(std::string_view name);

struct OptimizerSettings {
  double grid_step = 1e-3;
  double eta_tolerance = 1e-8;
  TieBreak tie_break = TieBreak::SmallerEta;
};

struct EtaTableEntry {
  PhotonCount m = 0;
  PhotonCount n = 0;
  double eta_opt = 0.0;
  double p_opt = 0.0;
  EtaObjective objective;
};

/// Global maximum over eta in [0, 1]: a coarse grid, then golden-section
/// refinement of every grid peak within reach of the best one. Between
/// maximizers of equal value the smaller eta wins.
EtaTableEntry optimize_eta(const EtaObjective& objective, PhotonCount m, PhotonCount n,
                           const OptimizerSettings& settings = {});

/// Dense (m, n) table for 1 <= m <= max_m, 1 <= n <= max_n. Frugal tables use,
/// cell by cell, whichever frugal objective applies for their target d.
class EtaTable {
 public:
  EtaTable(EtaObjective objective, PhotonCount max_m, PhotonCount max_n,
           OptimizerSettings settings, std::vector<EtaTableEntry> entries);

  const EtaTableEntry& at(PhotonCount m, PhotonCount n) const;
  const EtaObjective& objective() const { return objective_; }
  PhotonCount max_m() const { return max_m_; }
  PhotonCount max_n() const { return max_n_; }
  const OptimizerSettings& settings() const { return settings_; }
  const std::vector<EtaTableEntry>& entries() const { return entries_; }

  /// CSV: m,n,eta_opt,p_opt
  void write_csv(std::ostream& out) const;

  /// Versioned text format; doubles are stored as hex floats so a round trip is exact.
  void save(const std::filesystem::path& path) const;
  /// Throws std::runtime_error on a missing file, a version mismatch or a malformed body.
  static EtaTable load(const std::filesystem::path& path);

 private:
  EtaObjective objective_;
  PhotonCount max_m_;
  PhotonCount max_n_;
  OptimizerSettings settings_;
  std::vector<EtaTableEntry> entries_;
};

inline constexpr int kEtaTableFormatVersion = 1;

/// Parallel over cells; threads = 0 uses the hardware concurrency.
EtaTable build_table(const EtaObjective& objective, PhotonCount max_m, PhotonCount max_n,
                     const OptimizerSettings& settings = {}, unsigned threads = 0);

/// File name that keys a cached table by objective, extent and tolerances.
std::string table_cache_name(const EtaObjective& objective, PhotonCount max_m, PhotonCount max_n,
                             const OptimizerSettings& settings);

/// Loads the table from cache_dir when a matching file exists, else builds and stores it.
EtaTable cached_table(const std::filesystem::path& cache_dir, const EtaObjective& objective,
                      PhotonCount max_m, PhotonCount max_n,
                      const OptimizerSettings& settings = {}, unsigned threads = 0);

/// Settings the simulator uses by default. Equal inputs have several
/// growth-maximizing reflectivities; prefer the one nearest a 50/50 splitter.
inline OptimizerSettings simulation_optimizer_settings() {
  OptimizerSettings s;
  s.tie_break = TieBreak::NearestBalanced;
  return s;
}

/// Lazily memoized optimum per (objective, m, n). Safe to share between threads.
class EtaPolicy {
 public:
  explicit EtaPolicy(OptimizerSettings settings = {}) : settings_(settings) {}

  EtaTableEntry entry(const EtaObjective& objective, PhotonCount m, PhotonCount n);
  void preload(const EtaTable& table);
  std::size_t size() const;
  const OptimizerSettings& settings() const { return settings_; }

 private:
  using Key = std::tuple<EtaObjective, PhotonCount, PhotonCount>;
  OptimizerSettings settings_;
  mutable std::mutex mutex_;
  std::map<Key, EtaTableEntry> cache_;
};

}  // namespace fockfusion
