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

#include "fockfusion/eta_opt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fockfusion {

namespace {

constexpr double kInvPhi = 0.6180339887498949;
// Grid peaks this close to the best grid value are refined as well; covers the
// mirror-image optimum of equal-size fusions.
constexpr double kPeakSlack = 1e-4;
constexpr double kTieTolerance = 1e-12;
constexpr std::size_t kMaxPeaks = 64;

struct Probe {
  double eta;
  double value;
};

Probe golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc >= fd) {  // keep the left part on ties
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? Probe{c, fc} : Probe{d, fd};
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

std::string format_key_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double x = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("malformed number '" + s + "'");
  return x;
}

}  // namespace

bool EtaObjective::applies_to(PhotonCount m, PhotonCount n) const {
  switch (kind) {
    case ObjectiveKind::FrugalAbove:
      return m + n >= target;
    case ObjectiveKind::FrugalBelow:
      return m + n < target;
    default:
      return true;
  }
}

std::string EtaObjective::name() const {
  switch (kind) {
    case ObjectiveKind::RecycledGrow:
      return "recycled-grow";
    case ObjectiveKind::NonrecycledZeroLoss:
      return "nonrecycled-zero-loss";
    case ObjectiveKind::FrugalAbove:
      return "frugal-above";
    case ObjectiveKind::FrugalBelow:
      return "frugal-below";
  }
  return "unknown";
}

EtaObjective EtaObjective::parse(std::string_view name, PhotonCount d) {
  if (name == "recycled-grow" || name == "recycled") return recycled_grow();
  if (name == "nonrecycled-zero-loss" || name == "nonrecycled") return nonrecycled_zero_loss();
  if (name == "frugal-above" || name == "frugal" || name == "frugal-below") {
    if (d < 2) throw std::invalid_argument("frugal objectives need a target d >= 2");
    return name == "frugal-below" ? frugal_below(d) : frugal_above(d);
  }
  throw std::invalid_argument("unknown objective '" + std::string(name) + "'");
}

double objective_value(const EtaObjective& objective, PhotonCount m, PhotonCount n, double eta) {
  if (m < 1 || n < 1) throw std::domain_error("objective needs m, n >= 1");
  if (!objective.applies_to(m, n)) {
    throw std::domain_error(objective.name() + " does not apply to m+n=" + std::to_string(m + n) +
                            " with d=" + std::to_string(objective.target));
  }
  const Reflectivity r = Reflectivity::from_eta(eta);
  const int total = m + n;
  const int largest = std::max(m, n);
  switch (objective.kind) {
    case ObjectiveKind::NonrecycledZeroLoss:
      return p_sub(0, m, n, r);
    case ObjectiveKind::RecycledGrow: {
      CompensatedSum sum;
      for (double p : subtraction_prefix(m, n, r, total - largest - 1)) sum.add(p);
      return sum.value();
    }
    case ObjectiveKind::FrugalAbove: {
      CompensatedSum sum;
      for (double p : subtraction_prefix(m, n, r, total - objective.target)) sum.add(p);
      return sum.value();
    }
    case ObjectiveKind::FrugalBelow: {
      // the s = total - largest term has zero weight
      const auto probs = subtraction_prefix(m, n, r, total - largest - 1);
      CompensatedSum sum;
      for (int s = 0; s < static_cast<int>(probs.size()); ++s) {
        sum.add(static_cast<double>(total - s - largest) * probs[s]);
      }
      return sum.value();
    }
  }
  return 0.0;
}

std::string tie_break_name(TieBreak rule) {
  return rule == TieBreak::NearestBalanced ? "nearest-balanced" : "smaller-eta";
}

TieBreak parse_tie_break(std::string_view name) {
  if (name == "smaller-eta") return TieBreak::SmallerEta;
  if (name == "nearest-balanced") return TieBreak::NearestBalanced;
  throw std::invalid_argument("unknown tie-break rule '" + std::string(name) + "'");
}

EtaTableEntry optimize_eta(const EtaObjective& objective, PhotonCount m, PhotonCount n,
                           const OptimizerSettings& settings) {
  if (m < 1 || n < 1) throw std::domain_error("optimize_eta needs m, n >= 1");
  if (!(settings.grid_step > 0.0 && settings.grid_step <= 0.5)) {
    throw std::invalid_argument("grid step must lie in (0, 0.5]");
  }
  const auto f = [&](double eta) { return objective_value(objective, m, n, eta); };

  const int cells = static_cast<int>(std::ceil(1.0 / settings.grid_step - 1e-9));
  std::vector<Probe> grid(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) {
    const double eta = std::min(1.0, i * settings.grid_step);
    grid[i] = {eta, f(eta)};
  }
  double best_grid = grid[0].value;
  for (const Probe& p : grid) best_grid = std::max(best_grid, p.value);

  // grid peaks worth refining, best first
  std::vector<int> peaks;
  for (int i = 0; i <= cells; ++i) {
    const bool left = i == 0 || grid[i].value >= grid[i - 1].value;
    const bool right = i == cells || grid[i].value >= grid[i + 1].value;
    if (left && right && grid[i].value >= best_grid - kPeakSlack * std::max(1.0, best_grid)) {
      peaks.push_back(i);
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](int a, int b) { return grid[a].value > grid[b].value; });
  if (peaks.size() > kMaxPeaks) peaks.resize(kMaxPeaks);

  std::vector<Probe> refined;
  for (int i : peaks) {
    const double lo = grid[std::max(0, i - 1)].eta;
    const double hi = grid[std::min(cells, i + 1)].eta;
    Probe p = golden_section(f, lo, hi, settings.eta_tolerance);
    if (grid[i].value > p.value) p = grid[i];
    refined.push_back(p);
  }

  const auto preferred = [&](const Probe& a, const Probe& b) {
    if (settings.tie_break == TieBreak::NearestBalanced) {
      const double da = std::fabs(a.eta - std::numbers::sqrt2 / 2);
      const double db = std::fabs(b.eta - std::numbers::sqrt2 / 2);
      if (std::fabs(da - db) > settings.eta_tolerance) return da < db;
    }
    return a.eta < b.eta;
  };
  Probe best = refined.front();
  for (const Probe& p : refined) {
    if (p.value > best.value + kTieTolerance ||
        (std::fabs(p.value - best.value) <= kTieTolerance && preferred(p, best))) {
      best = p;
    }
  }
  return EtaTableEntry{m, n, best.eta, best.value, objective};
}

// ---------------------------------------------------------------------------

EtaTable::EtaTable(EtaObjective objective, PhotonCount max_m, PhotonCount max_n,
                   OptimizerSettings settings, std::vector<EtaTableEntry> entries)
    : objective_(objective),
      max_m_(max_m),
      max_n_(max_n),
      settings_(settings),
      entries_(std::move(entries)) {
  if (entries_.size() != static_cast<std::size_t>(max_m) * static_cast<std::size_t>(max_n)) {
    throw std::invalid_argument("eta table needs max_m * max_n entries");
  }
}

const EtaTableEntry& EtaTable::at(PhotonCount m, PhotonCount n) const {
  if (m < 1 || n < 1 || m > max_m_ || n > max_n_) {
    throw std::out_of_range("eta table has no cell (" + std::to_string(m) + ", " +
                            std::to_string(n) + ")");
  }
  return entries_[static_cast<std::size_t>(m - 1) * max_n_ + (n - 1)];
}

void EtaTable::write_csv(std::ostream& out) const {
  out << "m,n,eta_opt,p_opt\n";
  out << std::setprecision(12);
  for (const auto& e : entries_) {
    out << e.m << ',' << e.n << ',' << e.eta_opt << ',' << e.p_opt << '\n';
  }
}

void EtaTable::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << "fockfusion-eta-table " << kEtaTableFormatVersion << '\n'
        << "objective " << objective_.name() << '\n'
        << "target " << objective_.target << '\n'
        << "max_m " << max_m_ << '\n'
        << "max_n " << max_n_ << '\n'
        << "grid_step " << format_double(settings_.grid_step) << '\n'
        << "eta_tolerance " << format_double(settings_.eta_tolerance) << '\n'
        << "tie_break " << tie_break_name(settings_.tie_break) << '\n'
        << "entries " << entries_.size() << '\n';
    for (const auto& e : entries_) {
      out << e.m << ' ' << e.n << ' ' << format_double(e.eta_opt) << ' '
          << format_double(e.p_opt) << ' ' << e.objective.name() << ' ' << e.objective.target
          << '\n';
    }
  }
  std::filesystem::rename(tmp, path);
}

EtaTable EtaTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto expect = [&](const char* key) {
    std::string k, v;
    if (!(in >> k >> v) || k != key) {
      throw std::runtime_error(path.string() + ": expected '" + key + "'");
    }
    return v;
  };
  if (std::stoi(expect("fockfusion-eta-table")) != kEtaTableFormatVersion) {
    throw std::runtime_error(path.string() + ": unsupported table version");
  }
  const std::string name = expect("objective");
  const int target = std::stoi(expect("target"));
  const EtaObjective objective = EtaObjective::parse(name, target);
  const int max_m = std::stoi(expect("max_m"));
  const int max_n = std::stoi(expect("max_n"));
  OptimizerSettings settings;
  settings.grid_step = parse_double(expect("grid_step"));
  settings.eta_tolerance = parse_double(expect("eta_tolerance"));
  settings.tie_break = parse_tie_break(expect("tie_break"));
  const std::size_t count = std::stoul(expect("entries"));

  std::vector<EtaTableEntry> entries;
  entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    EtaTableEntry e;
    std::string eta, p, obj;
    int obj_target = 0;
    if (!(in >> e.m >> e.n >> eta >> p >> obj >> obj_target)) {
      throw std::runtime_error(path.string() + ": truncated table body");
    }
    e.eta_opt = parse_double(eta);
    e.p_opt = parse_double(p);
    e.objective = EtaObjective::parse(obj, obj_target);
    entries.push_back(e);
  }
  return EtaTable(objective, max_m, max_n, settings, std::move(entries));
}

EtaTable build_table(const EtaObjective& objective, PhotonCount max_m, PhotonCount max_n,
                     const OptimizerSettings& settings, unsigned threads) {
  if (max_m < 1 || max_n < 1 || max_m > 64 || max_n > 64) {
    throw std::domain_error("table extents must lie in [1, 64]");
  }
  const std::size_t cells = static_cast<std::size_t>(max_m) * static_cast<std::size_t>(max_n);
  std::vector<EtaTableEntry> entries(cells);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      const PhotonCount m = static_cast<PhotonCount>(i / max_n) + 1;
      const PhotonCount n = static_cast<PhotonCount>(i % max_n) + 1;
      const EtaObjective cell =
          objective.is_frugal() ? EtaObjective::frugal_for(m, n, objective.target) : objective;
      entries[i] = optimize_eta(cell, m, n, settings);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
  }
  return EtaTable(objective, max_m, max_n, settings, std::move(entries));
}

std::string table_cache_name(const EtaObjective& objective, PhotonCount max_m, PhotonCount max_n,
                             const OptimizerSettings& settings) {
  std::ostringstream name;
  name << "eta-v" << kEtaTableFormatVersion << '_' << objective.name() << "_d" << objective.target
       << '_' << max_m << 'x' << max_n << "_g" << format_key_double(settings.grid_step) << "_t"
       << format_key_double(settings.eta_tolerance) << '_' << tie_break_name(settings.tie_break)
       << ".tbl";
  return name.str();
}

EtaTable cached_table(const std::filesystem::path& cache_dir, const EtaObjective& objective,
                      PhotonCount max_m, PhotonCount max_n, const OptimizerSettings& settings,
                      unsigned threads) {
  const auto path = cache_dir / table_cache_name(objective, max_m, max_n, settings);
  if (std::filesystem::exists(path)) {
    try {
      EtaTable table = EtaTable::load(path);
      if (table.objective() == objective && table.max_m() == max_m && table.max_n() == max_n &&
          table.settings().grid_step == settings.grid_step &&
          table.settings().eta_tolerance == settings.eta_tolerance &&
          table.settings().tie_break == settings.tie_break) {
        return table;
      }
    } catch (const std::exception&) {
      // stale or corrupt cache entry; rebuild below
    }
  }
  EtaTable table = build_table(objective, max_m, max_n, settings, threads);
  table.save(path);
  return table;
}

// ---------------------------------------------------------------------------

EtaTableEntry EtaPolicy::entry(const EtaObjective& objective, PhotonCount m, PhotonCount n) {
  const Key key{objective, m, n};
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  // Optimize outside the lock; a concurrent duplicate computes the same value.
  const EtaTableEntry computed = optimize_eta(objective, m, n, settings_);
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, computed).first->second;
}

void EtaPolicy::preload(const EtaTable& table) {
  std::lock_guard lock(mutex_);
  for (const auto& e : table.entries()) {
    cache_.emplace(Key{e.objective, e.m, e.n}, e);
  }
}

std::size_t EtaPolicy::size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

}  // namespace fockfusion
