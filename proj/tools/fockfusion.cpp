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

// fockfusion command-line tool.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure, 1 anything else
// (I/O).

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fockfusion/analytics.hpp"
#include "fockfusion/baselines.hpp"
#include "fockfusion/csv.hpp"
#include "fockfusion/eta_opt.hpp"
#include "fockfusion/fock_oracle.hpp"
#include "fockfusion/fock_prob.hpp"
#include "fockfusion/growth_sim.hpp"

namespace fs = std::filesystem;
using namespace fockfusion;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Flat key=value config. Keys are long option names without dashes; flags on
// the command line win.
std::string apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
  return fnv1a_hex(text);
}

// Writes to a file when a path is given, else to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      const fs::path p(path);
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
      file_.open(p);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

RunManifest make_manifest(int argc, char** argv) {
  RunManifest m;
  for (int i = 1; i < argc; ++i) m.command.emplace_back(argv[i]);
  m.started = utc_now();
  return m;
}

PrecisionPolicy parse_precision(const std::string& name) {
  PrecisionPolicy p;
  if (name == "auto") p.mode = PrecisionMode::Auto;
  else if (name == "double") p.mode = PrecisionMode::Double;
  else if (name == "exact") p.mode = PrecisionMode::Exact;
  else if (name == "high") p.mode = PrecisionMode::HighPrecision;
  else throw UsageError("unknown precision mode '" + name + "'");
  return p;
}

std::vector<PhotonCount> d_grid(PhotonCount lo, PhotonCount hi, PhotonCount step) {
  if (lo < 2 || hi < lo || step < 1) throw UsageError("need 2 <= d-min <= d-max and d-step >= 1");
  std::vector<PhotonCount> out;
  for (PhotonCount d = lo; d <= hi; d += step) out.push_back(d);
  return out;
}

// ---------------------------------------------------------------------------

struct PsubArgs {
  int m = 0, n = 0;
  double eta = 0.0;
  std::optional<int> s;
  std::string precision = "auto";
  std::string output;
};

int cmd_psub(const PsubArgs& a, RunManifest manifest) {
  const PrecisionPolicy policy = parse_precision(a.precision);
  const Reflectivity r = Reflectivity::from_eta(a.eta);
  if (a.s) {
    if (*a.s < 0 || *a.s > a.m + a.n) throw UsageError("--s must lie in [0, m + n]");
    std::cout << format_number(p_sub(*a.s, a.m, a.n, r, policy)) << '\n';
    return 0;
  }
  const SubtractionDistribution dist = subtraction_distribution(a.m, a.n, r, policy);
  Sink sink(a.output);
  CsvWriter csv(sink.out(), manifest, {"s", "probability"});
  for (int s = 0; s <= dist.max_outcome(); ++s) {
    csv.row({std::to_string(s), format_number(dist[s])});
  }
  return 0;
}

struct OracleArgs {
  int m = 0, n = 0;
  double eta = 0.0;
  std::string method = "matrix";
  std::string output;
};

int cmd_oracle(const OracleArgs& a, RunManifest manifest) {
  std::vector<double> probs;
  if (a.method == "matrix") {
    probs = oracle::oracle_distribution(a.m, a.n, a.eta).probs;
  } else if (a.method == "convolution") {
    probs = oracle::convolution_distribution(a.m, a.n, a.eta).probs;
  } else {
    throw UsageError("unknown oracle method '" + a.method + "'");
  }
  Sink sink(a.output);
  CsvWriter csv(sink.out(), manifest, {"s", "probability"});
  for (std::size_t s = 0; s < probs.size(); ++s) {
    csv.row({std::to_string(s), format_number(probs[s])});
  }
  return 0;
}

struct OptimizeArgs {
  std::string objective;
  int max_m = 10, max_n = 10;
  int d = 0;
  std::string tie_break = "smaller-eta";
  double grid_step = 1e-3;
  double tolerance = 1e-8;
  std::string cache_dir;
  std::string output;
  unsigned threads = 0;
};

int cmd_optimize(const OptimizeArgs& a, RunManifest manifest) {
  const EtaObjective objective = EtaObjective::parse(a.objective, a.d);
  OptimizerSettings settings;
  settings.grid_step = a.grid_step;
  settings.eta_tolerance = a.tolerance;
  settings.tie_break = parse_tie_break(a.tie_break);
  const EtaTable table =
      a.cache_dir.empty()
          ? build_table(objective, a.max_m, a.max_n, settings, a.threads)
          : cached_table(a.cache_dir, objective, a.max_m, a.max_n, settings, a.threads);
  Sink sink(a.output);
  CsvWriter csv(sink.out(), manifest, {"m", "n", "eta_opt", "p_opt"});
  for (const auto& e : table.entries()) {
    csv.row({std::to_string(e.m), std::to_string(e.n), format_number(e.eta_opt),
             format_number(e.p_opt)});
  }
  return 0;
}

struct SimulateArgs {
  int d = 0;
  std::string strategy = "balanced";
  bool recycled = true;
  std::uint64_t steps = 10'000'000;
  std::string seed = "1";
  int source_size = 1;
  int d_prime = 0;
  bool exact = false;
  double tap = 0.0;
  std::optional<std::uint64_t> burn_in;
  int batches = 20;
  int replicas = 1;
  unsigned threads = 0;
  std::string output;
  std::string manifest;
};

int cmd_simulate(const SimulateArgs& a, RunManifest manifest) {
  SimConfig c;
  c.d = a.d;
  c.strategy = Strategy::parse(a.strategy, a.d_prime);
  c.recycled = a.recycled;
  c.steps = a.steps;
  c.burn_in = a.burn_in;
  c.seed = parse_seed(a.seed);
  c.source_size = a.source_size;
  c.exact = a.exact;
  c.reduction_tap = a.tap;
  c.batches = a.batches;
  c.validate();
  manifest.seed = c.seed;
  if (!a.output.empty()) manifest.outputs.push_back(a.output);

  const RateEstimate est = a.replicas > 1 ? run_replicas(c, a.replicas, a.threads) : run(c);
  {
    Sink sink(a.output);
    CsvWriter csv(sink.out(), manifest, rate_header());
    csv.row(rate_row(c, est));
  }
  if (!a.manifest.empty()) {
    manifest.finished = utc_now();
    Sink side(a.manifest);
    side.out() << manifest.sidecar();
  }
  return 0;
}

struct ReduceArgs {
  int d = 10;
  std::optional<int> n_start;
  int s_max = 10;
  double tap = 0.02;
  int trials = 10000;
  std::string seed = "1";
  std::string output;
};

int cmd_reduce(const ReduceArgs& a, RunManifest manifest) {
  if (a.trials < 2) throw UsageError("--trials must be at least 2");
  const std::uint64_t seed = parse_seed(a.seed);
  manifest.seed = seed;
  const Reflectivity eta_r = tap_reflectivity(a.tap);
  std::vector<int> starts;
  if (a.n_start) {
    starts.push_back(*a.n_start);
  } else {
    for (int s = 1; s <= a.s_max; ++s) starts.push_back(a.d + s);
  }
  Sink sink(a.output);
  CsvWriter csv(sink.out(), manifest,
                {"n_start", "d", "s", "tap", "trials", "mean_ops", "stderr", "expected_ops",
                 "overshoot_fraction"});
  for (int n0 : starts) {
    if (n0 < a.d) throw UsageError("start size must be at least d");
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n0)));
    double sum = 0.0, sq = 0.0;
    int overshoots = 0;
    for (int t = 0; t < a.trials; ++t) {
      const ReductionTrace tr = reduce_state(rng, n0, a.d, eta_r);
      sum += static_cast<double>(tr.ops);
      sq += static_cast<double>(tr.ops) * static_cast<double>(tr.ops);
      overshoots += tr.overshoot ? 1 : 0;
    }
    const double mean = sum / a.trials;
    const double var = std::max(0.0, (sq - a.trials * mean * mean) / (a.trials - 1));
    csv.row({std::to_string(n0), std::to_string(a.d), std::to_string(n0 - a.d),
             format_number(a.tap), std::to_string(a.trials), format_number(mean),
             format_number(std::sqrt(var / a.trials)),
             format_number(expected_reduction_ops(n0, a.d, a.tap)),
             format_number(static_cast<double>(overshoots) / a.trials)});
  }
  return 0;
}

struct BaselineArgs {
  std::string scheme = "all";
  std::vector<double> nbar{0.5, 1.0, 1.7, 2.0};
  int d_max = 32;
  std::string output;
};

void baseline_rows(CsvWriter& csv, const std::string& scheme, const BaselineArgs& a) {
  const auto row = [&](const std::string& name, const std::string& param, int d, double v) {
    csv.row({name, param, std::to_string(d), format_number(v)});
  };
  if (scheme == "spdc") {
    for (double nbar : a.nbar) {
      for (int d = 0; d <= a.d_max; ++d) row("spdc", "nbar=" + format_number(nbar), d, spdc_pprep(nbar, d));
    }
  } else if (scheme == "single-shot") {
    for (int d = 1; d <= a.d_max; ++d) {
      row("single-shot", "pbunch", d, single_shot_pbunch(d));
      row("single-shot", "rate", d, single_shot_rate(d));
    }
  } else if (scheme == "doubling") {
    for (int d = 2; d <= std::min(a.d_max, 1024); d *= 2) {
      const DoublingEstimate e = doubling_expected_singles(d);
      const ScalingReport r = doubling_scaling_report(d);
      row("doubling", "expected_singles", d, e.expected_singles);
      row("doubling", "expected_fusions", d, e.expected_fusions);
      row("doubling", "stirling_form", d, r.approx_value);
      row("doubling", "stirling_ratio", d, r.ratio);
    }
  } else if (scheme == "limited-recycling") {
    for (int n = 1; n <= std::min(a.d_max, 1000); ++n) {
      row("limited-recycling", "success", n, limited_recycling_success(n));
    }
    for (int d = 2; d <= std::min(a.d_max, 1000); ++d) {
      const double exact = limited_recycling_expected_singles(d);
      const double scaling = limited_recycling_scaling(d);
      row("limited-recycling", "expected_singles", d, exact);
      row("limited-recycling", "scaling", d, scaling);
      row("limited-recycling", "scaling_ratio", d, scaling / exact);
    }
  } else {
    throw UsageError("unknown baseline scheme '" + scheme + "'");
  }
}

int cmd_baseline(const BaselineArgs& a, RunManifest manifest) {
  Sink sink(a.output);
  CsvWriter csv(sink.out(), manifest, baseline_header());
  if (a.scheme == "all") {
    for (const char* s : {"spdc", "single-shot", "doubling", "limited-recycling"}) {
      baseline_rows(csv, s, a);
    }
  } else {
    baseline_rows(csv, a.scheme, a);
  }
  return 0;
}

struct ReproduceArgs {
  std::string figure;
  std::string out_dir;
  std::optional<std::uint64_t> steps;
  std::uint64_t small_steps = 10'000'000;
  std::uint64_t large_steps = 100'000'000;
  int large_from = 16;
  int d_min = 4, d_max = 24, d_step = 2;
  std::string seed = "1";
  unsigned threads = 0;
};

// Rates over d for one configuration; steps grow for large d unless overridden.
std::vector<RatePoint> sweep(const ReproduceArgs& a, const std::vector<PhotonCount>& ds,
                             SimConfig tmpl) {
  std::vector<PhotonCount> small, large;
  for (PhotonCount d : ds) (a.steps || d < a.large_from ? small : large).push_back(d);
  std::vector<RatePoint> out;
  for (const auto& [group, steps] : {std::pair{small, a.steps.value_or(a.small_steps)},
                                     std::pair{large, a.large_steps}}) {
    if (group.empty()) continue;
    tmpl.steps = steps;
    const auto pts = rate_curve(group, tmpl, a.threads);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

std::string rate_cell(const RatePoint& p) { return format_number(p.estimate.rate); }

int cmd_reproduce(const ReproduceArgs& a, RunManifest manifest) {
  std::string dir = a.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("FOCKFUSION_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  const fs::path path = fs::path(dir) / (a.figure + ".csv");
  const std::uint64_t seed = parse_seed(a.seed);
  manifest.seed = seed;
  manifest.outputs.push_back(path.string());
  const std::vector<PhotonCount> ds = d_grid(a.d_min, a.d_max, a.d_step);
  SimConfig tmpl;
  tmpl.seed = seed;
  tmpl.eta_policy = std::make_shared<EtaPolicy>(simulation_optimizer_settings());

  Sink sink(path.string());
  std::ostream& out = sink.out();
  if (a.figure == "fig2") {
    CsvWriter csv(out, manifest, {"nbar", "d", "pprep"});
    for (double nbar : {0.1, 0.2, 0.5, 1.0, 1.7, 2.0, 5.0, 10.0}) {
      for (int d = 0; d <= 30; ++d) {
        csv.row({format_number(nbar), std::to_string(d), format_number(spdc_pprep(nbar, d))});
      }
    }
  } else if (a.figure == "fig4") {
    CsvWriter csv(out, manifest, {"objective", "m", "n", "eta_opt", "p_opt"});
    for (const EtaObjective& obj :
         {EtaObjective::recycled_grow(), EtaObjective::nonrecycled_zero_loss()}) {
      const EtaTable t = build_table(obj, 10, 10, simulation_optimizer_settings(), a.threads);
      for (const auto& e : t.entries()) {
        csv.row({obj.name(), std::to_string(e.m), std::to_string(e.n), format_number(e.eta_opt),
                 format_number(e.p_opt)});
      }
    }
  } else if (a.figure == "fig6") {
    CsvWriter csv(out, manifest, {"n", "success"});
    const std::vector<double> curve = limited_recycling_curve(400);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      csv.row({std::to_string(i + 1), format_number(curve[i])});
    }
  } else if (a.figure == "fig7") {
    std::vector<PhotonCount> rd = ds;
    if (std::find(rd.begin(), rd.end(), 20) == rd.end()) {
      rd.push_back(20);
      std::sort(rd.begin(), rd.end());
    }
    tmpl.strategy = Strategy::balanced();
    tmpl.recycled = true;
    const auto rec = sweep(a, rd, tmpl);
    tmpl.recycled = false;
    const auto non = sweep(a, ds, tmpl);
    double r20 = 0.0;
    for (const auto& p : rec) {
      if (p.d == 20) r20 = p.estimate.rate;
    }
    const double nbar = r20 > 0.0 ? spdc_crossover(20, r20) : std::nan("");
    out << "# spdc nbar=" << format_number(nbar) << " matched at d=20\n";
    CsvWriter csv(out, manifest, {"d", "recycled", "nonrecycled", "doubling", "single_shot", "spdc"});
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto it = std::find_if(rec.begin(), rec.end(),
                                   [&](const RatePoint& p) { return p.d == ds[i]; });
      csv.row({std::to_string(ds[i]), rate_cell(*it), rate_cell(non[i]),
               format_number(ds[i] <= 1024 ? 1.0 / doubling_expected_singles(ds[i]).expected_singles
                                           : std::nan("")),
               format_number(single_shot_rate(ds[i])),
               format_number(std::isnan(nbar) ? nbar : spdc_pprep(nbar, ds[i]))});
    }
  } else if (a.figure == "fig8") {
    std::vector<std::vector<RatePoint>> cols;
    for (const Strategy& s :
         {Strategy::frugal(), Strategy::balanced(), Strategy::random(), Strategy::modesty()}) {
      tmpl.strategy = s;
      cols.push_back(sweep(a, ds, tmpl));
    }
    CsvWriter csv(out, manifest, {"d", "frugal", "balanced", "random", "modesty"});
    for (std::size_t i = 0; i < ds.size(); ++i) {
      csv.row({std::to_string(ds[i]), rate_cell(cols[0][i]), rate_cell(cols[1][i]),
               rate_cell(cols[2][i]), rate_cell(cols[3][i])});
    }
  } else if (a.figure == "fig9") {
    std::vector<std::vector<RatePoint>> cols;
    tmpl.strategy = Strategy::frugal();
    for (int x = 1; x <= 4; ++x) {
      tmpl.source_size = x;
      std::vector<PhotonCount> valid;
      for (PhotonCount d : ds) {
        if (d > x) valid.push_back(d);
      }
      cols.push_back(sweep(a, valid, tmpl));
    }
    CsvWriter csv(out, manifest, {"d", "x1", "x2", "x3", "x4"});
    for (PhotonCount d : ds) {
      std::vector<std::string> row{std::to_string(d)};
      for (const auto& col : cols) {
        const auto it = std::find_if(col.begin(), col.end(),
                                     [&](const RatePoint& p) { return p.d == d; });
        row.push_back(it == col.end() ? "" : rate_cell(*it));
      }
      csv.row(row);
    }
  } else {
    throw UsageError("unknown figure '" + a.figure + "'");
  }
  std::cerr << "wrote " << path.string() << '\n';
  return 0;
}

struct FitArgs {
  std::string input;
  std::string scheme;
  double d_min = 6.0, d_max = 24.0;
  bool weighted = false;
};

int cmd_fit(const FitArgs& a, RunManifest manifest) {
  std::ifstream in(a.input);
  if (!in) throw UsageError("cannot read " + a.input);
  const CsvTable table = read_csv(in);
  std::vector<FitPoint> points;
  const std::vector<double> d = table.numbers("d");
  const bool long_form = std::find(table.header.begin(), table.header.end(), "strategy") !=
                         table.header.end();
  if (long_form) {
    const std::size_t sc = table.column("strategy");
    const std::vector<double> rate = table.numbers("rate");
    const std::vector<double> err = table.numbers("stderr");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (table.rows[i][sc] != a.scheme) continue;
      const double w = err[i] > 0.0 ? rate[i] * rate[i] / (err[i] * err[i]) : 1.0;
      points.push_back({d[i], rate[i], w});
    }
  } else {
    const std::size_t col = table.column(a.scheme);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (table.rows[i][col].empty()) continue;
      points.push_back({d[i], std::stod(table.rows[i][col]), 1.0});
    }
  }
  const std::vector<FitPoint> window = fit_window(points, a.d_min, a.d_max);
  const PowerLawFit fit = fit_power_law(window, a.weighted);
  CsvWriter csv(std::cout, manifest,
                {"scheme", "exponent", "prefactor", "r_squared", "points_used", "d_min", "d_max"});
  csv.row({a.scheme, format_number(fit.exponent), format_number(fit.prefactor),
           format_number(fit.r_squared), std::to_string(fit.points_used),
           format_number(a.d_min), format_number(a.d_max)});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrapped Fock-state preparation: probabilities, optimal beamsplitters, "
               "bucket simulations and baselines."};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);
  std::map<CLI::App*, std::string> configs;
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", configs[sub], "flat key=value file; flags override it")
        ->check(CLI::ExistingFile);
  };

  PsubArgs psub;
  auto* c_psub = app.add_subcommand("psub", "P_sub(s | m, n) or the whole outcome distribution");
  c_psub->add_option("--m", psub.m)->check(CLI::NonNegativeNumber);
  c_psub->add_option("--n", psub.n)->check(CLI::NonNegativeNumber);
  c_psub->add_option("--eta", psub.eta, "amplitude reflectivity")->check(CLI::Range(0.0, 1.0));
  c_psub->add_option("--s", psub.s);
  c_psub->add_option("--precision", psub.precision, "auto|double|exact|high");
  c_psub->add_option("--output", psub.output);
  add_config(c_psub);

  OracleArgs orc;
  auto* c_oracle = app.add_subcommand("oracle", "outcome distribution from an independent route");
  c_oracle->add_option("--m", orc.m)->check(CLI::NonNegativeNumber);
  c_oracle->add_option("--n", orc.n)->check(CLI::NonNegativeNumber);
  c_oracle->add_option("--eta", orc.eta)->check(CLI::Range(0.0, 1.0));
  c_oracle->add_option("--method", orc.method, "matrix|convolution");
  c_oracle->add_option("--output", orc.output);
  add_config(c_oracle);

  OptimizeArgs opt;
  auto* c_opt = app.add_subcommand("optimize", "table of optimal reflectivities");
  c_opt->add_option("--objective", opt.objective,
                    "recycled|nonrecycled|frugal|frugal-above|frugal-below");
  c_opt->add_option("--max-m", opt.max_m)->check(CLI::Range(1, 64));
  c_opt->add_option("--max-n", opt.max_n)->check(CLI::Range(1, 64));
  c_opt->add_option("--d", opt.d, "target photon number, frugal objectives only");
  c_opt->add_option("--tie-break", opt.tie_break, "smaller-eta|nearest-balanced");
  c_opt->add_option("--grid-step", opt.grid_step);
  c_opt->add_option("--tolerance", opt.tolerance);
  c_opt->add_option("--cache-dir", opt.cache_dir);
  c_opt->add_option("--threads", opt.threads);
  c_opt->add_option("--output", opt.output);
  add_config(c_opt);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "bucket random walk; prints one CSV row");
  c_sim->add_option("--d", sim.d)->check(CLI::Range(2, 4096));
  c_sim->add_option("--strategy", sim.strategy, "balanced|modesty|random|frugal");
  c_sim->add_flag("--recycled,!--no-recycled", sim.recycled, "keep every heralded outcome (default)");
  c_sim->add_option("--steps", sim.steps);
  c_sim->add_option("--seed", sim.seed, "decimal or 0x-prefixed hex");
  c_sim->add_option("--source-size", sim.source_size);
  c_sim->add_option("--d-prime", sim.d_prime, "frugal window top");
  c_sim->add_flag("--exact", sim.exact, "reduce products above d to exactly d");
  c_sim->add_option("--tap", sim.tap, "reduction tap probability; 0 picks 0.1 / size");
  c_sim->add_option("--burn-in", sim.burn_in);
  c_sim->add_option("--batches", sim.batches);
  c_sim->add_option("--replicas", sim.replicas);
  c_sim->add_option("--threads", sim.threads);
  c_sim->add_option("--output", sim.output);
  c_sim->add_option("--manifest", sim.manifest, "sidecar file with the run manifest");
  add_config(c_sim);

  ReduceArgs red;
  auto* c_red = app.add_subcommand("reduce", "state reduction cost, sampled and exact");
  c_red->add_option("--d", red.d);
  c_red->add_option("--n-start", red.n_start);
  c_red->add_option("--s-max", red.s_max);
  c_red->add_option("--tap", red.tap)->check(CLI::Range(0.0, 1.0));
  c_red->add_option("--trials", red.trials);
  c_red->add_option("--seed", red.seed);
  c_red->add_option("--output", red.output);
  add_config(c_red);

  BaselineArgs base;
  auto* c_base = app.add_subcommand("baseline", "closed-form reference schemes");
  c_base->add_option("--scheme", base.scheme, "spdc|single-shot|doubling|limited-recycling|all");
  c_base->add_option("--nbar", base.nbar)->check(CLI::PositiveNumber);
  c_base->add_option("--d-max", base.d_max)->check(CLI::Range(2, 1024));
  c_base->add_option("--output", base.output);
  add_config(c_base);

  ReproduceArgs rep;
  auto* c_rep = app.add_subcommand("reproduce", "write the data grid of one figure as CSV");
  c_rep->add_option("figure", rep.figure, "fig2|fig4|fig6|fig7|fig8|fig9")->required();
  c_rep->add_option("--out-dir", rep.out_dir, "defaults to $FOCKFUSION_OUT_DIR or .");
  c_rep->add_option("--steps", rep.steps, "steps for every simulated point");
  c_rep->add_option("--small-steps", rep.small_steps);
  c_rep->add_option("--large-steps", rep.large_steps);
  c_rep->add_option("--large-from", rep.large_from);
  c_rep->add_option("--d-min", rep.d_min);
  c_rep->add_option("--d-max", rep.d_max);
  c_rep->add_option("--d-step", rep.d_step);
  c_rep->add_option("--seed", rep.seed);
  c_rep->add_option("--threads", rep.threads);
  add_config(c_rep);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "power-law fit of a rate curve");
  c_fit->add_option("--input", fit.input);
  c_fit->add_option("--scheme", fit.scheme, "strategy name or column");
  c_fit->add_option("--d-min", fit.d_min);
  c_fit->add_option("--d-max", fit.d_max);
  c_fit->add_flag("--weighted", fit.weighted, "weight points by (rate / stderr)^2");
  add_config(c_fit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  RunManifest manifest = make_manifest(argc, argv);
  try {
    for (auto& [sub, path] : configs) {
      if (sub->parsed()) manifest.config_digest = apply_config(sub, path);
    }
    const std::map<CLI::App*, std::vector<std::string>> required{
        {c_psub, {"--m", "--n", "--eta"}},
        {c_oracle, {"--m", "--n", "--eta"}},
        {c_opt, {"--objective"}},
        {c_sim, {"--d"}},
        {c_fit, {"--input", "--scheme"}}};
    for (const auto& [sub, names] : required) {
      if (!sub->parsed()) continue;
      for (const auto& name : names) {
        if (sub->get_option(name)->count() == 0) {
          std::cerr << "error: " << sub->get_name() << " needs " << name
                    << " (flag or config key)\n";
          return kExitUsage;
        }
      }
    }
    if (c_psub->parsed()) return cmd_psub(psub, manifest);
    if (c_oracle->parsed()) return cmd_oracle(orc, manifest);
    if (c_opt->parsed()) return cmd_optimize(opt, manifest);
    if (c_sim->parsed()) return cmd_simulate(sim, manifest);
    if (c_red->parsed()) return cmd_reduce(red, manifest);
    if (c_base->parsed()) return cmd_baseline(base, manifest);
    if (c_rep->parsed()) return cmd_reproduce(rep, manifest);
    if (c_fit->parsed()) return cmd_fit(fit, manifest);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PrecisionError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const CapacityError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
