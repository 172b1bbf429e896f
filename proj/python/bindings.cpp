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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "fockfusion/analytics.hpp"
#include "fockfusion/baselines.hpp"
#include "fockfusion/csv.hpp"
#include "fockfusion/eta_opt.hpp"
#include "fockfusion/fock_oracle.hpp"
#include "fockfusion/fock_prob.hpp"
#include "fockfusion/growth_sim.hpp"

namespace py = pybind11;
using namespace fockfusion;

namespace {

PrecisionPolicy precision_from(const std::string& name) {
  PrecisionPolicy p;
  if (name == "auto") p.mode = PrecisionMode::Auto;
  else if (name == "double") p.mode = PrecisionMode::Double;
  else if (name == "exact") p.mode = PrecisionMode::Exact;
  else if (name == "high") p.mode = PrecisionMode::HighPrecision;
  else throw py::value_error("precision must be auto, double, exact or high");
  return p;
}

}  // namespace

PYBIND11_MODULE(_fockfusion, mod) {
  mod.doc() = "Fock-state fusion probabilities, reflectivity optimization and growth simulation";
  mod.attr("__version__") = library_version();

  py::register_exception<PrecisionError>(mod, "PrecisionError", PyExc_ArithmeticError);
  py::register_exception<CapacityError>(mod, "CapacityError", PyExc_ValueError);

  mod.def(
      "p_sub",
      [](int s, int m, int n, double eta, const std::string& precision) {
        return p_sub(s, m, n, Reflectivity::from_eta(eta), precision_from(precision));
      },
      py::arg("s"), py::arg("m"), py::arg("n"), py::arg("eta"), py::arg("precision") = "auto");
  mod.def(
      "subtraction_distribution",
      [](int m, int n, double eta, const std::string& precision) {
        return subtraction_distribution(m, n, Reflectivity::from_eta(eta), precision_from(precision))
            .probs;
      },
      py::arg("m"), py::arg("n"), py::arg("eta"), py::arg("precision") = "auto");
  mod.def(
      "p_grow",
      [](int m, int n, double eta, bool recycled) {
        return p_grow(m, n, Reflectivity::from_eta(eta), recycled);
      },
      py::arg("m"), py::arg("n"), py::arg("eta"), py::arg("recycled") = true);
  mod.def(
      "oracle_distribution",
      [](int m, int n, double eta, const std::string& method) {
        if (method == "matrix") return oracle::oracle_distribution(m, n, eta).probs;
        if (method == "convolution") return oracle::convolution_distribution(m, n, eta).probs;
        throw py::value_error("method must be 'matrix' or 'convolution'");
      },
      py::arg("m"), py::arg("n"), py::arg("eta"), py::arg("method") = "matrix");

  mod.def(
      "optimize_eta",
      [](const std::string& objective, int m, int n, int d, const std::string& tie_break,
         double grid_step) {
        OptimizerSettings s;
        s.tie_break = parse_tie_break(tie_break);
        s.grid_step = grid_step;
        const EtaTableEntry e = optimize_eta(EtaObjective::parse(objective, d), m, n, s);
        return py::make_tuple(e.eta_opt, e.p_opt);
      },
      py::arg("objective"), py::arg("m"), py::arg("n"), py::arg("d") = 0,
      py::arg("tie_break") = "smaller-eta", py::arg("grid_step") = 1e-3,
      "(eta_opt, p_opt) for one input pair");

  py::class_<RateEstimate>(mod, "RateEstimate")
      .def_readonly("harvested", &RateEstimate::harvested)
      .def_readonly("steps", &RateEstimate::steps)
      .def_readonly("burn_in", &RateEstimate::burn_in)
      .def_readonly("rate", &RateEstimate::rate)
      .def_readonly("stderr", &RateEstimate::std_error)
      .def_readonly("reduction_ops", &RateEstimate::reduction_ops)
      .def_readonly("batch_rates", &RateEstimate::batch_rates)
      .def("__repr__", [](const RateEstimate& e) {
        return "RateEstimate(rate=" + format_number(e.rate) + ", stderr=" + format_number(e.std_error) +
               ", harvested=" + std::to_string(e.harvested) + ")";
      });

  mod.def(
      "simulate",
      [](int d, const std::string& strategy, bool recycled, std::uint64_t steps, std::uint64_t seed,
         int source_size, int d_prime, bool exact, std::optional<std::uint64_t> burn_in) {
        SimConfig c;
        c.d = d;
        c.strategy = Strategy::parse(strategy, d_prime);
        c.recycled = recycled;
        c.steps = steps;
        c.seed = seed;
        c.source_size = source_size;
        c.exact = exact;
        c.burn_in = burn_in;
        py::gil_scoped_release release;
        return run(c);
      },
      py::arg("d"), py::arg("strategy") = "balanced", py::arg("recycled") = true,
      py::arg("steps") = 1'000'000, py::arg("seed") = 1, py::arg("source_size") = 1,
      py::arg("d_prime") = 0, py::arg("exact") = false, py::arg("burn_in") = py::none());

  mod.def("expected_reduction_ops", &expected_reduction_ops, py::arg("n_start"), py::arg("d"),
          py::arg("p_tap"));

  mod.def("spdc_pprep", &spdc_pprep, py::arg("nbar"), py::arg("d"));
  mod.def("single_shot_rate", &single_shot_rate, py::arg("d"));
  mod.def(
      "doubling_expected_singles",
      [](int d) {
        const DoublingEstimate e = doubling_expected_singles(d);
        return py::dict(py::arg("target") = e.target, py::arg("expected_singles") = e.expected_singles,
                        py::arg("expected_fusions") = e.expected_fusions);
      },
      py::arg("d"));
  mod.def("limited_recycling_success", &limited_recycling_success, py::arg("n"));

  mod.def(
      "fit_power_law",
      [](const std::vector<double>& d, const std::vector<double>& rate) {
        if (d.size() != rate.size()) throw py::value_error("d and rate differ in length");
        std::vector<FitPoint> pts;
        for (std::size_t i = 0; i < d.size(); ++i) pts.push_back({d[i], rate[i]});
        const PowerLawFit f = fit_power_law(pts);
        return py::dict(py::arg("exponent") = f.exponent, py::arg("prefactor") = f.prefactor,
                        py::arg("r_squared") = f.r_squared);
      },
      py::arg("d"), py::arg("rate"));
  mod.def("spdc_crossover", &spdc_crossover, py::arg("d"), py::arg("target_rate"));
}
