#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "heavytail/heavytail.hpp"

namespace py = pybind11;
namespace ht = heavytail;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw ht::BadConfig("expected a one-dimensional array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

Array to_array(std::vector<double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict result_dict(const ht::TestResult& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["z"] = r.z_score;
  d["p"] = r.p_value;
  d["reject"] = r.reject;
  d["n"] = r.n;
  d["m"] = r.m;
  d["q"] = r.q;
  d["blocks_exceed_sqrt_m"] = r.blocks_exceed_sqrt_m;
  d["verdict"] = r.verdict();
  return d;
}

ht::ExperimentSpec make_spec(const std::string& dist, std::vector<std::size_t> m,
                             std::vector<std::size_t> n, std::vector<double> q,
                             std::size_t scenarios, std::uint64_t seed) {
  ht::ExperimentSpec spec;
  spec.distribution = ht::dist::DistributionSpec::parse(dist);
  spec.m_values = std::move(m);
  spec.n_values = std::move(n);
  spec.q_values = std::move(q);
  spec.scenarios = scenarios;
  spec.master_seed = seed;
  spec.validate();
  return spec;
}

py::dict cell_dict(const ht::CellResult& c) {
  py::dict d;
  d["m"] = c.m;
  d["n"] = c.n;
  d["q"] = c.q;
  d["rejections"] = c.rejections;
  d["scenarios"] = c.scenarios;
  d["failures"] = c.failures;
  d["err"] = c.err;
  d["type2"] = c.type2;
  d["mean_statistic"] = c.mean_statistic;
  d["std_statistic"] = c.std_statistic;
  return d;
}

}  // namespace

PYBIND11_MODULE(_heavytail, m) {
  m.doc() = "Gaussian domain of attraction test (C++ core)";

  static py::exception<ht::Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<ht::BadConfig>(m, "BadConfig", error.ptr());
  py::register_exception<ht::InsufficientSample>(m, "InsufficientSample", error.ptr());
  py::register_exception<ht::DegenerateSample>(m, "DegenerateSample", error.ptr());
  py::register_exception<ht::DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ht::FitError>(m, "FitError", error.ptr());
  py::register_exception<ht::ParseError>(m, "ParseError", error.ptr());

  m.attr("TWO_OVER_PI") = ht::kTwoOverPi;
  m.attr("SIGMA_PI_SQ") = ht::kSigmaPiSq;
  m.def("sigma_pi", &ht::sigma_pi);

  m.def(
      "draw",
      [](const std::string& dist, std::size_t count, std::uint64_t seed, std::uint64_t stream) {
        auto spec = ht::dist::DistributionSpec::parse(dist);
        std::vector<double> values;
        {
          py::gil_scoped_release release;
          values = ht::dist::draw(spec, {seed, stream}, count).values;
        }
        return to_array(std::move(values));
      },
      py::arg("dist"), py::arg("m"), py::arg("seed") = 0, py::arg("stream") = 0,
      "Draw m values from a distribution given in text form, e.g. 'alpha-stable:1.5'.");

  m.def(
      "statistic",
      [](const Array& x, std::size_t n) {
        return ht::compute_statistic(ht::summarize_blocks(view(x), n)).value;
      },
      py::arg("x"), py::arg("n"));
  m.def(
      "uncentered_statistic",
      [](const Array& x, std::size_t n) { return ht::uncentered_statistic(view(x), n).value; },
      py::arg("x"), py::arg("n"));
  m.def(
      "bridge_path",
      [](const Array& x, std::size_t n, std::optional<double> normalizer) {
        const auto s = view(x);
        const auto p = ht::build_bridge_path(
            s, n, normalizer.value_or(std::sqrt(static_cast<double>(s.size()))));
        return py::make_tuple(to_array(p.grid), to_array(p.values));
      },
      py::arg("x"), py::arg("n"), py::arg("normalizer") = py::none(),
      "Return (t, z) of the bridge path sampled at the block boundaries.");

  m.def("standardize", &ht::standardize, py::arg("statistic"), py::arg("n"));
  m.def("critical_band", &ht::critical_band, py::arg("n"), py::arg("q"));
  m.def(
      "evaluate",
      [](double statistic, std::size_t n, std::size_t sample_size, double q) {
        return result_dict(ht::evaluate({statistic, n, sample_size}, q));
      },
      py::arg("statistic"), py::arg("n"), py::arg("m"), py::arg("q") = 0.05);
  m.def(
      "run_test",
      [](const Array& x, std::size_t n, double q) {
        return result_dict(ht::run_test(view(x), {n, q}));
      },
      py::arg("x"), py::arg("n") = 100, py::arg("q") = 0.05);

  m.def(
      "run_experiment",
      [](const std::string& dist, std::vector<std::size_t> ms, std::vector<std::size_t> ns,
         std::vector<double> qs, std::size_t scenarios, std::uint64_t seed, unsigned workers) {
        const auto spec = make_spec(dist, std::move(ms), std::move(ns), std::move(qs), scenarios, seed);
        std::vector<ht::CellResult> cells;
        {
          py::gil_scoped_release release;
          cells = ht::run_experiment(spec, {workers});
        }
        py::list out;
        for (const auto& c : cells) out.append(cell_dict(c));
        return out;
      },
      py::arg("dist"), py::arg("m"), py::arg("n"), py::arg("q"), py::arg("scenarios") = 2000,
      py::arg("seed") = 0, py::arg("workers") = 1);
  m.def(
      "report_csv",
      [](const std::string& dist, std::vector<std::size_t> ms, std::vector<std::size_t> ns,
         std::vector<double> qs, std::size_t scenarios, std::uint64_t seed, unsigned workers) {
        const auto spec = make_spec(dist, std::move(ms), std::move(ns), std::move(qs), scenarios, seed);
        std::ostringstream out;
        {
          py::gil_scoped_release release;
          ht::write_report_csv(out, spec, ht::run_experiment(spec, {workers}));
        }
        return out.str();
      },
      py::arg("dist"), py::arg("m"), py::arg("n"), py::arg("q"), py::arg("scenarios") = 2000,
      py::arg("seed") = 0, py::arg("workers") = 1);

  m.def(
      "err_confidence_interval",
      [](std::size_t rejections, std::size_t scenarios, double level) {
        ht::CellResult c;
        c.rejections = rejections;
        c.scenarios = scenarios;
        if (scenarios > 0) c.err = static_cast<double>(rejections) / static_cast<double>(scenarios);
        return ht::err_confidence_interval(c, level);
      },
      py::arg("rejections"), py::arg("scenarios"), py::arg("level") = 0.95);
  m.def(
      "type2_decay_fit",
      [](const std::vector<std::size_t>& ns, const std::vector<double>& type2) {
        if (ns.size() != type2.size()) throw ht::BadConfig("n and type2 differ in length");
        std::vector<ht::CellResult> cells(ns.size());
        for (std::size_t i = 0; i < ns.size(); ++i) {
          cells[i].n = ns[i];
          cells[i].type2 = type2[i];
          cells[i].err = 1.0 - type2[i];
        }
        const auto fit = ht::type2_decay_fit(cells);
        py::dict d;
        d["amplitude"] = fit.amplitude;
        d["rate"] = fit.rate;
        d["r_squared"] = fit.r_squared;
        d["points_used"] = fit.points_used;
        d["warnings"] = fit.warnings;
        return d;
      },
      py::arg("n"), py::arg("type2"), "Fit type2 ~ A exp(-rate n) by least squares on log(type2).");
  m.def(
      "ks_distance_standard_normal",
      [](const Array& x) { return ht::ks_distance_standard_normal(view(x)); }, py::arg("x"));
  m.def("heuristic_power_bound", &ht::heuristic_power_bound, py::arg("alpha"), py::arg("q"),
        py::arg("n"), py::arg("c"));
  m.def("heuristic_blocks_for_power", &ht::heuristic_blocks_for_power, py::arg("alpha"),
        py::arg("c"), py::arg("target"));
}
