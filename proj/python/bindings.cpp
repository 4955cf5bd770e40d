// SPDX-License-Identifier: MIT
// Python bindings. Physical fields travel as float64 arrays of shape (ncomp, n, n)
// in the grid's own point order; scalars may also be passed as (n, n).
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "convint/audit.hpp"
#include "convint/besov.hpp"
#include "convint/config.hpp"
#include "convint/iteration.hpp"
#include "convint/jets.hpp"
#include "convint/noise.hpp"
#include "convint/pipeline.hpp"
#include "convint/spectral.hpp"
#include "convint/threads.hpp"

namespace py = pybind11;
using namespace convint;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Field to_field(const Array& a, Rank rank) {
  const int nc = components(rank);
  if (!(a.ndim() == 3 && a.shape(0) == nc) && !(a.ndim() == 2 && nc == 1))
    throw py::value_error(std::string("expected shape (") + std::to_string(nc) + ", n, n) for a " + rank_name(rank));
  const py::ssize_t n = a.shape(a.ndim() - 1);
  if (a.shape(a.ndim() - 2) != n) throw py::value_error("fields live on square grids");
  if (!is_power_of_two(int(n))) throw py::value_error("grid size must be a power of two");
  return Field::from_physical(PeriodicGrid(int(n)), rank, std::span<const double>(a.data(), std::size_t(a.size())));
}

Array to_array(const Field& f) {
  const auto v = f.to_physical();
  Array out({py::ssize_t(f.ncomp()), py::ssize_t(f.n()), py::ssize_t(f.n())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict check_dict(const AuditCheck& c) {
  py::dict d;
  d["suite"] = c.suite;
  d["name"] = c.name;
  d["value"] = c.value;
  d["lo"] = c.lo;
  d["hi"] = c.hi;
  d["passed"] = c.pass;
  return d;
}

py::dict report_dict(const StepReport& r) {
  py::dict d;
  d["q"] = r.q;
  d["frames"] = r.frames;
  d["phoid_residual"] = r.phoid_residual;
  d["oscillation_residual"] = r.oscillation_residual;
  d["curl_form_residual"] = r.curl_form_residual;
  d["div_v2"] = r.div_v2;
  d["div_v1"] = r.div_v1;
  d["trace_R"] = r.trace_R;
  d["master_residual"] = r.master_residual;
  d["v1_residual"] = r.v1_residual;
  d["monotone_ok"] = r.monotone_ok;
  py::dict ledger;
  for (const auto& [k, v] : r.ledger) ledger[py::str(k)] = v;
  d["ledger"] = ledger;
  py::list checks;
  for (const auto& c : step_report_checks(r)) checks.append(check_dict(c));
  d["checks"] = checks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_convint, m) {
  m.doc() = "Convex integration lab for 2D stochastic Navier-Stokes";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Rank>(m, "Rank")
      .value("Scalar", Rank::Scalar)
      .value("Vector", Rank::Vector)
      .value("SymTensor", Rank::SymTensor)
      .value("Tensor", Rank::Tensor);
  m.def("worker_count", &worker_count);

  // spectral core
  m.def(
      "fft_forward",
      [](const Array& a) {
        const Field f = to_field(a, Rank::Scalar);
        py::array_t<cplx> out({py::ssize_t(f.n()), py::ssize_t(f.grid().half())});
        std::copy(f.comp(0), f.comp(0) + f.comp_size(), out.mutable_data());
        return out;
      },
      "mean-normalized r2c transform of an (n, n) array, shape (n, n/2 + 1)");
  m.def("derivative", [](const Array& a, Rank r, int axis, int order) { return to_array(derivative(to_field(a, r), axis, order)); },
        py::arg("f"), py::arg("rank"), py::arg("axis"), py::arg("order") = 1);
  m.def("laplacian", [](const Array& a, Rank r) { return to_array(laplacian(to_field(a, r))); });
  m.def("divergence", [](const Array& a, Rank r) { return to_array(divergence(to_field(a, r))); });
  m.def("helmholtz_project", [](const Array& v) { return to_array(helmholtz_project(to_field(v, Rank::Vector))); });
  m.def("antidivergence", [](const Array& v) { return to_array(antidivergence(to_field(v, Rank::Vector))); },
        "mean-free vector -> trace-free symmetric tensor (11, 12, 22) with divergence v");
  m.def("heat_apply", [](const Array& a, Rank r, double t) { return to_array(heat_apply(to_field(a, r), t)); });
  m.def("multiply", [](const Array& f, const Array& g) {
    return to_array(multiply(to_field(f, Rank::Scalar), to_field(g, Rank::Scalar)));
  });

  // besov
  m.def("lp_blocks", [](const Array& a) {
    py::list out;
    for (const auto& b : lp_blocks(to_field(a, Rank::Scalar))) out.append(to_array(b));
    return out;
  });
  m.def("paraproduct_split", [](const Array& f, const Array& g) {
    const auto s = paraproduct_split(to_field(f, Rank::Scalar), to_field(g, Rank::Scalar));
    return py::make_tuple(to_array(s.lower), to_array(s.resonant), to_array(s.upper));
  });
  m.def("besov_norm", [](const Array& a, double alpha, double p, double q) {
    return besov_norm(to_field(a, Rank::Scalar), {alpha, p, q});
  }, py::arg("f"), py::arg("alpha"), py::arg("p") = kInf, py::arg("q") = kInf);
  m.def("freq_project", [](const Array& a, double J, bool high) {
    return to_array(freq_project(to_field(a, Rank::Scalar), J, high ? FreqPart::High : FreqPart::Low));
  }, py::arg("f"), py::arg("J"), py::arg("high"));

  // noise
  m.def("stationary_variance", &stationary_variance, py::arg("fa"), py::arg("k1"), py::arg("k2"));
  m.def("ou_sample", [](int n, double fa, std::uint64_t seed, std::uint32_t stream) {
    NoiseParams p;
    p.fa = fa;
    p.seed = seed;
    p.validate();
    return to_array(ou_field(ou_init_stationary(PeriodicGrid(n), p, stream)));
  }, py::arg("n"), py::arg("fa"), py::arg("seed"), py::arg("stream") = 0,
     "divergence-free stationary OU sample, shape (2, n, n)");
  m.def("variance_check", [](double fa, int samples, std::uint64_t seed, int n, bool zero_noise) {
    const auto v = variance_check(fa, samples, seed, n, zero_noise);
    py::dict d;
    d["fa"] = v.fa;
    d["target"] = v.target;
    d["mean"] = v.mean;
    d["std_error"] = v.std_error;
    d["samples"] = v.samples;
    d["passed"] = v.pass;
    d["degenerate"] = v.degenerate;
    return d;
  }, py::arg("fa"), py::arg("samples") = 10000, py::arg("seed") = 2024, py::arg("n") = 16, py::arg("zero_noise") = false);

  // jets
  m.def("r_star", [] { return DirectionSet::default_set().r_star; });
  m.def("geometric_coefficients", [](const Sym2& R) { return geometric_coefficients(R, DirectionSet::default_set()); },
        "coefficients c_i with sum c_i xi_i (x) xi_i = R for R = (11, 12, 22) near Id");

  // configuration, iteration ledger, audits and runs
  py::class_<RunConfig>(m, "Config")
      .def(py::init<>())
      .def_static("load", [](const std::string& path) { return load_config(path); })
      .def("set", [](RunConfig& c, const std::string& k, const py::object& v) {
        apply_setting(c, k, py::str(v).cast<std::string>());
        return &c;
      }, py::return_value_policy::reference_internal)
      .def("validate", &RunConfig::validate, py::arg("pipeline") = true)
      .def("to_ini", [](const RunConfig& c) { return to_ini(c); })
      .def_readwrite("n", &RunConfig::n)
      .def_readwrite("dt", &RunConfig::dt)
      .def_readwrite("T", &RunConfig::T)
      .def_readwrite("steps", &RunConfig::steps)
      .def_readonly("paper_mode", &RunConfig::paper_mode);
  m.def("paper_validate", [](const RunConfig& c) {
    py::list out;
    for (const auto& ch : check_paper_params(c.step.iter)) out.append(py::make_tuple(ch.name, ch.ok, ch.detail));
    return out;
  }, "(name, ok, detail) per paper constraint of the configured iteration ledger");
  m.def("audit_suites", &audit_suites);
  m.def("run_audit", [](const std::string& suite, const RunConfig& c) {
    std::vector<AuditCheck> checks;
    {
      py::gil_scoped_release release;
      checks = run_audit(suite, c);
    }
    py::list out;
    for (const auto& ch : checks) out.append(check_dict(ch));
    return out;
  });
  m.def("run_pipeline", [](const RunConfig& c) {
    RunResult r;
    {
      py::gil_scoped_release release;
      r = run_pipeline(c);
    }
    py::dict d;
    d["initial_residual"] = r.initial_residual;
    py::list reports;
    for (const auto& rep : r.reports) reports.append(report_dict(rep));
    d["reports"] = reports;
    d["times"] = r.final_state.v2.times;
    d["v1"] = to_array(r.final_state.v1.frames.back());
    d["v2"] = to_array(r.final_state.v2.frames.back());
    d["R"] = to_array(r.final_state.R.frames.back());
    return d;
  }, "noise, v1 solve and the configured convex steps; fields are the last frame");
}
