// Copyright 2026 The tqb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tqb/analysis.hpp"
#include "tqb/collision.hpp"
#include "tqb/convergence.hpp"
#include "tqb/errors.hpp"
#include "tqb/manifest.hpp"
#include "tqb/observables.hpp"
#include "tqb/sweep.hpp"
#include "tqb/transmon.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace tqb;

namespace {

py::dict trajectory_dict(const Trajectory& t) {
  const std::size_t n = t.points.size();
  py::array_t<long> idx(n);
  py::array_t<double> energy(n), stored(n), erg(n), eff(n), purity(n);
  auto i = idx.mutable_unchecked<1>();
  auto e = energy.mutable_unchecked<1>();
  auto s = stored.mutable_unchecked<1>();
  auto g = erg.mutable_unchecked<1>();
  auto f = eff.mutable_unchecked<1>();
  auto p = purity.mutable_unchecked<1>();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& pt = t.points[k];
    const auto kk = static_cast<py::ssize_t>(k);
    i(kk) = pt.n;
    e(kk) = pt.energy;
    s(kk) = pt.stored_energy;
    g(kk) = pt.ergotropy;
    f(kk) = pt.efficiency ? *pt.efficiency : std::nan("");
    p(kk) = pt.purity;
  }
  py::dict d;
  d["n"] = idx;
  d["energy"] = energy;
  d["stored_energy"] = stored;
  d["ergotropy"] = erg;
  d["efficiency"] = eff;
  d["purity"] = purity;
  d["e_f"] = t.e_f;
  d["delta"] = t.delta;
  return d;
}

Series series_from(const std::vector<double>& n, const std::vector<double>& y) {
  if (n.size() != y.size()) throw ShapeError("n and y differ in length");
  return Series{n, y};
}

std::vector<ScalingPoint> points_from(const std::vector<double>& g, const std::vector<double>& q,
                                      const std::vector<double>& v) {
  if (g.size() != q.size() || g.size() != v.size()) throw ShapeError("g, q and values differ in length");
  std::vector<ScalingPoint> pts;
  for (std::size_t i = 0; i < g.size(); ++i) pts.push_back({g[i], q[i], v[i]});
  return pts;
}

py::dict scaling_dict(const ScalingFit& f) {
  py::dict d;
  for (const auto& [k, v] : f.params) d[py::str(k)] = v;
  d["covariance"] = f.covariance;
  d["residual_rms"] = f.residual_rms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tqb, m) {
  m.doc() = "Transmon quantum battery charged by repeated collisions";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
  py::register_exception<ShapeMismatchError>(m, "ShapeMismatchError", base.ptr());
  py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError", base.ptr());

  py::class_<TransmonSpec>(m, "TransmonSpec")
      .def(py::init([](double r, double ng, int cutoff, int levels) {
             TransmonSpec s{r, ng, cutoff, levels};
             s.validate();
             return s;
           }),
           py::arg("ej_over_ec") = 100.0, py::arg("ng") = 0.0, py::arg("charge_cutoff") = 35,
           py::arg("battery_levels") = 15)
      .def_readwrite("ej_over_ec", &TransmonSpec::ej_over_ec)
      .def_readwrite("ng", &TransmonSpec::ng)
      .def_readwrite("charge_cutoff", &TransmonSpec::charge_cutoff)
      .def_readwrite("battery_levels", &TransmonSpec::battery_levels)
      .def_property_readonly("plasma_frequency", &TransmonSpec::plasma_frequency);

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("levels", &Spectrum::levels)
      .def_readonly("all_levels", &Spectrum::all_levels)
      .def_readonly("charge_matrix", &Spectrum::charge_matrix)
      .def_readonly("bound_count", &Spectrum::bound_count)
      .def_readonly("e_f", &Spectrum::e_f)
      .def_readonly("converged", &Spectrum::converged)
      .def_readonly("convergence_shift", &Spectrum::convergence_shift)
      .def_property_readonly("ground_energy", &Spectrum::ground_energy)
      .def("shifted_levels", &Spectrum::shifted_levels);

  m.def("solve_spectrum", &solve_spectrum, py::arg("spec") = TransmonSpec{},
        py::arg("require_convergence") = true);
  m.def("perturbative_level", &perturbative_level, py::arg("spec"), py::arg("m"));
  m.def("charge_matrix_element", &charge_matrix_element, py::arg("spectrum"), py::arg("m"), py::arg("mp"));

  m.def(
      "ancilla_state",
      [](double q, double c) { return ancilla_state(AncillaSpec{0.0, q, c}).matrix(); }, py::arg("q"),
      py::arg("c"), "2x2 ancilla density matrix, basis (|1>, |0>)");

  m.def(
      "ergotropy",
      [](const CMatrix& rho, const std::vector<double>& levels) {
        const ErgotropyResult r = ergotropy(rho, levels);
        py::dict d;
        d["ergotropy"] = r.ergotropy;
        d["energy"] = r.energy;
        d["passive_energy"] = r.passive_energy;
        d["populations"] = r.populations;
        return d;
      },
      py::arg("rho"), py::arg("levels"));
  m.def(
      "stored_energy", [](const CMatrix& rho, const std::vector<double>& levels) { return stored_energy(rho, levels); },
      py::arg("rho"), py::arg("levels"));

  m.def(
      "run_protocol",
      [](const TransmonSpec& spec, double g, double tau, double q, double c, long n, long record_every,
         const std::string& frame, const std::string& reference) {
        ProtocolConfig cfg;
        cfg.transmon = spec;
        cfg.coupling_g = g;
        cfg.tau = tau;
        cfg.q = q;
        cfg.c = c;
        cfg.n_collisions = n;
        cfg.record_every = record_every;
        cfg.frame = frame_from_string(frame);
        cfg.energy_reference = energy_reference_from_string(reference);
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = run_protocol(cfg);
        }
        return trajectory_dict(t);
      },
      py::arg("spec") = TransmonSpec{}, py::arg("g") = 4e-3, py::arg("tau") = 1.0, py::arg("q") = 0.5,
      py::arg("c") = 1.0, py::arg("n_collisions") = 1000, py::arg("record_every") = 1,
      py::arg("frame") = "interaction", py::arg("energy_reference") = "ground");

  m.def(
      "fit_damped_cosine",
      [](const std::vector<double>& n, const std::vector<double>& y, double first, double last, bool free) {
        const DampedCosineFit f = fit_damped_cosine(series_from(n, y), Window{first, last}, free);
        py::dict d;
        d["omega"] = f.omega;
        d["gamma"] = f.gamma;
        d["amplitude_scale"] = f.amplitude_scale;
        d["oscillation_amplitude"] = f.oscillation_amplitude;
        d["residual_rms"] = f.residual_rms;
        d["converged"] = f.converged;
        return d;
      },
      py::arg("n"), py::arg("y"), py::arg("first") = 0.0, py::arg("last") = 1e300,
      py::arg("free_amplitude") = false);
  m.def(
      "fit_saturation",
      [](const std::vector<double>& n, const std::vector<double>& y, double first, double last) {
        const SaturationFit f = fit_saturation(series_from(n, y), Window{first, last});
        py::dict d;
        d["f"] = f.f;
        d["gamma"] = f.gamma;
        d["residual_rms"] = f.residual_rms;
        d["converged"] = f.converged;
        return d;
      },
      py::arg("n"), py::arg("y"), py::arg("first") = 0.0, py::arg("last") = 1e300);
  m.def(
      "fit_frequency_scaling",
      [](const std::vector<double>& g, const std::vector<double>& q, const std::vector<double>& omega) {
        return scaling_dict(fit_frequency_scaling(points_from(g, q, omega)));
      },
      py::arg("g"), py::arg("q"), py::arg("omega"));
  m.def(
      "fit_damping_shape",
      [](const std::vector<double>& g, const std::vector<double>& q, const std::vector<double>& gamma) {
        return scaling_dict(fit_damping_shape(points_from(g, q, gamma)));
      },
      py::arg("g"), py::arg("q"), py::arg("gamma"));
  m.def(
      "classify_shape",
      [](const std::vector<double>& n, const std::vector<double>& y) {
        return classify_shape(series_from(n, y)) == Shape::oscillatory ? "oscillatory" : "saturating";
      },
      py::arg("n"), py::arg("y"));
  m.def("feasibility_coupling", py::overload_cast<double, double, double, double>(&feasibility_coupling),
        py::arg("c_bn"), py::arg("c_n"), py::arg("c_b"), py::arg("n10"));

  m.def(
      "parse_manifest",
      [](const std::string& text) {
        const RunManifest mf = parse_manifest_text(text);
        py::dict d;
        d["product_size"] = mf.product_size();
        d["canonical"] = serialize_manifest(mf);
        return d;
      },
      py::arg("text"));
  m.def(
      "run_sweep",
      [](const std::string& text, const std::string& output_dir, int threads) {
        RunManifest mf = parse_manifest_text(text);
        mf.output_dir = output_dir;
        mf.threads = threads;
        SweepSummary s;
        {
          py::gil_scoped_release release;
          s = run_sweep(mf);
        }
        py::dict d;
        d["index"] = s.index_path;
        d["failed"] = s.failed;
        d["product_size"] = s.product_size;
        return d;
      },
      py::arg("manifest_text"), py::arg("output_dir"), py::arg("threads") = 1);
}
