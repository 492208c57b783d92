#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "davydov/config.hpp"
#include "davydov/ensemble.hpp"
#include "davydov/observables.hpp"

namespace py = pybind11;
using namespace davydov;

namespace {

py::array_t<double> matrix(const std::vector<std::vector<double>>& rows, std::size_t cols) {
  py::array_t<double> out({rows.size(), cols});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) v(i, j) = rows[i][j];
  return out;
}

py::array_t<double> vec(const std::vector<double>& x) { return py::array_t<double>(x.size(), x.data()); }

ConfigFile parse(const std::string& text, const std::vector<std::string>& overrides) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  if (is_manifest(doc)) doc = manifest_config(doc);
  return parse_config(apply_overrides(std::move(doc), overrides));
}

py::dict run(const std::string& text, const std::vector<std::string>& overrides, std::size_t threads,
             const std::string& out_dir) {
  const ConfigFile cfg = parse(text, overrides);
  const Setup setup = prepare(cfg.run);
  if (threads == 0) threads = default_threads();
  EnsembleAccumulator acc;
  RunOutputs outputs;
  {
    py::gil_scoped_release release;
    acc = run_ensemble(cfg.run, setup, EnsembleOptions{threads});
    outputs = compute_outputs(cfg, setup, acc);
    if (!out_dir.empty()) write_bundle(out_dir, cfg, outputs, acc, threads);
  }
  const std::size_t n = cfg.run.model.n_sites();
  py::dict d;
  d["times"] = vec(outputs.populations.times);
  d["populations"] = matrix(outputs.populations.values, n);
  d["temperature"] = matrix(outputs.temperature.kelvin, n);
  d["energy"] = vec(outputs.energy.column(0));
  d["phase_space"] = matrix(outputs.phase_space.values, outputs.phase_space_labels.size());
  d["phase_space_labels"] = outputs.phase_space_labels;
  d["trajectories"] = acc.count();
  d["failures"] = acc.failures().size();
  d["scatter_events"] = acc.scatter_events();
  d["config"] = cfg.document.dump();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Thermalized Davydov D2 ensemble dynamics";
  py::register_exception<Error>(m, "DavydovError", PyExc_ValueError);

  m.attr("__version__") = kProgramVersion;

  m.def("validate", [](const std::string& text, const std::vector<std::string>& overrides) {
          const ConfigFile cfg = parse(text, overrides);
          return py::make_tuple(cfg.document.dump(), physics_warnings(cfg));
        },
        py::arg("config_json"), py::arg("overrides") = std::vector<std::string>{},
        "Resolved config (JSON text) and physics warnings; raises DavydovError if invalid.");

  m.def("run", &run, py::arg("config_json"), py::arg("overrides") = std::vector<std::string>{},
        py::arg("threads") = 0, py::arg("out_dir") = std::string{},
        "Run an ensemble. Returns times, populations, temperature, energy and phase-space arrays.");

  m.def("bath_modes", [](const std::string& text) {
          const ConfigFile cfg = parse(text, {});
          const BathModes b = build_bath(cfg.run.bath, 1);
          std::vector<double> w_cm(b.size());
          for (std::size_t k = 0; k < b.size(); ++k) w_cm[k] = kUnits.to_wavenumber(b.omega[k]);
          return py::make_tuple(vec(w_cm), vec(b.g));
        },
        py::arg("config_json"), "Mode frequencies (cm^-1) and couplings of one site's bath.");

  m.def("exciton_basis", [](const std::vector<double>& epsilon_cm, const std::vector<std::vector<double>>& j_cm) {
          const std::size_t n = epsilon_cm.size();
          ExcitonModel model{epsilon_cm, RealMatrix(n, n)};
          if (j_cm.size() != n) throw Error("J must be N x N");
          for (std::size_t i = 0; i < n; ++i) {
            if (j_cm[i].size() != n) throw Error("J must be N x N");
            for (std::size_t k = 0; k < n; ++k) model.coupling_cm(i, k) = j_cm[i][k];
          }
          const EigenBasis b = diagonalize(model);
          std::vector<std::vector<double>> rows(n, std::vector<double>(n));
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t e = 0; e < n; ++e) rows[i][e] = b.vectors(i, e);
          return py::make_tuple(vec(b.energies_cm), matrix(rows, n));
        },
        py::arg("epsilon_cm"), py::arg("J_cm"), "Exciton energies (ascending) and eigenvectors as columns.");

  m.def("spectral_density", &spectral_density, py::arg("omega"), py::arg("s"), py::arg("omega_c"));
  m.def("recursion_time", [](double d) { return recursion_time(d); }, py::arg("delta_omega_cm"),
        "2 pi / delta_omega in ps.");
  m.def("occupancy", [](double omega_cm, double t) { return ThermalLaw{t}.occupancy(kUnits.to_angular(omega_cm)); },
        py::arg("omega_cm"), py::arg("temperature_K"));
  m.def("mode_temperature",
        [](double omega_cm, double kinetic_cm) {
          return mode_temperature(kUnits.to_angular(omega_cm), kUnits.to_angular(kinetic_cm));
        },
        py::arg("omega_cm"), py::arg("kinetic_cm"), "Invert the Bose occupancy for one mode, K.");
  m.def("trajectory_seed", &trajectory_seed, py::arg("master_seed"), py::arg("index"));
}
