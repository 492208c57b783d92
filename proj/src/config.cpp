#include "davydov/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace davydov {

using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"epsilon_cm", "J_cm"}},
      {"bath", {"Q", "omega0_cm", "delta_omega_cm", "s", "omega_c_cm", "lambda_reorg_cm"}},
      {"thermal", {"T0_K", "T_inf_K", "nu_per_ps", "tau_ps", "enabled"}},
      {"run", {"dt_fs", "t_total_ps", "snapshot_fs", "trajectories", "master_seed"}},
      {"excitation", {"kind", "index"}},
      {"output", {"window_fs", "phase_space"}},
  };
  return s;
}

const std::set<std::string> kRequiredSections = {"model", "bath", "thermal", "run", "excitation"};

[[noreturn]] void fail(const std::string& key, const std::string& why) { throw Error(key + ": " + why); }

const json& require(const json& section, const std::string& name, const std::string& key) {
  if (!section.contains(key)) fail(name + "." + key, "missing required key");
  return section.at(key);
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

std::uint64_t count(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(key, "expected a non-negative integer");
}

double number_or(const json& section, const std::string& name, const std::string& key, double fallback) {
  return section.contains(key) ? number(section.at(key), name + "." + key) : fallback;
}

std::size_t steps_of(double duration_ps, double dt_ps, const std::string& key) {
  return steps_in(duration_ps, dt_ps, key.c_str());
}

}  // namespace

ConfigFile parse_config(const json& doc_in) {
  if (!doc_in.is_object()) throw Error("config: top level must be a JSON object");
  for (const auto& [section, value] : doc_in.items()) {
    const auto it = schema().find(section);
    if (it == schema().end()) fail(section, "unknown section");
    if (!value.is_object()) fail(section, "expected an object");
    for (const auto& [key, unused] : value.items()) {
      if (!it->second.contains(key)) fail(section + "." + key, "unknown key");
    }
  }
  for (const auto& s : kRequiredSections) {
    if (!doc_in.contains(s)) fail(s, "missing required section");
  }

  ConfigFile cfg;
  RunConfig& rc = cfg.run;

  // model
  const json& model = doc_in.at("model");
  const json& eps = require(model, "model", "epsilon_cm");
  if (!eps.is_array() || eps.empty()) fail("model.epsilon_cm", "expected a non-empty array");
  for (const auto& e : eps) rc.model.epsilon_cm.push_back(number(e, "model.epsilon_cm"));
  const std::size_t n = rc.model.n_sites();
  const json& jm = require(model, "model", "J_cm");
  if (!jm.is_array() || jm.size() != n) fail("model.J_cm", "expected an N x N array");
  rc.model.coupling_cm = RealMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!jm[i].is_array() || jm[i].size() != n) fail("model.J_cm", "expected an N x N array");
    for (std::size_t j = 0; j < n; ++j) rc.model.coupling_cm(i, j) = number(jm[i][j], "model.J_cm");
  }
  try {
    rc.model.validate();
  } catch (const Error& e) {
    fail("model.J_cm", e.what());
  }

  // bath
  const json& bath = doc_in.at("bath");
  rc.bath.modes_per_site = count(require(bath, "bath", "Q"), "bath.Q");
  rc.bath.omega0_cm = number(require(bath, "bath", "omega0_cm"), "bath.omega0_cm");
  rc.bath.delta_omega_cm = number(require(bath, "bath", "delta_omega_cm"), "bath.delta_omega_cm");
  rc.bath.ohmicity = number_or(bath, "bath", "s", 2.0);
  rc.bath.omega_c_cm = number(require(bath, "bath", "omega_c_cm"), "bath.omega_c_cm");
  rc.bath.reorganization_cm = number(require(bath, "bath", "lambda_reorg_cm"), "bath.lambda_reorg_cm");
  rc.bath.validate();

  // thermal
  const json& thermal = doc_in.at("thermal");
  const json& t0 = require(thermal, "thermal", "T0_K");
  if (t0.is_array()) {
    if (t0.size() != n) fail("thermal.T0_K", "expected one temperature per site");
    for (const auto& t : t0) rc.initial.push_back({number(t, "thermal.T0_K")});
  } else {
    rc.initial.assign(n, ThermalLaw{number(t0, "thermal.T0_K")});
  }
  for (const auto& law : rc.initial) {
    if (law.temperature_K < 0.0) fail("thermal.T0_K", "must be >= 0");
  }
  rc.thermalization.t_inf = number(require(thermal, "thermal", "T_inf_K"), "thermal.T_inf_K");
  rc.thermalization.nu = number(require(thermal, "thermal", "nu_per_ps"), "thermal.nu_per_ps");
  rc.thermalization.tau = number(require(thermal, "thermal", "tau_ps"), "thermal.tau_ps");
  if (thermal.contains("enabled")) {
    if (!thermal.at("enabled").is_boolean()) fail("thermal.enabled", "expected a boolean");
    rc.thermalize = thermal.at("enabled").get<bool>();
  }
  rc.thermalization.validate();

  // run
  const json& run = doc_in.at("run");
  const double dt_fs = number(require(run, "run", "dt_fs"), "run.dt_fs");
  if (!(dt_fs > 0.0)) fail("run.dt_fs", "must be > 0");
  rc.integrator.dt = dt_fs * 1e-3;
  rc.integrator.t_total = number(require(run, "run", "t_total_ps"), "run.t_total_ps");
  if (!(rc.integrator.t_total >= rc.integrator.dt)) fail("run.t_total_ps", "must be at least one step");
  steps_of(rc.integrator.t_total, rc.integrator.dt, "run.t_total_ps");
  const double snap_fs = number_or(run, "run", "snapshot_fs", 10.0);
  rc.integrator.record_stride = steps_of(snap_fs * 1e-3, rc.integrator.dt, "run.snapshot_fs");
  if (rc.integrator.record_stride == 0) fail("run.snapshot_fs", "must be at least one step");
  rc.n_trajectories = count(require(run, "run", "trajectories"), "run.trajectories");
  if (rc.n_trajectories < 1) fail("run.trajectories", "must be >= 1");
  rc.master_seed = run.contains("master_seed") ? count(run.at("master_seed"), "run.master_seed") : 0;

  if (rc.thermalize) steps_of(rc.thermalization.tau, rc.integrator.dt, "thermal.tau_ps");

  // excitation
  const json& exc = doc_in.at("excitation");
  const json& kind = require(exc, "excitation", "kind");
  if (!kind.is_string()) fail("excitation.kind", "expected \"site\" or \"exciton\"");
  if (kind == "site") {
    rc.excitation.kind = Excitation::Kind::Site;
  } else if (kind == "exciton") {
    rc.excitation.kind = Excitation::Kind::Exciton;
  } else {
    fail("excitation.kind", "expected \"site\" or \"exciton\"");
  }
  rc.excitation.index = count(require(exc, "excitation", "index"), "excitation.index");
  if (rc.excitation.index >= n) fail("excitation.index", "out of range");

  // output
  if (doc_in.contains("output")) {
    const json& out = doc_in.at("output");
    cfg.output.window_fs = number_or(out, "output", "window_fs", cfg.output.window_fs);
    if (out.contains("phase_space")) {
      const json& probes = out.at("phase_space");
      if (!probes.is_array()) fail("output.phase_space", "expected an array");
      for (const auto& p : probes) {
        if (!p.is_object()) fail("output.phase_space", "expected objects {site, omega_cm}");
        for (const auto& [key, unused] : p.items()) {
          if (key != "site" && key != "omega_cm") fail("output.phase_space." + key, "unknown key");
        }
        PhaseSpaceProbe probe;
        probe.site = count(require(p, "output.phase_space", "site"), "output.phase_space.site");
        probe.omega_cm = number(require(p, "output.phase_space", "omega_cm"), "output.phase_space.omega_cm");
        if (probe.site >= n) fail("output.phase_space.site", "out of range");
        cfg.output.phase_space.push_back(probe);
      }
    }
  }

  if (!(cfg.output.window_fs >= snap_fs * (1.0 - 1e-9))) {
    fail("output.window_fs", "must be at least the snapshot interval");
  }

  rc.validate();

  // Resolved document with every default made explicit.
  json& d = cfg.document;
  d["model"]["epsilon_cm"] = rc.model.epsilon_cm;
  d["model"]["J_cm"] = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = rc.model.coupling_cm(i, j);
    d["model"]["J_cm"].push_back(row);
  }
  d["bath"] = {{"Q", rc.bath.modes_per_site},        {"omega0_cm", rc.bath.omega0_cm},
               {"delta_omega_cm", rc.bath.delta_omega_cm}, {"s", rc.bath.ohmicity},
               {"omega_c_cm", rc.bath.omega_c_cm},    {"lambda_reorg_cm", rc.bath.reorganization_cm}};
  std::vector<double> temps;
  for (const auto& law : rc.initial) temps.push_back(law.temperature_K);
  d["thermal"] = {{"T0_K", temps},
                  {"T_inf_K", rc.thermalization.t_inf},
                  {"nu_per_ps", rc.thermalization.nu},
                  {"tau_ps", rc.thermalization.tau},
                  {"enabled", rc.thermalize}};
  d["run"] = {{"dt_fs", dt_fs},
              {"t_total_ps", rc.integrator.t_total},
              {"snapshot_fs", snap_fs},
              {"trajectories", rc.n_trajectories},
              {"master_seed", rc.master_seed}};
  d["excitation"] = {{"kind", kind}, {"index", rc.excitation.index}};
  json probes = json::array();
  for (const auto& p : cfg.output.phase_space) probes.push_back({{"site", p.site}, {"omega_cm", p.omega_cm}});
  d["output"] = {{"window_fs", cfg.output.window_fs}, {"phase_space", probes}};
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw Error("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  if (is_manifest(doc)) doc = manifest_config(doc);
  return parse_config(doc);
}

json apply_overrides(json doc, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw Error("override '" + ov + "': expected section.key=value");
    const std::string path = ov.substr(0, eq);
    const std::string text = ov.substr(eq + 1);
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw Error("override '" + ov + "': expected section.key=value");
    const std::string section = path.substr(0, dot);
    const std::string key = path.substr(dot + 1);
    const auto it = schema().find(section);
    if (it == schema().end() || !it->second.contains(key)) fail(path, "unknown key");
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    doc[section][key] = value;
  }
  return doc;
}

std::vector<std::string> physics_warnings(const ConfigFile& config) {
  const RunConfig& rc = config.run;
  std::vector<std::string> out;
  if (rc.thermalize) {
    for (auto& w : rc.thermalization.warnings()) out.push_back(std::move(w));
  }
  const bool no_scattering = !rc.thermalize || rc.thermalization.nu == 0.0;
  const double t_rec = recursion_time(rc.bath.delta_omega_cm);
  if (no_scattering && t_rec < rc.integrator.t_total) {
    std::ostringstream os;
    os << std::setprecision(3) << "bath recursion time " << t_rec << " ps < t_total " << rc.integrator.t_total
       << " ps without thermalization; dynamics past recursion are discretization artifacts";
    out.push_back(os.str());
  }
  return out;
}

bool is_manifest(const json& doc) { return doc.is_object() && doc.contains("manifest_version"); }

json manifest_config(const json& manifest) {
  if (!manifest.contains("config")) throw Error("manifest: missing 'config'");
  return manifest.at("config");
}

RunOutputs compute_outputs(const ConfigFile& config, const Setup& setup, const EnsembleAccumulator& acc) {
  RunOutputs out;
  const BathModes& bath = setup.hamiltonian.bath;
  out.populations = exciton_populations(acc, setup.basis);
  out.temperature = bath_temperature(acc, bath, config.output.window_fs * 1e-3);
  out.energy = mean_energy(acc);

  out.phase_space.times = acc.times();
  out.phase_space.n_trajectories = acc.count();
  out.phase_space.values.assign(acc.n_snapshots(), {});
  for (const auto& probe : config.output.phase_space) {
    const std::size_t q = bath.nearest_mode(probe.site, probe.omega_cm);
    const auto series = phase_space_mean(acc, probe.site, q);
    for (std::size_t s = 0; s < series.size(); ++s) {
      out.phase_space.values[s].push_back(series.values[s][0]);
      out.phase_space.values[s].push_back(series.values[s][1]);
    }
    std::ostringstream label;
    label << "site" << probe.site + 1 << "_mode" << q + 1;
    out.phase_space_labels.push_back("x_mean_" + label.str());
    out.phase_space_labels.push_back("p_mean_" + label.str());
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<double>& times, const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  for (std::size_t s = 0; s < times.size(); ++s) {
    os << times[s];
    for (double v : rows[s]) os << ',' << v;
    os << '\n';
  }
  if (!os) throw Error("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw Error("empty CSV: " + path.string());
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) table.header.push_back(cell);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_bundle(const std::filesystem::path& dir, const ConfigFile& config, const RunOutputs& outputs,
                  const EnsembleAccumulator& acc, std::size_t threads) {
  std::filesystem::create_directories(dir);
  const std::size_t n = config.run.model.n_sites();

  std::vector<std::string> header{"t_ps"};
  for (std::size_t e = 0; e < n; ++e) header.push_back("rho_exc_" + std::to_string(e + 1));
  write_csv(dir / "populations.csv", header, outputs.populations.times, outputs.populations.values);

  header = {"t_ps"};
  for (std::size_t m = 0; m < n; ++m) header.push_back("T_site_" + std::to_string(m + 1) + "_K");
  write_csv(dir / "temperature.csv", header, outputs.temperature.times, outputs.temperature.kelvin);

  header = {"t_ps"};
  header.insert(header.end(), outputs.phase_space_labels.begin(), outputs.phase_space_labels.end());
  write_csv(dir / "phasespace.csv", header, outputs.phase_space.times, outputs.phase_space.values);

  write_csv(dir / "energy.csv", {"t_ps", "E_total_cm"}, outputs.energy.times, outputs.energy.values);

  json manifest;
  manifest["manifest_version"] = 1;
  manifest["program"] = "davydov-sim";
  manifest["version"] = kProgramVersion;
  manifest["config"] = config.document;
  manifest["threads"] = threads;
  manifest["trajectories_completed"] = acc.count();
  manifest["failures"] = acc.failures().size();
  manifest["scatter_events"] = acc.scatter_events();
  json failures = json::array();
  for (const auto& f : acc.failures()) {
    failures.push_back({{"index", f.index}, {"seed", f.seed}, {"t_ps", f.time}, {"message", f.message}});
  }
  manifest["failure_log"] = failures;
  std::ofstream os(dir / "run_manifest.json", std::ios::binary);
  if (!os) throw Error("cannot write run_manifest.json");
  os << manifest.dump(2) << '\n';
}

} // namespace davydov
