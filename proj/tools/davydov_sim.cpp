// davydov-sim: command-line front end for thermalized D2 ensemble runs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "davydov/config.hpp"
#include "davydov/ensemble.hpp"

namespace fs = std::filesystem;
using namespace davydov;

namespace {

ConfigFile resolve(const std::string& path, const std::vector<std::string>& overrides, nlohmann::json* manifest) {
  std::ifstream is(path);
  if (!is) throw Error("config: cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("config: " + path + " is not valid JSON: " + e.what());
  }
  if (is_manifest(doc)) {
    if (manifest) *manifest = doc;
    doc = manifest_config(doc);
  }
  return parse_config(apply_overrides(std::move(doc), overrides));
}

void report_warnings(const ConfigFile& cfg) {
  for (const auto& w : physics_warnings(cfg)) std::cerr << "warning: " << w << '\n';
}

void dump_trajectory(const fs::path& dir, const EnsembleAccumulator& shape, std::uint64_t index,
                     const TrajectoryMoments& m) {
  const auto& l = m.layout;
  std::vector<std::string> header{"t_ps"};
  for (std::size_t i = 0; i < l.n_sites; ++i) header.push_back("pop_site_" + std::to_string(i + 1));
  header.push_back("E_total_cm");
  std::vector<std::vector<double>> rows;
  for (std::size_t s = 0; s < m.n_snapshots; ++s) {
    const double* r = m.row(s);
    std::vector<double> row;
    for (std::size_t i = 0; i < l.n_sites; ++i) row.push_back(r[l.coherence() + 2 * (i * l.n_sites + i)]);
    row.push_back(r[l.energy()]);
    rows.push_back(std::move(row));
  }
  std::ostringstream name;
  name << "traj_" << std::setw(6) << std::setfill('0') << index << ".csv";
  write_csv(dir / name.str(), header, shape.times(), rows);
}

int cmd_validate(const std::string& config_path, const std::vector<std::string>& overrides) {
  const ConfigFile cfg = resolve(config_path, overrides, nullptr);
  report_warnings(cfg);
  std::cout << "ok: " << cfg.run.model.n_sites() << " site(s), " << cfg.run.bath.modes_per_site
            << " mode(s) per site, " << cfg.run.n_trajectories << " trajectories, "
            << cfg.run.n_snapshots() << " snapshots\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const std::vector<std::string>& overrides,
            std::size_t threads, bool dump, const std::string& checkpoint, const std::string& resume) {
  nlohmann::json manifest;
  const ConfigFile cfg = resolve(config_path, overrides, &manifest);
  report_warnings(cfg);
  if (threads == 0 && manifest.contains("threads")) threads = manifest.at("threads").get<std::size_t>();
  if (threads == 0) threads = default_threads();

  const Setup setup = prepare(cfg.run);
  const fs::path out(out_dir);
  fs::create_directories(out);

  EnsembleOptions options;
  options.threads = threads;
  std::optional<EnsembleAccumulator> previous;
  if (!resume.empty()) {
    previous = EnsembleAccumulator::load(resume);
    options.first = previous->count() + previous->failures().size();
    if (options.first > cfg.run.n_trajectories) throw Error("resume: checkpoint holds more trajectories than run.trajectories");
  }
  EnsembleAccumulator shape(MomentLayout{cfg.run.model.n_sites(), cfg.run.bath.modes_per_site},
                            cfg.run.snapshot_times());
  if (dump) {
    fs::create_directories(out / "trajectories");
    options.observer = [&](std::uint64_t i, const TrajectoryMoments& m) {
      dump_trajectory(out / "trajectories", shape, i, m);
    };
  }

  EnsembleAccumulator acc = run_ensemble(cfg.run, setup, options);
  if (previous) {
    previous->merge(acc);
    acc = std::move(*previous);
  }
  if (!checkpoint.empty()) acc.save(checkpoint);

  const RunOutputs outputs = compute_outputs(cfg, setup, acc);
  write_bundle(out, cfg, outputs, acc, threads);
  std::cout << "wrote " << out.string() << ": " << acc.count() << " trajectories, " << acc.failures().size()
            << " failed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermalized Davydov D2 ensemble dynamics"};
  app.set_version_flag("--version", std::string(kProgramVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", checkpoint, resume;
  std::vector<std::string> overrides;
  std::size_t threads = 0;
  bool dump = false;

  auto* run = app.add_subcommand("run", "Run an ensemble and write the CSV bundle");
  run->add_option("--config", config_path, "Run configuration (JSON) or a run_manifest.json")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--override", overrides, "section.key=value (repeatable)");
  run->add_option("--threads", threads, "Worker threads (default: DAVYDOV_THREADS or all cores)");
  run->add_flag("--dump-trajectories", dump, "Write per-trajectory CSVs (debug)");
  run->add_option("--checkpoint", checkpoint, "Write the ensemble accumulator to this file");
  run->add_option("--resume", resume, "Continue from an accumulator checkpoint");

  auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
  validate->add_option("--config", config_path, "Run configuration (JSON)")->required();
  validate->add_option("--override", overrides, "section.key=value (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, overrides, threads, dump, checkpoint, resume);
    if (validate->parsed()) return cmd_validate(config_path, overrides);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
