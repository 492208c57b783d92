#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "davydov/accumulator.hpp"
#include "davydov/ensemble.hpp"
#include "davydov/observables.hpp"

namespace davydov {

inline constexpr const char* kProgramVersion = "0.1.0";

/// A mode whose phase-space mean is written to phasespace.csv.
struct PhaseSpaceProbe {
  std::size_t site = 0;
  double omega_cm = 100.0;
};

struct OutputOptions {
  double window_fs = 50.0;
  std::vector<PhaseSpaceProbe> phase_space;
};

/// Parsed run-configuration document.
struct ConfigFile {
  RunConfig run;
  OutputOptions output;
  nlohmann::json document;  // resolved document, all defaults filled in
};

/// Strict parse: unknown keys, missing required keys, wrong types and
/// inconsistent physics all throw Error naming the offending key.
ConfigFile parse_config(const nlohmann::json& doc);
ConfigFile load_config(const std::filesystem::path& path);

/// Applies "section.key=value" overrides; the value is parsed as JSON when
/// possible, otherwise taken as a string. Unknown keys throw.
nlohmann::json apply_overrides(nlohmann::json doc, const std::vector<std::string>& overrides);

/// Physics warnings that do not prevent a run: degraded Poisson limit and a
/// bath recursion time shorter than t_total without thermalization.
std::vector<std::string> physics_warnings(const ConfigFile& config);

/// Manifest documents wrap a resolved config; returns the inner config.
bool is_manifest(const nlohmann::json& doc);
nlohmann::json manifest_config(const nlohmann::json& manifest);

/// Observables derived from a finished ensemble.
struct RunOutputs {
  TimeSeries populations;      // exciton populations, ascending energy
  TemperatureEstimate temperature;
  TimeSeries phase_space;      // {x, p} per probe, flattened
  std::vector<std::string> phase_space_labels;
  TimeSeries energy;
};

RunOutputs compute_outputs(const ConfigFile& config, const Setup& setup, const EnsembleAccumulator& acc);

/// Writes populations.csv, temperature.csv, phasespace.csv, energy.csv and
/// run_manifest.json into `dir` (created if needed).
void write_bundle(const std::filesystem::path& dir, const ConfigFile& config, const RunOutputs& outputs,
                  const EnsembleAccumulator& acc, std::size_t threads);

/// CSV with a header row, LF endings and 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<double>& times, const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // includes the time column
};
CsvTable read_csv(const std::filesystem::path& path);

} // namespace davydov
