#pragma once

// Scenario files: versioned YAML describing one model run.
//
//   schema: 1
//   model: {name: quantum_thermo, params: {E1: 1.0}}
//   scheme: {name: discrete_gradient, dg_kind: gonzalez, tau: 0.1}
//   regularization: {epsilon: 1.0e-3}        # optional
//   time: {t0: 0, t_end: 100}
//   initial_state: {preset: default, S0: 0.3} # or {z1: [...], z2: [...], z3: [...]}
//   outputs: {trajectory_csv: traj.csv, audit_csv: audit.csv, report_json: report.json}

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "phdae/integrators.hpp"
#include "phdae/models.hpp"

namespace phdae::cli {

/// Malformed or inconsistent scenario; the message names the field and,
/// when known, the line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct OutputFiles {
  std::optional<std::string> trajectory_csv;
  std::optional<std::string> audit_csv;
  std::optional<std::string> report_json;
};

struct Scenario {
  std::filesystem::path source;
  std::string model_name;
  SchemeConfig scheme;
  std::optional<double> epsilon;
  double t0 = 0.0;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  OutputFiles outputs;

  /// The system that is integrated (regularized when requested).
  SystemSpec spec;
  /// spec before regularization.
  SystemSpec original;
  /// Initial state of `spec`.
  State initial;
  /// Set for quantum_thermo so reports can include model constants.
  std::optional<QuantumThermoParams> quantum;
};

/// Parses and builds everything. `seed_override` replaces the file's seed.
/// Throws ConfigError for bad input and passes model ValidationError through.
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Maps a state of `s.spec` back to the coordinates of `s.original`.
State to_original(const Scenario& s, const State& state);

}  // namespace phdae::cli
