#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "becmirror.h"

namespace bmcli {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExperimentConfig {
  std::string initial_state = "cat";  // vacuum | coherent | thermal | cat
  double alpha = 2.0;
  double nbar = 0.0;
  int grid_points = 256;
  double grid_span = 8.0;
  bool noise_enabled = true;
  bool noise_symmetrized = true;      // d_eff = d_chi / 2 when true
  std::string match_free_parameter = "none";
  double match_bracket_lo = 0.0;
  double match_bracket_hi = 0.0;
  uint64_t seed = 0;
};

struct SweepConfig {
  bool present = false;
  std::string parameter;              // config key name, e.g. detuning_c_in_units_of_kappa
  std::vector<double> values;
  bool optimize = false;
};

struct FullModelConfig {
  double t_end_s = 0.0;
  double tol = 1e-9;
  long long samples = 512;
  double damping = 0.0;
};

struct OracleConfig {
  int dim = 30;
  int grid_points = 256;
  double span = 8.0;
  double alpha = 2.0;
  long long paths = 2000;
  uint64_t seed = 2024;
  double tolerance_scale = 1.0;
};

struct RunConfig {
  bm_physical_params physical{};
  ExperimentConfig experiment;
  SweepConfig sweep;
  FullModelConfig full_model;
  OracleConfig oracle;
  std::string output_dir = "out";
  std::vector<std::string> missing_required;  // filled by parse_config
};

/// Key = value parser for a TOML-compatible subset: scalars, strings and one
/// level of [tables]. Rejects unknown keys, duplicated keys (reporting both
/// line numbers), non-numeric values and unit-suffix misuse (each rate admits
/// exactly one of its _rad_s / _times_2pi_hz / _in_units_of_kappa forms).
RunConfig parse_config(const std::string& text);

/// Missing-key checks for a given subcommand (first absent key is named).
void require_for_command(const RunConfig& cfg, const std::string& command);

/// Keys accepted by [sweep] parameter, and application of a sweep value.
bool sweep_parameter_known(const std::string& name);
void apply_sweep_value(RunConfig& cfg, const std::string& name, double value);

std::string read_file(const std::string& path);

}  // namespace bmcli
