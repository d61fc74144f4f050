#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "openres/effective.hpp"
#include "openres/fluctuations.hpp"
#include "openres/langevin.hpp"
#include "openres/laser.hpp"

namespace openres {

struct DynamicsConfig {
  double dt = 0.05;
  long n_steps = 200000;
  long burn_in = 20000;
  NoiseOrdering ordering = NoiseOrdering::symmetric;
  bool export_trajectory = false;
};

struct EnsembleConfig {
  int n_realizations = 1;
  std::uint64_t master_seed = 1;
  int n_workers = 0;  // 0: one worker per hardware thread
};

struct OutputConfig {
  std::string directory = "out";
  bool write_csv = true;
  bool write_json = true;
};

struct AnalysisConfig {
  double spacing_window = 0.5;
  double rwa_threshold = 0.1;
  ResonanceOptions resonance;
  SteadyStateOptions steady_state;
  double spectrum_span_linewidths = 20.0;
  int spectrum_points = 2001;
  LinewidthBaseline linewidth_baseline = LinewidthBaseline::half_width_over_intensity;
  double linewidth_baseline_value = 0.0;
};

struct RunConfig {
  int n_modes = 0;
  int n_channels = 0;
  std::vector<double> coupling_x;  // one value broadcast, or n_channels values
  double mean_spacing = 1.0;
  double carrier = 0.0;
  GainMedium medium;
  DynamicsConfig dynamics;
  EnsembleConfig ensemble;
  OutputConfig outputs;
  AnalysisConfig analysis;
};

// Parse a JSON config file.  Unknown keys are rejected (typos must not
// silently fall back to defaults).  Throws IoError / InvalidParameter.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
std::string config_to_json(const RunConfig& config);

// All violated constraints at once, empty when the config is valid.
std::vector<std::string> validate_config(const RunConfig& config);

// validate_config + throw InvalidParameter listing every violation.
void require_valid(const RunConfig& config);

}  // namespace openres
