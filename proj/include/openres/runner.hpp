#pragma once

#include <map>
#include <string>
#include <vector>

#include "openres/config.hpp"
#include "openres/fluctuations.hpp"
#include "openres/langevin.hpp"

namespace openres {

// Everything derived from one realization seed.  run_laser and ensemble
// workers share this path, so a one-realization ensemble reproduces run_laser
// bit for bit.
struct RealizationAnalysis {
  ModeSpectrum spectrum;
  CouplingMatrix coupling;
  DampingMatrix damping;
  ResonanceSet resonances;
  LasingSolution solution;
  LinewidthReport report;
  double threshold_pump = 0.0;
};

RealizationAnalysis analyze_realization(const RunConfig& config, std::uint64_t seed);

std::uint64_t realization_seed(std::uint64_t master_seed, int index);

struct SpectrumRunResult {
  int n_realizations = 0;
  double mean_overlap_ratio = 0.0;
  double pooled_ks_wigner = 0.0;
  long n_spacings = 0;
  std::vector<std::string> files;
};

struct DynamicsRunResult {
  CovarianceEstimate estimate;
  Eigen::MatrixXcd lyapunov;
  double max_deviation = 0.0;  // entrywise |estimate - lyapunov|
  std::vector<std::string> files;
};

struct LaserRunResult {
  RealizationAnalysis analysis;
  CorrelatorSpectrum spectrum;
  std::vector<std::string> files;
};

struct RealizationOutcome {
  int index = -1;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or an error kind
  std::string message;
  double gamma_min = 0.0;
  double omega_bar = 0.0;
  double intensity = 0.0;
  double petermann = 0.0;
  double linewidth = 0.0;
  double threshold_pump = 0.0;
};

struct EnsembleRunResult {
  std::vector<RealizationOutcome> realizations;
  int n_ok = 0;
  std::map<std::string, int> error_counts;
  // Aggregates over successful realizations.
  double petermann_mean = 0.0, petermann_median = 0.0, petermann_q1 = 0.0, petermann_q3 = 0.0;
  double linewidth_mean = 0.0, linewidth_median = 0.0;
  double intensity_mean = 0.0;
  double gamma_min_mean = 0.0;
  std::vector<std::string> files;
};

// Resonance statistics over the ensemble; writes resonances.csv and
// spacings.csv.
SpectrumRunResult run_spectrum(const RunConfig& config);

// Monte-Carlo stationary covariance of the passive modes against the
// closed-form solution; writes covariance.json (and trajectory.csv when
// configured).
DynamicsRunResult run_dynamics(const RunConfig& config);

// Single-realization laser steady state, linewidth and field spectrum;
// writes lasing.json, linewidth.json and spectrum.csv.
LaserRunResult run_laser(const RunConfig& config);

// Laser statistics over many realizations; failed realizations are recorded
// with their error kind and excluded from aggregates.  Writes ensemble.csv
// and ensemble_summary.json.
EnsembleRunResult run_ensemble(const RunConfig& config);

}  // namespace openres
