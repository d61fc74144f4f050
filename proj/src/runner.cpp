#include "openres/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <thread>

#include <json.hpp>

#include "openres/io.hpp"
#include "openres/kernels.hpp"
#include "openres/rng.hpp"

namespace openres {

namespace {

using nlohmann::json;

// Substream tags within one realization; keep these stable or seeds stop
// reproducing published runs.
constexpr std::uint64_t kTagSpectrum = 0;
constexpr std::uint64_t kTagCoupling = 1;
constexpr std::uint64_t kTagCovariance = 2;
constexpr std::uint64_t kTagTrajectory = 3;

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json vector_to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

std::string iso_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const RunConfig& cfg, const std::string& command) {
  json manifest;
  manifest["command"] = command;
  manifest["config"] = json::parse(config_to_json(cfg));
  manifest["master_seed"] = cfg.ensemble.master_seed;
  manifest["kernel_level"] = kernels::level_name(kernels::active_level());
  manifest["versions"] = {{"openres", "0.1.0"},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
  // The one timestamp in the output tree; data files must stay byte-stable.
  manifest["generated_at"] = iso_utc_now();
  write_text_file(cfg.outputs.directory + "/manifest.json", manifest.dump(2) + "\n");
}

void require_medium(const RunConfig& cfg) { cfg.medium.validate(); }

double quantile(std::vector<double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::uint64_t realization_seed(std::uint64_t master_seed, int index) {
  return substream(master_seed, static_cast<std::uint64_t>(index));
}

RealizationAnalysis analyze_realization(const RunConfig& cfg, std::uint64_t seed) {
  RealizationAnalysis out;
  out.spectrum = sample_goe_spectrum(cfg.n_modes, cfg.mean_spacing, cfg.carrier,
                                     substream(seed, kTagSpectrum), cfg.analysis.rwa_threshold);
  out.coupling = sample_coupling(cfg.n_modes, cfg.n_channels, cfg.coupling_x, cfg.mean_spacing,
                                 substream(seed, kTagCoupling));
  out.damping = build_damping(out.coupling);
  const DynamicalMatrix dynamical = build_dynamical(out.spectrum, out.damping);
  out.resonances = resonances(dynamical, cfg.analysis.resonance);
  out.threshold_pump = lasing_threshold(out.resonances, cfg.medium);
  out.solution = steady_state(out.resonances, cfg.medium, cfg.analysis.steady_state);
  out.report = linewidth(out.solution, cfg.analysis.linewidth_baseline,
                         cfg.analysis.linewidth_baseline_value);
  return out;
}

SpectrumRunResult run_spectrum(const RunConfig& cfg) {
  require_valid(cfg);
  ensure_directory(cfg.outputs.directory);

  CsvWriter res_csv({"realization", "mode_index", "omega_k", "gamma_k", "K_k"});
  CsvWriter spc_csv({"realization", "spacing"});
  std::vector<double> pooled;
  std::map<std::string, int> error_counts;
  double overlap_sum = 0.0;
  double worst_sum_rule = 0.0;
  int n_ok = 0;

  for (int i = 0; i < cfg.ensemble.n_realizations; ++i) {
    const std::uint64_t seed = realization_seed(cfg.ensemble.master_seed, i);
    try {
      const ModeSpectrum spectrum =
          sample_goe_spectrum(cfg.n_modes, cfg.mean_spacing, cfg.carrier,
                              substream(seed, kTagSpectrum), cfg.analysis.rwa_threshold);
      const CouplingMatrix coupling = sample_coupling(
          cfg.n_modes, cfg.n_channels, cfg.coupling_x, cfg.mean_spacing, substream(seed, kTagCoupling));
      const DampingMatrix damping = build_damping(coupling);
      const DynamicalMatrix dynamical = build_dynamical(spectrum, damping);
      const ResonanceSet set = resonances(dynamical, cfg.analysis.resonance);

      for (int k = 0; k < set.n_modes(); ++k) {
        res_csv.add_row({csv_cell(i), csv_cell(k), csv_cell(set.omegas[k]),
                         csv_cell(set.gammas[k]), csv_cell(set.petermann[k])});
      }
      if (cfg.n_modes >= 8) {
        const SpacingStatistics stats = spacing_statistics(spectrum, cfg.analysis.spacing_window);
        for (double s : stats.spacings) spc_csv.add_row({csv_cell(i), csv_cell(s)});
        pooled.insert(pooled.end(), stats.spacings.begin(), stats.spacings.end());
      }
      const double trace_width = M_PI * (coupling.entries.transpose() * coupling.entries).trace();
      const double sum_rule = std::abs(set.gammas.sum() - trace_width) /
                              std::max(trace_width, 1e-300);
      worst_sum_rule = std::max(worst_sum_rule, sum_rule);
      overlap_sum += set.overlap_ratio;
      ++n_ok;
    } catch (const Error& e) {
      ++error_counts[error_kind_name(e.kind())];
    }
  }

  SpectrumRunResult out;
  out.n_realizations = cfg.ensemble.n_realizations;
  out.n_spacings = static_cast<long>(pooled.size());
  out.mean_overlap_ratio = n_ok > 0 ? overlap_sum / n_ok : 0.0;
  if (!pooled.empty()) {
    std::sort(pooled.begin(), pooled.end());
    out.pooled_ks_wigner = ks_statistic(pooled, SpacingReference::wigner_goe);
  }

  if (cfg.outputs.write_csv) {
    const std::string res_path = cfg.outputs.directory + "/resonances.csv";
    res_csv.write(res_path);
    out.files.push_back(res_path);
    const std::string spc_path = cfg.outputs.directory + "/spacings.csv";
    spc_csv.write(spc_path);
    out.files.push_back(spc_path);
  }
  if (cfg.outputs.write_json) {
    json summary;
    summary["n_realizations"] = out.n_realizations;
    summary["n_ok"] = n_ok;
    summary["error_counts"] = error_counts;
    summary["mean_overlap_ratio"] = out.mean_overlap_ratio;
    summary["n_spacings"] = out.n_spacings;
    summary["pooled_ks_wigner"] = out.pooled_ks_wigner;
    if (!pooled.empty()) {
      summary["ks_critical_1pct"] = ks_critical_value(0.01, pooled.size());
    }
    summary["max_width_sum_rule_error"] = worst_sum_rule;
    const std::string path = cfg.outputs.directory + "/spectrum_summary.json";
    write_text_file(path, summary.dump(2) + "\n");
    out.files.push_back(path);
  }
  write_manifest(cfg, "spectrum");
  return out;
}

DynamicsRunResult run_dynamics(const RunConfig& cfg) {
  require_valid(cfg);
  ensure_directory(cfg.outputs.directory);
  const std::uint64_t seed = realization_seed(cfg.ensemble.master_seed, 0);

  const ModeSpectrum spectrum =
      sample_goe_spectrum(cfg.n_modes, cfg.mean_spacing, cfg.carrier,
                          substream(seed, kTagSpectrum), cfg.analysis.rwa_threshold);
  const CouplingMatrix coupling = sample_coupling(cfg.n_modes, cfg.n_channels, cfg.coupling_x,
                                                  cfg.mean_spacing, substream(seed, kTagCoupling));
  const DampingMatrix damping = build_damping(coupling);
  const DynamicalMatrix dynamical = build_dynamical(spectrum, damping);
  const NoiseModel noise = noise_from_coupling(damping, cfg.dynamics.ordering);

  DynamicsRunResult out;
  out.estimate = estimate_stationary_covariance(dynamical, noise, cfg.dynamics.dt,
                                                cfg.dynamics.n_steps, cfg.dynamics.burn_in,
                                                substream(seed, kTagCovariance));
  out.lyapunov = steady_covariance(dynamical, noise);
  out.max_deviation = (out.estimate.matrix - out.lyapunov).cwiseAbs().maxCoeff();

  if (cfg.outputs.write_json) {
    json doc;
    doc["n_modes"] = cfg.n_modes;
    doc["ordering"] = cfg.dynamics.ordering == NoiseOrdering::symmetric ? "symmetric" : "normal";
    doc["dt"] = cfg.dynamics.dt;
    doc["n_samples"] = out.estimate.n_samples;
    doc["standard_error"] = out.estimate.standard_error;
    doc["matrix"] = matrix_to_json(out.estimate.matrix);
    doc["lyapunov_matrix"] = matrix_to_json(out.lyapunov);
    doc["max_abs_deviation"] = out.max_deviation;
    const std::string path = cfg.outputs.directory + "/covariance.json";
    write_text_file(path, doc.dump(2) + "\n");
    out.files.push_back(path);
  }

  if (cfg.dynamics.export_trajectory && cfg.outputs.write_csv) {
    const Trajectory traj =
        propagate(dynamical, noise, Eigen::VectorXcd::Zero(cfg.n_modes), cfg.dynamics.dt,
                  cfg.dynamics.n_steps, substream(seed, kTagTrajectory));
    std::vector<std::string> header{"t"};
    for (int k = 0; k < cfg.n_modes; ++k) {
      header.push_back("re_a" + std::to_string(k));
      header.push_back("im_a" + std::to_string(k));
    }
    CsvWriter csv(std::move(header));
    for (Eigen::Index j = 0; j < traj.times.size(); ++j) {
      std::vector<std::string> row{csv_cell(traj.times[j])};
      for (int k = 0; k < cfg.n_modes; ++k) {
        row.push_back(csv_cell(traj.amplitudes(k, j).real()));
        row.push_back(csv_cell(traj.amplitudes(k, j).imag()));
      }
      csv.add_row(std::move(row));
    }
    const std::string path = cfg.outputs.directory + "/trajectory.csv";
    csv.write(path);
    out.files.push_back(path);
  }
  write_manifest(cfg, "dynamics");
  return out;
}

LaserRunResult run_laser(const RunConfig& cfg) {
  require_valid(cfg);
  require_medium(cfg);
  ensure_directory(cfg.outputs.directory);
  const std::uint64_t seed = realization_seed(cfg.ensemble.master_seed, 0);

  LaserRunResult out;
  out.analysis = analyze_realization(cfg, seed);
  const RealizationAnalysis& a = out.analysis;

  const FluctuationMatrix fluct =
      build_fluctuation_matrix(a.solution, a.spectrum, a.damping, cfg.medium);
  const DoubledNoise noise = vacuum_field_noise(a.damping);

  const double half_span = cfg.analysis.spectrum_span_linewidths * a.report.linewidth;
  const int points = cfg.analysis.spectrum_points;
  Eigen::VectorXd grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = a.solution.omega_bar +
              half_span * (2.0 * static_cast<double>(i) / (points - 1) - 1.0);
  }
  out.spectrum = correlator_spectrum(fluct, noise, grid, cfg.analysis.resonance);
  out.analysis.report.zero_mode_weight = out.spectrum.zero_mode_weight;

  if (cfg.outputs.write_json) {
    json lasing;
    lasing["mode_index"] = a.solution.mode_index;
    lasing["omega_bar"] = a.solution.omega_bar;
    lasing["gain_star"] = a.solution.gain_star;
    lasing["intensity"] = a.solution.intensity;
    lasing["petermann"] = a.solution.petermann;
    lasing["amplitude"] = vector_to_json(a.solution.amplitude);
    lasing["threshold_pump"] = a.threshold_pump;
    lasing["adiabaticity_warning"] = a.solution.adiabaticity_warning;
    const std::string lasing_path = cfg.outputs.directory + "/lasing.json";
    write_text_file(lasing_path, lasing.dump(2) + "\n");
    out.files.push_back(lasing_path);

    json lw;
    lw["schawlow_townes"] = a.report.schawlow_townes;
    lw["petermann"] = a.report.petermann;
    lw["linewidth"] = a.report.linewidth;
    lw["zero_mode_weight"] = out.analysis.report.zero_mode_weight;
    const std::string lw_path = cfg.outputs.directory + "/linewidth.json";
    write_text_file(lw_path, lw.dump(2) + "\n");
    out.files.push_back(lw_path);
  }
  if (cfg.outputs.write_csv) {
    CsvWriter csv({"omega", "S_real"});
    for (Eigen::Index i = 0; i < out.spectrum.omega.size(); ++i) {
      csv.add_row({csv_cell(out.spectrum.omega[i]), csv_cell(out.spectrum.values[i])});
    }
    const std::string path = cfg.outputs.directory + "/spectrum.csv";
    csv.write(path);
    out.files.push_back(path);
  }
  write_manifest(cfg, "laser");
  return out;
}

EnsembleRunResult run_ensemble(const RunConfig& cfg) {
  require_valid(cfg);
  require_medium(cfg);
  ensure_directory(cfg.outputs.directory);

  const int n = cfg.ensemble.n_realizations;
  std::vector<RealizationOutcome> outcomes(n);

  auto run_one = [&cfg](int index) {
    RealizationOutcome out;
    out.index = index;
    out.seed = realization_seed(cfg.ensemble.master_seed, index);
    try {
      const RealizationAnalysis a = analyze_realization(cfg, out.seed);
      out.gamma_min = a.resonances.gammas.minCoeff();
      out.omega_bar = a.solution.omega_bar;
      out.intensity = a.solution.intensity;
      out.petermann = a.solution.petermann;
      out.linewidth = a.report.linewidth;
      out.threshold_pump = a.threshold_pump;
    } catch (const Error& e) {
      out.status = error_kind_name(e.kind());
      out.message = e.what();
    } catch (const std::exception& e) {
      out.status = "internal";
      out.message = e.what();
    }
    return out;
  };

  int workers = cfg.ensemble.n_workers;
  if (workers == 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }
  workers = std::min(workers, n);

  if (workers <= 1) {
    for (int i = 0; i < n; ++i) outcomes[i] = run_one(i);
  } else {
    // Work-stealing by index; results land in their own slots, so the merge
    // is independent of scheduling and the files come out byte-identical for
    // any worker count.
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          outcomes[i] = run_one(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  EnsembleRunResult out;
  out.realizations = std::move(outcomes);
  std::vector<double> petermanns, linewidths;
  double intensity_sum = 0.0, gamma_sum = 0.0, petermann_sum = 0.0, linewidth_sum = 0.0;
  for (const auto& r : out.realizations) {
    if (r.status == "ok") {
      ++out.n_ok;
      petermanns.push_back(r.petermann);
      linewidths.push_back(r.linewidth);
      petermann_sum += r.petermann;
      linewidth_sum += r.linewidth;
      intensity_sum += r.intensity;
      gamma_sum += r.gamma_min;
    } else {
      ++out.error_counts[r.status];
    }
  }
  if (out.n_ok > 0) {
    std::sort(petermanns.begin(), petermanns.end());
    std::sort(linewidths.begin(), linewidths.end());
    out.petermann_mean = petermann_sum / out.n_ok;
    out.petermann_median = quantile(petermanns, 0.5);
    out.petermann_q1 = quantile(petermanns, 0.25);
    out.petermann_q3 = quantile(petermanns, 0.75);
    out.linewidth_mean = linewidth_sum / out.n_ok;
    out.linewidth_median = quantile(linewidths, 0.5);
    out.intensity_mean = intensity_sum / out.n_ok;
    out.gamma_min_mean = gamma_sum / out.n_ok;
  }

  if (cfg.outputs.write_csv) {
    CsvWriter csv({"realization", "seed", "status", "gamma_min", "omega_bar", "intensity",
                   "petermann", "linewidth", "threshold_pump"});
    for (const auto& r : out.realizations) {
      csv.add_row({csv_cell(r.index), std::to_string(r.seed), r.status, csv_cell(r.gamma_min),
                   csv_cell(r.omega_bar), csv_cell(r.intensity), csv_cell(r.petermann),
                   csv_cell(r.linewidth), csv_cell(r.threshold_pump)});
    }
    const std::string path = cfg.outputs.directory + "/ensemble.csv";
    csv.write(path);
    out.files.push_back(path);
  }
  if (cfg.outputs.write_json) {
    json summary;
    summary["n_realizations"] = n;
    summary["n_ok"] = out.n_ok;
    summary["error_counts"] = out.error_counts;
    summary["petermann"] = {{"mean", out.petermann_mean},
                            {"median", out.petermann_median},
                            {"q1", out.petermann_q1},
                            {"q3", out.petermann_q3}};
    summary["linewidth"] = {{"mean", out.linewidth_mean}, {"median", out.linewidth_median}};
    summary["intensity_mean"] = out.intensity_mean;
    summary["gamma_min_mean"] = out.gamma_min_mean;
    json failures = json::array();
    for (const auto& r : out.realizations) {
      if (r.status != "ok") {
        failures.push_back({{"realization", r.index}, {"status", r.status}, {"message", r.message}});
      }
    }
    summary["failures"] = failures;
    const std::string path = cfg.outputs.directory + "/ensemble_summary.json";
    write_text_file(path, summary.dump(2) + "\n");
    out.files.push_back(path);
  }
  write_manifest(cfg, "ensemble");
  return out;
}

}  // namespace openres
