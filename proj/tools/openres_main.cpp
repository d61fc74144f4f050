#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "openres/runner.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int realizations_override = 0;
  bool quiet = false;
};

openres::RunConfig load(const CliOptions& opt) {
  openres::RunConfig cfg = openres::load_config(opt.config_path);
  if (opt.seed_set) cfg.ensemble.master_seed = opt.seed_override;
  if (!opt.out_override.empty()) cfg.outputs.directory = opt.out_override;
  if (opt.realizations_override > 0) cfg.ensemble.n_realizations = opt.realizations_override;
  return cfg;
}

void add_common(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("-c,--config", opt.config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed_override, "override ensemble.master_seed")
      ->each([&opt](const std::string&) { opt.seed_set = true; });
  cmd->add_option("-o,--out", opt.out_override, "override outputs.directory");
  cmd->add_option("-n,--realizations", opt.realizations_override,
                  "override ensemble.n_realizations");
  cmd->add_flag("-q,--quiet", opt.quiet, "suppress the summary line");
}

int exit_code(openres::ErrorKind kind) {
  switch (kind) {
    case openres::ErrorKind::validation: return 2;
    case openres::ErrorKind::below_threshold: return 3;
    case openres::ErrorKind::numerical: return 4;
    case openres::ErrorKind::io: return 5;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"openres: overlapping-mode resonator and random-laser simulations"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* spectrum = app.add_subcommand("spectrum", "resonance poles and level statistics");
  CLI::App* dynamics = app.add_subcommand("dynamics", "stationary mode covariance");
  CLI::App* laser = app.add_subcommand("laser", "steady state, linewidth and field spectrum");
  CLI::App* ensemble = app.add_subcommand("ensemble", "laser statistics over many cavities");
  for (CLI::App* cmd : {spectrum, dynamics, laser, ensemble}) add_common(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  try {
    if (spectrum->parsed()) {
      const openres::RunConfig cfg = load(opt);
      const auto result = openres::run_spectrum(cfg);
      if (!opt.quiet) {
        std::printf("spectrum: %d realizations, mean overlap %.6g, %ld spacings (KS vs Wigner %.4f) -> %s\n",
                    result.n_realizations, result.mean_overlap_ratio, result.n_spacings,
                    result.pooled_ks_wigner, cfg.outputs.directory.c_str());
      }
    } else if (dynamics->parsed()) {
      const openres::RunConfig cfg = load(opt);
      const auto result = openres::run_dynamics(cfg);
      if (!opt.quiet) {
        std::printf("dynamics: %ld samples, max |C_mc - C_lyap| = %.3e (se %.3e) -> %s\n",
                    result.estimate.n_samples, result.max_deviation,
                    result.estimate.standard_error, cfg.outputs.directory.c_str());
      }
    } else if (laser->parsed()) {
      const openres::RunConfig cfg = load(opt);
      const auto result = openres::run_laser(cfg);
      const auto& s = result.analysis.solution;
      if (!opt.quiet) {
        std::printf("laser: mode %d at omega %.6g, I = %.6g, K = %.6g, linewidth %.6g -> %s\n",
                    s.mode_index, s.omega_bar, s.intensity, s.petermann,
                    result.analysis.report.linewidth, cfg.outputs.directory.c_str());
      }
    } else if (ensemble->parsed()) {
      const openres::RunConfig cfg = load(opt);
      const auto result = openres::run_ensemble(cfg);
      if (!opt.quiet) {
        std::printf("ensemble: %d/%zu ok, K median %.6g, linewidth median %.6g -> %s\n",
                    result.n_ok, result.realizations.size(), result.petermann_median,
                    result.linewidth_median, cfg.outputs.directory.c_str());
      }
    }
  } catch (const openres::Error& e) {
    nlohmann::json err;
    err["error"] = openres::error_kind_name(e.kind());
    err["message"] = e.what();
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"internal\",\"message\":\"%s\"}\n", e.what());
    return 1;
  }
  return 0;
}
