// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances are pinned here on purpose; loosening them is changing the
// contract, not fixing a test.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "openres/config.hpp"
#include "openres/effective.hpp"
#include "openres/ensembles.hpp"
#include "openres/fluctuations.hpp"
#include "openres/io.hpp"
#include "openres/langevin.hpp"
#include "openres/laser.hpp"
#include "openres/rng.hpp"
#include "openres/runner.hpp"

using namespace openres;

namespace {

struct Cavity {
  ModeSpectrum spectrum;
  CouplingMatrix coupling;
  DampingMatrix damping;
  DynamicalMatrix dynamical;
};

Cavity make_cavity(int n, int m, double x, std::uint64_t seed) {
  Cavity c;
  c.spectrum = sample_goe_spectrum(n, 1.0, 100.0 * n, seed);
  c.coupling = sample_coupling(n, m, {x}, 1.0, seed + 1);
  c.damping = build_damping(c.coupling);
  c.dynamical = build_dynamical(c.spectrum, c.damping);
  return c;
}

GainMedium reference_medium() {
  GainMedium m;
  m.pump_strength = 0.5;
  m.atom_number = 1000.0;
  m.coupling = 0.2;
  m.gamma_perp = 50.0;
  m.gamma_par = 30.0;
  return m;
}

double width_trace(const CouplingMatrix& w) {
  return M_PI * (w.entries.transpose() * w.entries).trace();
}

// Petermann factor of one eigenvalue from scratch: null vectors of the
// shifted matrix and its adjoint via SVD, independent of the library's
// bi-orthogonal decomposition.
double petermann_by_svd(const Eigen::MatrixXcd& a, Complex nu) {
  const auto n = a.rows();
  const Eigen::MatrixXcd shifted = a - nu * Eigen::MatrixXcd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> right_svd(shifted, Eigen::ComputeFullV);
  const Eigen::VectorXcd r = right_svd.matrixV().col(n - 1);
  Eigen::JacobiSVD<Eigen::MatrixXcd> left_svd(shifted.adjoint(), Eigen::ComputeFullV);
  const Eigen::VectorXcd l = left_svd.matrixV().col(n - 1);
  return 1.0 / std::norm(l.dot(r));  // unit vectors: K = 1 / |l^dag r|^2
}

struct SumRuleTracker {
  double worst = 0.0;
  long count = 0;
  void feed(double gamma_sum, double trace) {
    worst = std::max(worst, std::abs(gamma_sum - trace) / trace);
    ++count;
  }
};

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int idx, const std::string& detail, bool pass) {
    std::printf("[%d] %s : %s\n", idx, detail.c_str(), pass ? "PASS" : "FAIL");
    if (!pass) ++failures;
  };

  SumRuleTracker sum_rule;

  // ---- 1: Petermann bound and Hermitian limit --------------------------
  {
    const double bound_tol = 1e-10;   // K >= 1 - bound_tol at x = 1
    const double hermitian_tol = 1e-2;  // max(K - 1) at x = 1e-3
    double min_k = 1e300;
    double weak_excess = 0.0;
    int count = 0;
    bool ok = true;
    for (int m : {1, 2, 4}) {
      for (int rep = 0; rep < 70; ++rep) {
        const std::uint64_t seed = 1000 + 10 * (m * 100 + rep);
        const Cavity strong = make_cavity(50, m, 1.0, seed);
        const ResonanceSet rs = resonances(strong.dynamical);
        min_k = std::min(min_k, rs.petermann.minCoeff());
        sum_rule.feed(rs.gammas.sum(), width_trace(strong.coupling));

        const Cavity weak = make_cavity(50, m, 1e-3, seed + 5);
        const ResonanceSet rw = resonances(weak.dynamical);
        weak_excess = std::max(weak_excess, rw.petermann.maxCoeff() - 1.0);
        sum_rule.feed(rw.gammas.sum(), width_trace(weak.coupling));
        ++count;
      }
    }
    ok = min_k >= 1.0 - bound_tol && weak_excess < hermitian_tol;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Petermann bound and Hermitian limit: %d realizations per coupling, "
                  "min K - 1 = %.3e, weak-coupling max K - 1 = %.3e",
                  3 * count, min_k - 1.0, weak_excess);
    report(1, buf, ok);
  }

  // ---- 2 and 3: linewidth factorization and the exact zero mode --------
  {
    const double factor_tol = 1e-10;  // linewidth / ST ratio vs independent K
    const double fit_tol = 1e-2;      // fitted Lorentzian half-width vs K * ST
    const double gauge_tol = 1e-8;    // |L (abar, -abar*)| / |L|
    double worst_factor = 0.0, worst_fit = 0.0, worst_gauge = 0.0;
    int valid = 0, skipped = 0;
    for (std::uint64_t seed = 40000; valid < 50 && skipped < 30; seed += 10) {
      try {
        const Cavity cav = make_cavity(20, 2, 1.0, seed);
        const ResonanceSet rs = resonances(cav.dynamical);
        GainMedium medium = reference_medium();
        medium.pump_strength = std::min(2.0 * lasing_threshold(rs, medium), 1.0);
        const LasingSolution sol = steady_state(rs, medium);
        const LinewidthReport rep = linewidth(sol);
        sum_rule.feed(rs.gammas.sum(), width_trace(cav.coupling));

        const double k_indep =
            petermann_by_svd(cav.dynamical.matrix, rs.eigenvalues[sol.mode_index]);
        worst_factor = std::max(
            worst_factor,
            std::abs(rep.linewidth / rep.schawlow_townes - k_indep) / k_indep);

        const FluctuationMatrix fluct =
            build_fluctuation_matrix(sol, cav.spectrum, cav.damping, medium);
        Eigen::VectorXd grid(801);
        for (int i = 0; i < 801; ++i) {
          grid[i] = sol.omega_bar + 20.0 * rep.linewidth * (2.0 * i / 800.0 - 1.0);
        }
        const CorrelatorSpectrum spec =
            correlator_spectrum(fluct, vacuum_field_noise(cav.damping), grid);
        const LorentzianFit fit = fit_lorentzian(spec.omega, spec.values, sol.omega_bar);
        worst_fit = std::max(worst_fit,
                             std::abs(fit.half_width - rep.linewidth) / rep.linewidth);

        Eigen::VectorXcd gauge(40);
        gauge.head(20) = sol.amplitude;
        gauge.tail(20) = -sol.amplitude.conjugate();
        worst_gauge = std::max(worst_gauge,
                               (fluct.l_matrix * gauge).norm() / fluct.l_matrix.norm());
        ++valid;
      } catch (const Error&) {
        ++skipped;
      }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Linewidth factorization: %d lasers (%d skipped), max |dw/dw_ST - K|/K = "
                  "%.3e, max fit error = %.3e",
                  valid, skipped, worst_factor, worst_fit);
    report(2, buf, valid == 50 && worst_factor <= factor_tol && worst_fit <= fit_tol);
    std::snprintf(buf, sizeof buf,
                  "Exact zero mode: max |L(abar,-abar*)|/|L| = %.3e over %d steady states",
                  worst_gauge, valid);
    report(3, buf, valid == 50 && worst_gauge <= gauge_tol);
  }

  // ---- 4: fluctuation-dissipation ---------------------------------------
  {
    const Cavity cav = make_cavity(4, 2, 1.0, 60001);
    const NoiseModel noise = noise_from_coupling(cav.damping, NoiseOrdering::symmetric);
    const Eigen::VectorXcd nu = dynamical_eigenvalues(cav.dynamical);
    const double gamma_min = (-nu.real()).minCoeff();
    const double gamma_max = (-nu.real()).maxCoeff();
    const double tau = 1.0 / (2.0 * gamma_min);   // slowest correlation time
    const double dt = 0.1 / gamma_max;
    long n_steps = static_cast<long>(1.05e5 * tau / dt);
    n_steps = std::min(n_steps, long{200000000});
    const long burn_in = static_cast<long>(50.0 * tau / dt);
    const CovarianceEstimate est = estimate_stationary_covariance(
        cav.dynamical, noise, dt, n_steps, burn_in, 60002);
    const double sim_times = static_cast<double>(n_steps) * dt / tau;
    const double dev =
        (est.matrix - 0.5 * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff();
    const bool mc_ok = sim_times >= 1e5 && dev <= 3.0 * est.standard_error;

    double worst_residual = 0.0;
    Rng rng(60003);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 8;
      const Cavity inst = make_cavity(n, 2, 0.1 + 0.009 * trial, 61000 + 10 * trial);
      Eigen::MatrixXd b(n, n);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) b(i, j) = rng.normal();
      }
      NoiseModel generic;
      generic.covariance = b * b.transpose();
      const Eigen::MatrixXcd c = steady_covariance(inst.dynamical, generic);
      const Eigen::MatrixXcd& a = inst.dynamical.matrix;
      const double res = (a * c + c * a.adjoint() + generic.covariance.cast<Complex>()).norm() /
                         (a.norm() * c.norm() + generic.covariance.norm());
      worst_residual = std::max(worst_residual, res);
    }
    const bool lyap_ok = worst_residual <= 1e-8;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Fluctuation-dissipation: %.0f correlation times, max |C - I/2| = %.3e "
                  "(3 sigma = %.3e); worst Lyapunov residual = %.3e over 100 instances",
                  sim_times, dev, 3.0 * est.standard_error, worst_residual);
    report(4, buf, mc_ok && lyap_ok);
  }

  // ---- 5 and 6: Weisskopf width scale and GOE spacing statistics --------
  {
    const int n = 500, m = 2, reps = 50;
    const double expected = m * 1.0 / (2.0 * M_PI);  // gamma_bar = M dw / 2 pi
    double width_sum = 0.0;
    std::vector<double> pooled;
    for (int rep = 0; rep < reps; ++rep) {
      const Cavity cav = make_cavity(n, m, 1.0, 70000 + 10 * rep);
      const Eigen::VectorXcd nu = dynamical_eigenvalues(cav.dynamical);
      const double gamma_sum = -nu.real().sum();
      width_sum += gamma_sum / n;
      sum_rule.feed(gamma_sum, width_trace(cav.coupling));
      const SpacingStatistics stats = spacing_statistics(cav.spectrum, 0.5);
      pooled.insert(pooled.end(), stats.spacings.begin(), stats.spacings.end());
    }
    const double gamma_bar = width_sum / reps;
    const double ratio = gamma_bar / expected;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Weisskopf overlap scale: mean width %.6g vs M dw/2pi = %.6g "
                  "(ratio %.4f) over %d x N=%d",
                  gamma_bar, expected, ratio, reps, n);
    report(5, buf, std::abs(ratio - 1.0) <= 0.15);

    std::sort(pooled.begin(), pooled.end());
    const double d_wigner = ks_statistic(pooled, SpacingReference::wigner_goe);
    const double d_poisson = ks_statistic(pooled, SpacingReference::poisson);
    const double crit = ks_critical_value(0.01, pooled.size());
    std::snprintf(buf, sizeof buf,
                  "GOE statistics: %zu pooled spacings, KS Wigner %.4f vs crit %.4f, "
                  "KS Poisson %.4f",
                  pooled.size(), d_wigner, crit, d_poisson);
    report(6, buf, pooled.size() >= 10000 && d_wigner <= crit && d_poisson > crit);
  }

  // ---- 7: weak-damping reduction ---------------------------------------
  {
    double worst_ratio = 0.0;  // shift / (10 eps^2 dw)
    for (int rep = 0; rep < 20; ++rep) {
      const Cavity cav = make_cavity(40, 2, 1e-3, 80000 + 10 * rep);
      const WeakDampingReduction red = weak_damping_reduce(cav.dynamical, 1.0);
      Eigen::VectorXcd full = dynamical_eigenvalues(cav.dynamical);
      Eigen::VectorXcd reduced = dynamical_eigenvalues(red.reduced);
      auto sort_by_imag = [](Eigen::VectorXcd& v) {
        std::vector<Complex> tmp(v.data(), v.data() + v.size());
        std::sort(tmp.begin(), tmp.end(),
                  [](Complex a, Complex b) { return a.imag() < b.imag(); });
        v = Eigen::Map<Eigen::VectorXcd>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
      };
      sort_by_imag(full);
      sort_by_imag(reduced);
      const double shift = (full - reduced).cwiseAbs().maxCoeff();
      worst_ratio = std::max(worst_ratio, shift / (10.0 * red.epsilon * red.epsilon * 1.0));
      sum_rule.feed(-full.real().sum(), width_trace(cav.coupling));
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Weak-damping reduction: max eigenvalue shift / (10 eps^2 dw) = %.3f "
                  "over 20 x N=40",
                  worst_ratio);
    report(7, buf, worst_ratio < 1.0);
  }

  // ---- 8: width sum rule and channel-basis invariance -------------------
  {
    double worst_obs = 0.0;
    bool rotations_ok = true;
    for (int rep = 0; rep < 10; ++rep) {
      const std::uint64_t seed = 90000 + 10 * rep;
      const Cavity cav = make_cavity(20, 2, 1.0, seed);
      Rng rng(seed + 7);
      const double th = 2.0 * M_PI * rng.uniform();
      Eigen::Matrix2d rot;
      rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      Cavity rotated = cav;
      rotated.coupling.entries = cav.coupling.entries * rot;
      rotated.damping = build_damping(rotated.coupling);
      rotated.dynamical = build_dynamical(rotated.spectrum, rotated.damping);

      GainMedium medium = reference_medium();
      const ResonanceSet rs_a = resonances(cav.dynamical);
      medium.pump_strength = std::min(2.0 * lasing_threshold(rs_a, medium), 1.0);
      const ResonanceSet rs_b = resonances(rotated.dynamical);
      const LasingSolution sol_a = steady_state(rs_a, medium);
      const LasingSolution sol_b = steady_state(rs_b, medium);
      const LinewidthReport rep_a = linewidth(sol_a);
      const LinewidthReport rep_b = linewidth(sol_b);

      rotations_ok = rotations_ok && sol_a.mode_index == sol_b.mode_index;
      auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(a); };
      worst_obs = std::max({worst_obs, rel(sol_a.omega_bar, sol_b.omega_bar),
                            rel(sol_a.gain_star, sol_b.gain_star),
                            rel(sol_a.intensity, sol_b.intensity),
                            rel(sol_a.petermann, sol_b.petermann),
                            rel(rep_a.schawlow_townes, rep_b.schawlow_townes),
                            rel(rep_a.linewidth, rep_b.linewidth),
                            rel(lasing_threshold(rs_a, medium),
                                lasing_threshold(rs_b, medium))});
      sum_rule.feed(rs_a.gammas.sum(), width_trace(cav.coupling));
      sum_rule.feed(rs_b.gammas.sum(), width_trace(rotated.coupling));
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Width sum rule and invariances: worst sum-rule error %.3e over %ld "
                  "realizations; worst observable drift under W -> WO = %.3e",
                  sum_rule.worst, sum_rule.count, worst_obs);
    report(8, buf, sum_rule.worst <= 1e-8 && rotations_ok && worst_obs <= 1e-8);
  }

  // ---- 9: determinism across worker counts ------------------------------
  {
    auto config_for = [](const std::string& dir, int workers) {
      RunConfig cfg;
      cfg.n_modes = 10;
      cfg.n_channels = 2;
      cfg.coupling_x = {1.0};
      cfg.mean_spacing = 1.0;
      cfg.carrier = 1000.0;
      cfg.medium = reference_medium();
      cfg.ensemble.n_realizations = 6;
      cfg.ensemble.master_seed = 31;
      cfg.ensemble.n_workers = workers;
      cfg.outputs.directory = dir;
      return cfg;
    };
    const std::string base = "/tmp/openres_acceptance";
    run_ensemble(config_for(base + "/w1", 1));
    run_ensemble(config_for(base + "/w3", 3));
    const bool csv_same = read_text_file(base + "/w1/ensemble.csv") ==
                          read_text_file(base + "/w3/ensemble.csv");
    const bool json_same = read_text_file(base + "/w1/ensemble_summary.json") ==
                           read_text_file(base + "/w3/ensemble_summary.json");
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Determinism: 1 vs 3 workers, ensemble.csv %s, ensemble_summary.json %s",
                  csv_same ? "identical" : "differs", json_same ? "identical" : "differs");
    report(9, buf, csv_same && json_same);
  }

  if (failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria failed\n", failures);
  }
  return failures;
}
