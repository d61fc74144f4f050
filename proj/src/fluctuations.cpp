#include "openres/fluctuations.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace openres {

FluctuationMatrix build_fluctuation_matrix(const LasingSolution& solution,
                                           const ModeSpectrum& spectrum,
                                           const DampingMatrix& damping,
                                           const GainMedium& medium) {
  medium.validate();
  spectrum.validate();
  const int n = spectrum.n_modes();
  if (damping.n_modes() != n || solution.amplitude.size() != n) {
    throw DimensionMismatch("spectrum, damping and lasing amplitude sizes disagree");
  }
  if (!(solution.intensity > 0.0)) {
    throw ZeroIntensity("fluctuation expansion needs a finite lasing intensity");
  }

  FluctuationMatrix out;
  out.amplitude = solution.amplitude;
  out.intensity = solution.intensity;
  out.omega_bar = solution.omega_bar;
  // dG/dI at the operating point; negative, this is what pins the intensity.
  out.dgdi = -solution.gain_star * solution.gain_star /
             (medium.small_signal_gain() * medium.saturation_intensity());

  Eigen::MatrixXcd m = -damping.gamma.cast<Complex>();
  for (int k = 0; k < n; ++k) {
    m(k, k) += Complex(solution.gain_star, -(spectrum.frequencies[k] - solution.omega_bar));
  }

  const Eigen::VectorXcd& a = solution.amplitude;
  out.l_matrix.resize(2 * n, 2 * n);
  out.l_matrix.topLeftCorner(n, n) = m + out.dgdi * (a * a.adjoint());
  out.l_matrix.topRightCorner(n, n) = out.dgdi * (a * a.transpose());
  out.l_matrix.bottomLeftCorner(n, n) = out.dgdi * (a.conjugate() * a.adjoint());
  out.l_matrix.bottomRightCorner(n, n) = m.conjugate() + out.dgdi * (a.conjugate() * a.transpose());
  return out;
}

ZeroMode zero_mode(const FluctuationMatrix& fluct, const LasingSolution& solution) {
  const int n = fluct.n_modes();
  if (n < 1) throw DimensionMismatch("fluctuation matrix is empty");
  if (solution.amplitude.size() != n) {
    throw DimensionMismatch("lasing amplitude does not match the fluctuation matrix");
  }
  const int nn = 2 * n;
  const double scale = std::max(fluct.l_matrix.norm(), 1e-300);

  // The gauge direction is known in closed form: a global phase shift moves
  // abar tangentially, (abar, -abar^*).
  ZeroMode out;
  out.right.resize(nn);
  out.right.head(n) = solution.amplitude;
  out.right.tail(n) = -solution.amplitude.conjugate();
  out.right /= out.right.norm();
  out.residual = (fluct.l_matrix * out.right).norm() / scale;
  if (out.residual > 1e-8) {
    throw ZeroModeMissing("gauge direction is not annihilated: |L v0|/|L| = " +
                          std::to_string(out.residual) + "; steady state is inconsistent");
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(fluct.l_matrix, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigenvalue iteration failed to converge");
  }
  int k0 = 0;
  for (int k = 1; k < nn; ++k) {
    if (std::abs(solver.eigenvalues()[k]) < std::abs(solver.eigenvalues()[k0])) k0 = k;
  }
  out.smallest_eigenvalue = std::abs(solver.eigenvalues()[k0]) / scale;
  if (out.smallest_eigenvalue > 1e-6) {
    throw ZeroModeMissing("no eigenvalue near zero: smallest |mu|/|L| = " +
                          std::to_string(out.smallest_eigenvalue));
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(solver.eigenvectors());
  const Eigen::VectorXcd left_row = lu.inverse().row(k0).adjoint();
  const Complex align = left_row.dot(out.right);
  if (std::abs(align) < 1e-8) {
    throw DegenerateVectors("left zero mode is orthogonal to the gauge direction");
  }
  // u0^dag v0 = 1 against the analytic right vector.
  out.left = left_row / std::conj(align);
  return out;
}

DoubledNoise vacuum_field_noise(const DampingMatrix& damping) {
  const int n = damping.n_modes();
  if (n < 1) throw DimensionMismatch("damping matrix is empty");
  DoubledNoise out;
  // Unordered vacuum correlator <F F^dag> = 2 Gamma delta(t - t'), acting
  // identically on the (delta a, delta a^*) halves.
  out.covariance = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  out.covariance.topLeftCorner(n, n) = 2.0 * damping.gamma.cast<Complex>();
  out.covariance.bottomRightCorner(n, n) = 2.0 * damping.gamma.cast<Complex>();
  return out;
}

LinewidthReport linewidth(const LasingSolution& solution, LinewidthBaseline baseline,
                          double baseline_value) {
  if (!(solution.intensity > 0.0)) {
    throw ZeroIntensity("linewidth diverges as intensity goes to zero");
  }
  LinewidthReport out;
  switch (baseline) {
    case LinewidthBaseline::half_width_over_intensity:
      out.schawlow_townes = solution.gain_star / (2.0 * solution.intensity);
      break;
    case LinewidthBaseline::user_value:
      if (!(baseline_value > 0.0)) {
        throw InvalidParameter("user-supplied linewidth baseline must be positive");
      }
      out.schawlow_townes = baseline_value;
      break;
  }
  out.petermann = solution.petermann;
  out.linewidth = out.petermann * out.schawlow_townes;
  return out;
}

CorrelatorSpectrum correlator_spectrum(const FluctuationMatrix& fluct, const DoubledNoise& noise,
                                       const Eigen::VectorXd& frequencies,
                                       const ResonanceOptions& options) {
  const int n = fluct.n_modes();
  if (n < 1) throw DimensionMismatch("fluctuation matrix is empty");
  const int nn = 2 * n;
  if (noise.covariance.rows() != nn || noise.covariance.cols() != nn) {
    throw DimensionMismatch("doubled noise must be 2N x 2N");
  }
  if (frequencies.size() < 1) throw InvalidParameter("frequency grid is empty");
  if (!noise.covariance.isApprox(noise.covariance.adjoint(), 1e-12)) {
    throw InvalidParameter("doubled noise covariance must be Hermitian");
  }
  const double scale = std::max(fluct.l_matrix.norm(), 1e-300);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(fluct.l_matrix, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigenvalue iteration failed to converge");
  }
  const Eigen::VectorXcd mu = solver.eigenvalues();
  const Eigen::MatrixXcd r = solver.eigenvectors();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(r);
  const Eigen::MatrixXcd rinv = lu.inverse();
  const double condition = r.cwiseAbs().colwise().sum().maxCoeff() *
                           rinv.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(condition) || condition > options.max_condition) {
    int pa = 0, pb = 1;
    for (int j = 0; j < nn; ++j) {
      for (int k = j + 1; k < nn; ++k) {
        if (std::abs(mu[j] - mu[k]) < std::abs(mu[pa] - mu[pb])) {
          pa = j;
          pb = k;
        }
      }
    }
    throw NearDefective("fluctuation eigenvector matrix condition " + std::to_string(condition) +
                            " exceeds limit " + std::to_string(options.max_condition),
                        mu[pa], mu[pb], condition);
  }

  int k0 = 0;
  for (int k = 1; k < nn; ++k) {
    if (std::abs(mu[k]) < std::abs(mu[k0])) k0 = k;
  }
  if (std::abs(mu[k0]) / scale > 1e-6) {
    throw ZeroModeMissing("no eigenvalue near zero: smallest |mu|/|L| = " +
                          std::to_string(std::abs(mu[k0]) / scale));
  }

  // Unit-norm zero mode and its left partner, u0^dag v0 = 1; the phase
  // diffusion rate is the zero mode's share of the noise.
  const double v0_norm = r.col(k0).norm();
  const Eigen::VectorXcd u0 = rinv.row(k0).adjoint() * v0_norm;
  const double intensity = fluct.intensity;
  const double d_phi = std::real(u0.dot(noise.covariance * u0)) / (4.0 * intensity);

  // Stationary covariance restricted to the decaying directions: project the
  // Lyapunov solution onto everything but the zero mode, where the spectral
  // division is safe.
  Eigen::MatrixXcd core = rinv * noise.covariance * rinv.adjoint();
  for (int j = 0; j < nn; ++j) {
    for (int k = 0; k < nn; ++k) {
      if (j == k0 || k == k0) {
        core(j, k) = 0.0;
        continue;
      }
      const Complex denom = -(mu[j] + std::conj(mu[k]));
      if (std::abs(denom) < 1e-10 * scale) {
        throw MarginallyStable("fluctuation mode pair with vanishing total damping");
      }
      core(j, k) /= denom;
    }
  }
  const Eigen::MatrixXcd c_perp = r * core * r.adjoint();

  // <delta a^dag(t) delta a(0)> relaxes as sum_j e^{conj(mu_j) t} w_j with
  // weights from projecting C_perp on each decaying mode (field block only).
  const Eigen::MatrixXcd rc = rinv * c_perp;
  Eigen::VectorXcd weights = Eigen::VectorXcd::Zero(nn);
  double weight_sum = 0.0;
  for (int j = 0; j < nn; ++j) {
    if (j == k0) continue;
    Complex tr = 0.0;
    for (int i = 0; i < n; ++i) tr += r(i, j) * rc(j, i);
    weights[j] = std::conj(tr);
    weight_sum += std::abs(weights[j]);
  }

  CorrelatorSpectrum out;
  out.omega = frequencies;
  out.values.resize(frequencies.size());
  out.phase_diffusion = d_phi;
  out.zero_mode_weight = intensity / (intensity + weight_sum);

  for (int i = 0; i < frequencies.size(); ++i) {
    const double w = frequencies[i] - fluct.omega_bar;
    // Diffusing phase: Lorentzian of weight I and half-width D_phi.
    double s = d_phi > 0.0 ? 2.0 * intensity * d_phi / (d_phi * d_phi + w * w) : 0.0;
    for (int j = 0; j < nn; ++j) {
      if (j == k0) continue;
      s += 2.0 * std::real(weights[j] / (-std::conj(mu[j]) - Complex(0.0, w)));
    }
    out.values[i] = s;
  }

  // The exact density is nonnegative; roundoff may graze zero in the far
  // tails, anything worse means the decomposition went bad.
  const double peak = out.values.maxCoeff();
  const double floor = -1e-9 * std::max(peak, 1e-300);
  for (int i = 0; i < frequencies.size(); ++i) {
    if (out.values[i] < floor) {
      throw Error(ErrorKind::numerical, "correlator spectrum turned negative");
    }
    if (out.values[i] < 0.0) out.values[i] = 0.0;
  }
  return out;
}

LorentzianFit fit_lorentzian(const Eigen::VectorXd& omega, const Eigen::VectorXd& values,
                             double center) {
  const auto n = omega.size();
  if (n < 3 || values.size() != n) {
    throw InvalidParameter("lorentzian fit needs at least three matching samples");
  }
  const double peak = values.maxCoeff();
  if (!(peak > 0.0)) throw InvalidParameter("lorentzian fit needs positive data");

  // Initial half-width guess: first grid point that falls below half maximum.
  double guess = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values[i] >= 0.5 * peak) guess = std::max(guess, std::abs(omega[i] - center));
  }
  if (!(guess > 0.0)) guess = std::abs(omega[n - 1] - omega[0]) / static_cast<double>(n);

  // For fixed half-width the amplitude is linear least squares; the width is
  // a 1-d golden-section search on the residual around the guess.
  auto sse = [&](double hw, double* amp_out) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = (omega[i] - center) / hw;
      const double phi = 1.0 / (1.0 + u * u);
      num += phi * (values[i] / peak);
      den += phi * phi;
    }
    const double amp = den > 0.0 ? num / den : 0.0;
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = (omega[i] - center) / hw;
      const double d = values[i] / peak - amp / (1.0 + u * u);
      err += d * d;
    }
    if (amp_out) *amp_out = amp;
    return err;
  };

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(guess / 64.0), hi = std::log(guess * 64.0);
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = sse(std::exp(x1), nullptr), f2 = sse(std::exp(x2), nullptr);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = sse(std::exp(x1), nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = sse(std::exp(x2), nullptr);
    }
  }

  LorentzianFit out;
  out.center = center;
  out.half_width = std::exp(0.5 * (lo + hi));
  double amp = 0.0;
  const double err = sse(out.half_width, &amp);
  out.amplitude = amp * peak;
  out.rms_residual = std::sqrt(err / static_cast<double>(n));
  return out;
}

}  // namespace openres
