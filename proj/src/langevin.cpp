#include "openres/langevin.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "openres/kernels.hpp"
#include "openres/rng.hpp"

namespace openres {

namespace {

void check_noise(const DynamicalMatrix& dynamical, const NoiseModel& noise) {
  if (noise.n_modes() != dynamical.n_modes()) {
    throw DimensionMismatch("noise covariance is " + std::to_string(noise.n_modes()) +
                            " modes, dynamics has " + std::to_string(dynamical.n_modes()));
  }
  if (!noise.covariance.isApprox(noise.covariance.transpose(), 1e-12)) {
    throw InvalidParameter("noise covariance must be symmetric");
  }
}

// Largest real part of the spectrum, used for stability checks.
double spectral_abscissa(const Eigen::MatrixXcd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigenvalue iteration failed to converge");
  }
  return solver.eigenvalues().real().maxCoeff();
}

}  // namespace

NoiseModel noise_from_coupling(const DampingMatrix& damping, NoiseOrdering ordering) {
  if (damping.n_modes() < 1) throw DimensionMismatch("damping matrix is empty");
  NoiseModel out;
  out.ordering = ordering;
  // <F F^dag> = 2 c Gamma with c = 1/2 (symmetric) or c = 0 (normal): the
  // vacuum carries half a quantum per mode, normally ordered it carries none.
  const double c = ordering == NoiseOrdering::symmetric ? 0.5 : 0.0;
  out.covariance = 2.0 * c * damping.gamma;
  return out;
}

Propagator make_propagator(const DynamicalMatrix& dynamical, const NoiseModel& noise,
                           double dt) {
  const int n = dynamical.n_modes();
  if (n < 1) throw DimensionMismatch("dynamical matrix is empty");
  if (!(dt > 0.0)) throw NonPositiveStep("time step must be positive");
  check_noise(dynamical, noise);

  const double scale = std::max(dynamical.matrix.norm(), 1e-300);
  if (spectral_abscissa(dynamical.matrix) > 1e-10 * scale) {
    throw UnstableDynamics("dynamical matrix has a growing eigenvalue");
  }

  // Van Loan block trick: exp(dt [[A, D], [0, -A^dag]]) has top row
  // [exp(A dt), G] with G exp(A^dag dt) = int_0^dt exp(A s) D exp(A^dag s) ds,
  // which is exactly the covariance the noise accumulates over one step.
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = dynamical.matrix;
  block.topRightCorner(n, n) = noise.covariance.cast<Complex>();
  block.bottomRightCorner(n, n) = -dynamical.matrix.adjoint();
  const Eigen::MatrixXcd big = (block * dt).exp();

  Propagator out;
  out.dt = dt;
  out.transfer = big.topLeftCorner(n, n);
  out.noise_cov = big.topRightCorner(n, n) * out.transfer.adjoint();
  out.noise_cov = 0.5 * (out.noise_cov + out.noise_cov.adjoint()).eval();

  // Q is Hermitian PSD up to roundoff; clamp what roundoff pushed below zero.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(out.noise_cov);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "noise covariance factorisation failed");
  }
  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
  out.noise_factor = eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal();
  return out;
}

Trajectory propagate(const DynamicalMatrix& dynamical, const NoiseModel& noise,
                     const Eigen::VectorXcd& initial, double dt, long n_steps,
                     std::uint64_t seed) {
  const int n = dynamical.n_modes();
  if (initial.size() != n) {
    throw DimensionMismatch("initial state has " + std::to_string(initial.size()) +
                            " modes, dynamics has " + std::to_string(n));
  }
  if (n_steps < 1) throw InvalidParameter("need at least one step");
  const Propagator prop = make_propagator(dynamical, noise, dt);

  Trajectory out;
  out.seed = seed;
  out.times.resize(n_steps + 1);
  out.amplitudes.resize(n, n_steps + 1);
  out.amplitudes.col(0) = initial;

  Rng rng(seed);
  Eigen::VectorXcd state = initial;
  Eigen::VectorXcd drift(n), kick(n), w(n);
  for (long step = 0; step < n_steps; ++step) {
    kernels::cgemv(prop.transfer.data(), n, state.data(), drift.data());
    for (int i = 0; i < n; ++i) w[i] = rng.complex_normal();
    kernels::cgemv(prop.noise_factor.data(), n, w.data(), kick.data());
    state = drift + kick;
    out.amplitudes.col(step + 1) = state;
    out.times[step + 1] = static_cast<double>(step + 1) * dt;
  }
  out.times[0] = 0.0;
  return out;
}

CovarianceEstimate estimate_stationary_covariance(const DynamicalMatrix& dynamical,
                                                  const NoiseModel& noise, double dt,
                                                  long n_steps, long burn_in,
                                                  std::uint64_t seed, int n_batches) {
  const int n = dynamical.n_modes();
  if (n_batches < 2) throw InvalidParameter("need at least two batches for an error bar");
  if (burn_in < 0) throw InvalidParameter("burn-in must be nonnegative");
  const long batch_len = n_steps / n_batches;
  if (batch_len < 1) {
    throw InvalidParameter("need at least one sample per batch: " + std::to_string(n_steps) +
                           " steps over " + std::to_string(n_batches) + " batches");
  }
  const Propagator prop = make_propagator(dynamical, noise, dt);

  Rng rng(seed);
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd drift(n), kick(n), w(n);
  auto advance = [&]() {
    kernels::cgemv(prop.transfer.data(), n, state.data(), drift.data());
    for (int i = 0; i < n; ++i) w[i] = rng.complex_normal();
    kernels::cgemv(prop.noise_factor.data(), n, w.data(), kick.data());
    state = drift + kick;
  };

  for (long step = 0; step < burn_in; ++step) advance();

  std::vector<Eigen::MatrixXcd> batch_means;
  batch_means.reserve(n_batches);
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
  for (int b = 0; b < n_batches; ++b) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (long step = 0; step < batch_len; ++step) {
      advance();
      kernels::rank1_accumulate(acc.data(), state.data(), n);
    }
    total += acc;
    batch_means.push_back(acc / static_cast<double>(batch_len));
  }

  CovarianceEstimate out;
  out.n_samples = batch_len * n_batches;
  out.matrix = total / static_cast<double>(out.n_samples);
  // Batch means tame the autocorrelation of the chain; their scatter gives a
  // defensible error bar per entry, reported as the worst entry.
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double var = 0.0;
      for (const auto& bm : batch_means) var += std::norm(bm(i, j) - out.matrix(i, j));
      var /= static_cast<double>(n_batches) * static_cast<double>(n_batches - 1);
      worst = std::max(worst, std::sqrt(var));
    }
  }
  out.standard_error = worst;
  return out;
}

Eigen::MatrixXcd steady_covariance(const DynamicalMatrix& dynamical, const NoiseModel& noise) {
  const int n = dynamical.n_modes();
  if (n < 1) throw DimensionMismatch("dynamical matrix is empty");
  check_noise(dynamical, noise);
  if (noise.covariance.isZero(0.0)) return Eigen::MatrixXcd::Zero(n, n);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dynamical.matrix, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigenvalue iteration failed to converge");
  }
  const Eigen::VectorXcd nu = solver.eigenvalues();
  const double scale = std::max(dynamical.matrix.norm(), 1e-300);
  if (nu.real().maxCoeff() >= -1e-12 * scale) {
    throw MarginallyStable("stationary covariance undefined: slowest mode has Re nu = " +
                           std::to_string(nu.real().maxCoeff()));
  }
  const Eigen::MatrixXcd r = solver.eigenvectors();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(r);
  const Eigen::MatrixXcd rinv = lu.inverse();

  // Solve A C + C A^dag + D = 0 spectrally: in the eigenbasis each entry
  // divides by -(nu_j + conj(nu_k)), which stability keeps away from zero.
  Eigen::MatrixXcd core = rinv * noise.covariance.cast<Complex>() * rinv.adjoint();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      core(j, k) /= -(nu[j] + std::conj(nu[k]));
    }
  }
  Eigen::MatrixXcd c = r * core * r.adjoint();
  return 0.5 * (c + c.adjoint()).eval();
}

WeakDampingReduction weak_damping_reduce(const DynamicalMatrix& dynamical, double spacing) {
  const int n = dynamical.n_modes();
  if (n < 1) throw DimensionMismatch("dynamical matrix is empty");
  if (!(spacing > 0.0)) {
    throw InvalidParameter("weak-damping reduction needs a positive mean spacing");
  }
  WeakDampingReduction out;
  out.reduced.mean_spacing = dynamical.mean_spacing;
  out.reduced.matrix = dynamical.matrix.diagonal().asDiagonal();
  // Off-diagonal entries of A are exactly -Gamma's; their size against the
  // spacing is the small parameter of the diagonal approximation.
  double off = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) off = std::max(off, std::abs(dynamical.matrix(i, j)));
    }
  }
  out.epsilon = off / spacing;
  return out;
}

}  // namespace openres
