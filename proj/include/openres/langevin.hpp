#pragma once

#include <cstdint>

#include "openres/effective.hpp"
#include "openres/types.hpp"

namespace openres {

// Stationary white-noise covariance <F(t) F^dag(t')> = D delta(t - t').
// With symmetric operator ordering the vacuum input gives D = Gamma; with
// normal ordering it vanishes.
enum class NoiseOrdering { symmetric, normal };

struct NoiseModel {
  Eigen::MatrixXd covariance;  // D, symmetric PSD, proportional to Gamma
  NoiseOrdering ordering = NoiseOrdering::symmetric;

  int n_modes() const { return static_cast<int>(covariance.rows()); }
};

NoiseModel noise_from_coupling(const DampingMatrix& damping, NoiseOrdering ordering);

// One-step exact discretisation of da = A a dt + dF:
//   a(t+dt) = transfer * a(t) + noise_factor * w,   w ~ CN(0, I),
// with transfer = exp(A dt) and noise_factor noise_factor^dag = Q(dt),
// Q(dt) = int_0^dt exp(A s) D exp(A^dag s) ds.  No time-step bias; dt only
// sets the sampling grid.
struct Propagator {
  Eigen::MatrixXcd transfer;
  Eigen::MatrixXcd noise_cov;     // Q(dt)
  Eigen::MatrixXcd noise_factor;  // B with B B^dag = Q(dt)
  double dt = 0.0;
};

Propagator make_propagator(const DynamicalMatrix& dynamical, const NoiseModel& noise, double dt);

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXcd amplitudes;  // column j = a(times[j])
  std::uint64_t seed = 0;
};

Trajectory propagate(const DynamicalMatrix& dynamical, const NoiseModel& noise,
                     const Eigen::VectorXcd& initial, double dt, long n_steps,
                     std::uint64_t seed);

// Time-averaged estimate of C = <a a^dag> from one long trajectory, with a
// batch-means standard error on the entries (largest entry-wise value).
struct CovarianceEstimate {
  Eigen::MatrixXcd matrix;
  long n_samples = 0;
  double standard_error = 0.0;
};

CovarianceEstimate estimate_stationary_covariance(const DynamicalMatrix& dynamical,
                                                  const NoiseModel& noise, double dt,
                                                  long n_steps, long burn_in,
                                                  std::uint64_t seed, int n_batches = 16);

// Closed-form stationary covariance: solves A C + C A^dag + D = 0 through the
// spectral decomposition of A.  Throws MarginallyStable when A has eigenvalues
// too close to the imaginary axis to divide by.
Eigen::MatrixXcd steady_covariance(const DynamicalMatrix& dynamical, const NoiseModel& noise);

// Diagonal (independent-mode) approximation, valid when Gamma's off-diagonal
// part is small against the mode spacing; epsilon reports that ratio.
struct WeakDampingReduction {
  DynamicalMatrix reduced;
  double epsilon = 0.0;
};

WeakDampingReduction weak_damping_reduce(const DynamicalMatrix& dynamical, double spacing);

}  // namespace openres
