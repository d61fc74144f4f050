#pragma once

#include "openres/ensembles.hpp"
#include "openres/types.hpp"

namespace openres {

// Damping kernel Gamma = pi * W W^T, symmetric positive semidefinite with
// rank <= n_channels.
struct DampingMatrix {
  Eigen::MatrixXd gamma;

  int n_modes() const { return static_cast<int>(gamma.rows()); }
};

// Generator of the mode dynamics, A = -i diag(omega) - Gamma, in the frame
// where all frequencies are absolute.  `mean_spacing` travels along as the
// natural scale for overlap and degeneracy checks.
struct DynamicalMatrix {
  Eigen::MatrixXcd matrix;
  double mean_spacing = 0.0;

  int n_modes() const { return static_cast<int>(matrix.rows()); }
};

struct ResonanceOptions {
  // Relative eigenvalue gap below which the matrix is treated as defective.
  double degeneracy_tol = 1e-12;
  // Condition number of the eigenvector matrix above which the bi-orthogonal
  // system is numerically meaningless.
  double max_condition = 1e8;
};

// Spectral decomposition of a damped mode system.  Right eigenvectors have
// unit norm, left ones are scaled so l_k^dag r_k = 1; modes are sorted by
// frequency (ties by width).  petermann[k] = (l^dag l)(r^dag r)/|l^dag r|^2
// >= 1 measures mode non-orthogonality.
struct ResonanceSet {
  Eigen::VectorXcd eigenvalues;   // nu_k = -i omega_k - gamma_k
  Eigen::VectorXd omegas;         // -Im nu
  Eigen::VectorXd gammas;         // -Re nu
  Eigen::VectorXd petermann;
  Eigen::MatrixXcd right;         // columns r_k
  Eigen::MatrixXcd left;          // columns l_k
  Eigen::MatrixXcd generator;     // the decomposed matrix A
  double mean_spacing = 0.0;
  double condition = 0.0;         // cond estimate of the right-vector matrix
  double overlap_ratio = 0.0;     // mean(2 gamma) / mean_spacing

  int n_modes() const { return static_cast<int>(eigenvalues.size()); }
};

DampingMatrix build_damping(const CouplingMatrix& coupling);

DynamicalMatrix build_dynamical(const ModeSpectrum& spectrum, const DampingMatrix& damping);

// Eigenvalues only (no vectors); cheap path for width statistics on large
// systems.
Eigen::VectorXcd dynamical_eigenvalues(const DynamicalMatrix& dynamical);

// Full bi-orthogonal decomposition.  Throws NearDefective when eigenvalues
// collide or the eigenvector matrix condition exceeds options.max_condition.
ResonanceSet resonances(const DynamicalMatrix& dynamical, const ResonanceOptions& options = {});

double petermann_factor(const Eigen::VectorXcd& left, const Eigen::VectorXcd& right);

}  // namespace openres
