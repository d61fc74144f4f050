#include "openres/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace openres {

DampingMatrix build_damping(const CouplingMatrix& coupling) {
  if (coupling.n_modes() < 1 || coupling.n_channels() < 1) {
    throw DimensionMismatch("coupling matrix is empty");
  }
  DampingMatrix out;
  // Gamma = pi W W^T; build one triangle and mirror so it is symmetric to the
  // last bit.
  out.gamma = Eigen::MatrixXd::Zero(coupling.n_modes(), coupling.n_modes());
  out.gamma.selfadjointView<Eigen::Lower>().rankUpdate(coupling.entries, M_PI);
  out.gamma.triangularView<Eigen::StrictlyUpper>() =
      out.gamma.transpose().triangularView<Eigen::StrictlyUpper>();
  return out;
}

DynamicalMatrix build_dynamical(const ModeSpectrum& spectrum, const DampingMatrix& damping) {
  spectrum.validate();
  if (damping.n_modes() != spectrum.n_modes()) {
    throw DimensionMismatch("damping matrix is " + std::to_string(damping.n_modes()) +
                            " modes, spectrum has " + std::to_string(spectrum.n_modes()));
  }
  DynamicalMatrix out;
  out.mean_spacing = spectrum.mean_spacing;
  out.matrix = -damping.gamma.cast<Complex>();
  for (int k = 0; k < spectrum.n_modes(); ++k) {
    out.matrix(k, k) -= Complex(0.0, spectrum.frequencies[k]);
  }
  return out;
}

Eigen::VectorXcd dynamical_eigenvalues(const DynamicalMatrix& dynamical) {
  if (dynamical.n_modes() < 1) throw DimensionMismatch("dynamical matrix is empty");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dynamical.matrix, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigenvalue iteration failed to converge");
  }
  Eigen::VectorXcd values = solver.eigenvalues();
  // Sort by resonance frequency, then width, so output order is reproducible.
  std::sort(values.data(), values.data() + values.size(), [](Complex a, Complex b) {
    if (-a.imag() != -b.imag()) return -a.imag() < -b.imag();
    return -a.real() < -b.real();
  });
  return values;
}

double petermann_factor(const Eigen::VectorXcd& left, const Eigen::VectorXcd& right) {
  if (left.size() != right.size() || left.size() == 0) {
    throw DimensionMismatch("left/right vector sizes disagree");
  }
  const double product = std::abs(left.dot(right));
  if (product < 1e-12 * left.norm() * right.norm()) {
    throw DegenerateVectors("left and right vectors are near-orthogonal (exceptional point)");
  }
  return left.squaredNorm() * right.squaredNorm() / (product * product);
}

ResonanceSet resonances(const DynamicalMatrix& dynamical, const ResonanceOptions& options) {
  const int n = dynamical.n_modes();
  if (n < 1) throw DimensionMismatch("dynamical matrix is empty");
  if (!(options.degeneracy_tol > 0.0) || !(options.max_condition > 1.0)) {
    throw InvalidParameter("resonance options must be positive");
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dynamical.matrix, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigenvalue iteration failed to converge");
  }
  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();
  const double scale = std::max(dynamical.matrix.norm(), 1e-300);

  // Eigenvalue collisions make the eigenvector basis meaningless; find the
  // closest pair before trusting it.
  double min_gap = std::numeric_limits<double>::infinity();
  Complex gap_a = 0.0, gap_b = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double gap = std::abs(values[j] - values[k]);
      if (gap < min_gap) {
        min_gap = gap;
        gap_a = values[j];
        gap_b = values[k];
      }
    }
  }
  if (n > 1 && min_gap <= options.degeneracy_tol * scale) {
    throw NearDefective("eigenvalue gap " + std::to_string(min_gap) +
                            " below degeneracy tolerance; matrix is numerically defective",
                        gap_a, gap_b, std::numeric_limits<double>::infinity());
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(vectors);
  const Eigen::MatrixXcd inverse = lu.inverse();
  // 1-norm condition of the eigenvector matrix; explicit since the inverse is
  // needed anyway for the left vectors.
  const double condition = vectors.cwiseAbs().colwise().sum().maxCoeff() *
                           inverse.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(condition) || condition > options.max_condition) {
    throw NearDefective("eigenvector matrix condition " + std::to_string(condition) +
                            " exceeds limit " + std::to_string(options.max_condition),
                        gap_a, gap_b, condition);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double wa = -values[a].imag(), wb = -values[b].imag();
    if (wa != wb) return wa < wb;
    const double ga = -values[a].real(), gb = -values[b].real();
    if (ga != gb) return ga < gb;
    return a < b;
  });

  ResonanceSet out;
  out.generator = dynamical.matrix;
  out.mean_spacing = dynamical.mean_spacing;
  out.condition = condition;
  out.eigenvalues.resize(n);
  out.omegas.resize(n);
  out.gammas.resize(n);
  out.petermann.resize(n);
  out.right.resize(n, n);
  out.left.resize(n, n);

  for (int k = 0; k < n; ++k) {
    const int p = order[k];
    const double vec_norm = vectors.col(p).norm();
    if (!(vec_norm > 0.0)) throw DegenerateVectors("eigenvector has zero norm");
    out.eigenvalues[k] = values[p];
    out.omegas[k] = -values[p].imag();
    out.gammas[k] = -values[p].real();
    // Unit right vector; left vector rescaled to keep l^dag r = 1 exactly
    // (rows of the inverse are bi-orthogonal to the columns).
    out.right.col(k) = vectors.col(p) / vec_norm;
    out.left.col(k) = inverse.row(p).adjoint() * vec_norm;
    out.petermann[k] = petermann_factor(out.left.col(k), out.right.col(k));
  }

  if (dynamical.mean_spacing > 0.0) {
    out.overlap_ratio = 2.0 * out.gammas.mean() / dynamical.mean_spacing;
  }
  return out;
}

}  // namespace openres
