#include "openres/laser.hpp"

#include <cmath>
#include <limits>

namespace openres {

void GainMedium::validate() const {
  std::string problems;
  auto complain = [&](const std::string& p) {
    if (!problems.empty()) problems += "; ";
    problems += p;
  };
  if (!(pump_strength >= 0.0) || !(pump_strength <= 1.0)) {
    complain("pump strength must lie in [0, 1]");
  }
  if (!(atom_number > 0.0)) complain("atom number must be positive");
  if (!(coupling > 0.0)) complain("mode-atom coupling must be positive");
  if (!(gamma_perp > 0.0)) complain("gamma_perp must be positive");
  if (!(gamma_par > 0.0)) complain("gamma_par must be positive");
  if (!problems.empty()) throw InvalidParameter("gain medium: " + problems);
}

double GainMedium::small_signal_gain() const {
  return 2.0 * pump_strength * atom_number * coupling * coupling / gamma_perp;
}

double GainMedium::saturation_intensity() const {
  return gamma_par * gamma_perp / (4.0 * coupling * coupling);
}

double gain(const GainMedium& medium, double intensity) {
  medium.validate();
  if (intensity < 0.0) throw NegativeIntensity("intensity must be nonnegative");
  return medium.small_signal_gain() / (1.0 + intensity / medium.saturation_intensity());
}

double lasing_threshold(const ResonanceSet& resonances, const GainMedium& medium) {
  medium.validate();
  if (resonances.n_modes() < 1) throw DimensionMismatch("resonance set is empty");
  const double gamma_min = resonances.gammas.minCoeff();
  if (!(gamma_min > 0.0)) {
    throw InvalidParameter("narrowest resonance has no loss; threshold undefined");
  }
  return gamma_min * medium.gamma_perp / (2.0 * medium.atom_number * medium.coupling * medium.coupling);
}

LasingSolution steady_state(const ResonanceSet& resonances, const GainMedium& medium,
                            const SteadyStateOptions& options) {
  medium.validate();
  const int n = resonances.n_modes();
  if (n < 1) throw DimensionMismatch("resonance set is empty");

  // The survivor of mode competition is the narrowest resonance: gain clamps
  // at the first width it reaches.
  int star = 0;
  for (int k = 1; k < n; ++k) {
    if (resonances.gammas[k] < resonances.gammas[star]) star = k;
  }
  const double gamma_star = resonances.gammas[star];
  if (!(gamma_star > 0.0)) {
    throw InvalidParameter("selected resonance has nonpositive width");
  }

  if (n > 1 && resonances.mean_spacing > 0.0) {
    double runner_up = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      if (k != star) runner_up = std::min(runner_up, resonances.gammas[k]);
    }
    if (runner_up - gamma_star < options.degenerate_width_tol * resonances.mean_spacing) {
      throw NearDegenerateLasingMode(
          "two resonances compete within width gap " + std::to_string(runner_up - gamma_star) +
          "; single-mode selection is unreliable");
    }
  }

  const double g0 = medium.small_signal_gain();
  if (g0 <= gamma_star) {
    throw BelowThreshold("small-signal gain " + std::to_string(g0) +
                         " does not reach the narrowest width " + std::to_string(gamma_star));
  }

  LasingSolution out;
  out.mode_index = star;
  out.omega_bar = resonances.omegas[star];
  out.gain_star = gamma_star;  // G(I) = gamma at the operating point
  out.intensity = medium.saturation_intensity() * (g0 / gamma_star - 1.0);

  // Fix the overall phase: rotate so the largest-modulus component of r is
  // real positive, scaling l the same way to keep l^dag r = 1.
  Eigen::VectorXcd r = resonances.right.col(star);
  Eigen::VectorXcd l = resonances.left.col(star);
  int pivot = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(r[i]) > std::abs(r[pivot])) pivot = i;
  }
  const Complex phase = std::conj(r[pivot]) / std::abs(r[pivot]);
  r *= phase;
  l *= phase;
  out.right_vector = r;
  out.left_vector = l;
  out.petermann = petermann_factor(l, r);
  out.amplitude = std::sqrt(out.intensity) * r;

  // abar must be a null vector of M = A + i omega_bar + G*: the eigenvalue
  // relation guarantees it, so a large residual means the decomposition and
  // the generator have drifted apart.
  Eigen::MatrixXcd m = resonances.generator;
  m.diagonal().array() += Complex(gamma_star, out.omega_bar);
  const double m_norm = std::max(m.norm(), 1e-300);
  out.residual = (m * out.amplitude).norm() / (m_norm * out.amplitude.norm());
  if (!(out.residual <= 1e-8)) {
    throw Error(ErrorKind::numerical,
                "lasing state fails M abar = 0: relative residual " + std::to_string(out.residual));
  }

  // Adiabatic elimination of the medium needs the atoms to respond faster
  // than any mode decays.
  out.adiabaticity_warning = std::min(medium.gamma_perp, medium.gamma_par) <
                             options.adiabaticity_factor * resonances.gammas.maxCoeff();
  return out;
}

}  // namespace openres
