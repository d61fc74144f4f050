#pragma once

#include "openres/effective.hpp"
#include "openres/types.hpp"

namespace openres {

// Homogeneously broadened two-level medium, adiabatically eliminated.
// S is the pump (inversion per atom), N the number of atoms, g the
// mode-atom coupling, gamma_perp / gamma_par the polarisation and inversion
// decay rates.  All rates share the units of the mode frequencies.
struct GainMedium {
  double pump_strength = 0.0;   // S in [0, 1]
  double atom_number = 0.0;     // N
  double coupling = 0.0;        // g
  double gamma_perp = 0.0;
  double gamma_par = 0.0;

  void validate() const;
  // G0 = 2 S N g^2 / gamma_perp
  double small_signal_gain() const;
  // I_sat = gamma_par * gamma_perp / (4 g^2)
  double saturation_intensity() const;
};

// Saturated gain G(I) = G0 / (1 + I / I_sat).
double gain(const GainMedium& medium, double intensity);

// Pump strength at which the narrowest resonance starts to lase:
// S_th = gamma_min * gamma_perp / (2 N g^2).
double lasing_threshold(const ResonanceSet& resonances, const GainMedium& medium);

struct SteadyStateOptions {
  // Warn when gamma_perp is not at least this factor above the lasing width
  // (adiabatic elimination becomes questionable).
  double adiabaticity_factor = 10.0;
  // Width gap below which mode competition is unresolved.
  double degenerate_width_tol = 1e-6;
};

// Single-mode steady state above threshold: the resonance with the smallest
// width k* saturates the gain to G* = gamma_{k*}, oscillating at
// omega_bar = omega_{k*} with amplitude abar = sqrt(I) r_{k*} (phase fixed so
// the largest-modulus component of r is real positive) and intensity
// I = I_sat (G0 / gamma_{k*} - 1).
struct LasingSolution {
  int mode_index = -1;
  double omega_bar = 0.0;
  double gain_star = 0.0;
  double intensity = 0.0;
  double petermann = 1.0;
  Eigen::VectorXcd amplitude;     // abar
  Eigen::VectorXcd right_vector;  // phase-fixed r_{k*}
  Eigen::VectorXcd left_vector;   // matching l_{k*}, l^dag r = 1
  double residual = 0.0;          // |M abar| / (|M| |abar|), M = A + (i omega_bar + G*)
  bool adiabaticity_warning = false;
};

LasingSolution steady_state(const ResonanceSet& resonances, const GainMedium& medium,
                            const SteadyStateOptions& options = {});

}  // namespace openres
