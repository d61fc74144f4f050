#pragma once

#include "openres/effective.hpp"
#include "openres/langevin.hpp"
#include "openres/laser.hpp"
#include "openres/types.hpp"

namespace openres {

// Linearised generator of fluctuations x = (delta a, delta a^*) around the
// lasing state, in the frame rotating at omega_bar:
//   L = [[M, 0], [0, M^*]] + gprime * [[abar abar^dag, abar abar^T],
//                                      [abar^* abar^dag, abar^* abar^T]]
// with M = -i (Omega - omega_bar) - Gamma + G^* and
// gprime = dG/dI = -G^*^2 / (G0 I_sat).  The gauge mode (abar, -abar^*) is an
// exact null vector.
struct FluctuationMatrix {
  Eigen::MatrixXcd l_matrix;      // 2N x 2N
  Eigen::VectorXcd amplitude;     // abar
  double intensity = 0.0;
  double omega_bar = 0.0;
  double dgdi = 0.0;              // dG/dI at the operating point, negative

  int n_modes() const { return static_cast<int>(amplitude.size()); }
};

FluctuationMatrix build_fluctuation_matrix(const LasingSolution& solution,
                                           const ModeSpectrum& spectrum,
                                           const DampingMatrix& damping,
                                           const GainMedium& medium);

// Null vector of L and the matching left null vector, u0^dag v0 = 1.
struct ZeroMode {
  Eigen::VectorXcd right;  // v0 = (abar, -abar^*) / |(abar, -abar^*)|
  Eigen::VectorXcd left;   // u0
  double residual = 0.0;   // |L v0| / |L|
  double smallest_eigenvalue = 0.0;  // |mu| closest to zero, relative to |L|
};

ZeroMode zero_mode(const FluctuationMatrix& fluct, const LasingSolution& solution);

// Noise acting on the doubled fluctuation vector.  The vacuum field noise is
// block-diagonal with <F F^dag> = 2 Gamma per block; additional pump noise
// can be layered on top by the caller.
struct DoubledNoise {
  Eigen::MatrixXcd covariance;  // 2N x 2N, Hermitian PSD
};

DoubledNoise vacuum_field_noise(const DampingMatrix& damping);

enum class LinewidthBaseline { half_width_over_intensity, user_value };

// Laser line parameters.  schawlow_townes = gamma_{k*} / (2 I) by default,
// linewidth = petermann * schawlow_townes (the full width of the field
// spectrum's central Lorentzian).  zero_mode_weight stays negative until a
// spectrum attaches it.
struct LinewidthReport {
  double schawlow_townes = 0.0;
  double petermann = 1.0;
  double linewidth = 0.0;
  double zero_mode_weight = -1.0;
};

LinewidthReport linewidth(const LasingSolution& solution,
                          LinewidthBaseline baseline = LinewidthBaseline::half_width_over_intensity,
                          double baseline_value = 0.0);

// Stationary field spectrum S(omega) = int dt e^{i omega t} <a^dag(t) a(0)>
// of the linearised dynamics: a diffusing-phase Lorentzian of weight I and
// half-width D_phi sitting on the narrow side peaks of the damped modes.
struct CorrelatorSpectrum {
  Eigen::VectorXd omega;          // absolute frequencies
  Eigen::VectorXd values;         // S(omega), real and nonnegative
  double phase_diffusion = 0.0;   // D_phi, HWHM of the central Lorentzian
  double zero_mode_weight = 0.0;  // |w_0| / sum_k |w_k|
};

CorrelatorSpectrum correlator_spectrum(const FluctuationMatrix& fluct, const DoubledNoise& noise,
                                       const Eigen::VectorXd& frequencies,
                                       const ResonanceOptions& options = {});

// Least-squares Lorentzian a / (1 + ((w - center)/hw)^2) with fixed center.
struct LorentzianFit {
  double amplitude = 0.0;
  double half_width = 0.0;
  double center = 0.0;
  double rms_residual = 0.0;  // relative to the peak amplitude
};

LorentzianFit fit_lorentzian(const Eigen::VectorXd& omega, const Eigen::VectorXd& values,
                             double center);

}  // namespace openres
