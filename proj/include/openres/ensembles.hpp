#pragma once

#include <cstdint>
#include <vector>

#include "openres/rng.hpp"
#include "openres/types.hpp"

namespace openres {

// Closed-cavity mode frequencies around a carrier.  `frequencies` is sorted
// ascending and strictly positive; `mean_spacing` is the empirical mean of
// consecutive differences (or the requested spacing when there is only one
// mode).  The rotating-wave description needs the spectral span to stay small
// against the carrier; `rwa_valid` records that check instead of failing, so
// callers can decide.
struct ModeSpectrum {
  Eigen::VectorXd frequencies;
  double carrier = 0.0;
  double mean_spacing = 0.0;
  double rwa_span_ratio = 0.0;
  bool rwa_valid = true;

  int n_modes() const { return static_cast<int>(frequencies.size()); }
  void validate() const;
};

// Real mode-to-channel coupling amplitudes W, rows = modes, cols = channels.
struct CouplingMatrix {
  Eigen::MatrixXd entries;

  int n_modes() const { return static_cast<int>(entries.rows()); }
  int n_channels() const { return static_cast<int>(entries.cols()); }
};

enum class SpacingReference { wigner_goe, poisson };

struct SpacingStatistics {
  std::vector<double> spacings;  // unfolded to unit mean, sorted ascending
  double ks_statistic = 0.0;
  SpacingReference reference = SpacingReference::wigner_goe;
};

// Dense GOE draw: symmetric, off-diagonal variance 1, diagonal variance 2.
Eigen::MatrixXd goe_matrix(int n, Rng& rng);

// Spectrum of a GOE draw, unfolded so the central half of the eigenvalues has
// mean spacing `mean_spacing`, then shifted to sit at `carrier`.  Throws
// NonPositiveFrequency if the carrier is too small for the resulting span.
ModeSpectrum sample_goe_spectrum(int n_modes, double mean_spacing, double carrier,
                                 std::uint64_t seed, double rwa_threshold = 0.1);

// Gaussian coupling amplitudes with per-channel strength x_m in [0, 1]:
// Var(W_{lm}) = x_m * mean_spacing / (2 pi^2).  `coupling_x` holds either one
// value, broadcast to all channels, or n_channels values.
CouplingMatrix sample_coupling(int n_modes, int n_channels,
                               const std::vector<double>& coupling_x,
                               double mean_spacing, std::uint64_t seed);

// Nearest-neighbour spacings from the central `window` fraction of the
// spectrum (edges are excluded because the unfolding is only flat in the
// bulk), normalised to unit mean, with a Kolmogorov-Smirnov statistic against
// the chosen reference distribution.
SpacingStatistics spacing_statistics(const ModeSpectrum& spectrum, double window = 0.5,
                                     SpacingReference reference = SpacingReference::wigner_goe);

// Wigner surmise CDF, F(s) = 1 - exp(-pi s^2 / 4).
double wigner_cdf(double s);
// Poisson spacing CDF, F(s) = 1 - exp(-s).
double poisson_cdf(double s);
// Two-sided KS statistic of sorted unit-mean spacings against a reference CDF.
double ks_statistic(const std::vector<double>& sorted_spacings, SpacingReference reference);
// Asymptotic KS critical value at significance alpha (alpha in {0.05, 0.01}).
double ks_critical_value(double alpha, std::size_t n);

}  // namespace openres
