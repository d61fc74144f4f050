#include "openres/ensembles.hpp"

#include <algorithm>
#include <cmath>

namespace openres {

void ModeSpectrum::validate() const {
  if (frequencies.size() < 1) throw TooFewModes("mode spectrum is empty");
  if (!(carrier > 0.0)) throw InvalidParameter("carrier frequency must be positive");
  if (!(mean_spacing > 0.0)) throw InvalidParameter("mean spacing must be positive");
  if (frequencies[0] <= 0.0) {
    throw NonPositiveFrequency("lowest mode frequency " + std::to_string(frequencies[0]) +
                               " is not positive");
  }
  for (int i = 1; i < frequencies.size(); ++i) {
    if (frequencies[i] < frequencies[i - 1]) {
      throw InvalidParameter("mode frequencies must be sorted ascending");
    }
  }
}

Eigen::MatrixXd goe_matrix(int n, Rng& rng) {
  if (n < 1) throw TooFewModes("GOE dimension must be at least 1");
  Eigen::MatrixXd h(n, n);
  // Upper triangle in row-major order so the draw sequence is pinned.
  for (int i = 0; i < n; ++i) {
    h(i, i) = std::sqrt(2.0) * rng.normal();
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.normal();
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

ModeSpectrum sample_goe_spectrum(int n_modes, double mean_spacing, double carrier,
                                 std::uint64_t seed, double rwa_threshold) {
  if (n_modes < 1) throw TooFewModes("need at least one mode");
  if (!(mean_spacing > 0.0)) throw InvalidParameter("mean spacing must be positive");
  if (!(carrier > 0.0)) throw InvalidParameter("carrier frequency must be positive");
  if (!(rwa_threshold > 0.0)) throw InvalidParameter("rwa threshold must be positive");

  ModeSpectrum out;
  out.carrier = carrier;
  out.mean_spacing = mean_spacing;

  if (n_modes == 1) {
    out.frequencies = Eigen::VectorXd::Constant(1, carrier);
    out.rwa_span_ratio = 0.0;
    out.rwa_valid = true;
    return out;
  }

  Rng rng(seed);
  const Eigen::MatrixXd h = goe_matrix(n_modes, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd levels = solver.eigenvalues();  // ascending

  // Unfold against the central half of the spectrum: the semicircle edge
  // stretches spacings, so only the bulk is held to `mean_spacing`.
  const int lo = n_modes / 4;
  const int hi = n_modes - lo;
  const double bulk_spacing = (levels[hi - 1] - levels[lo]) / static_cast<double>(hi - 1 - lo);
  if (!(bulk_spacing > 0.0)) {
    throw InvalidParameter("degenerate GOE draw: central spectrum has zero span");
  }
  const double scale = mean_spacing / bulk_spacing;
  const double center = levels.mean();

  out.frequencies = (levels.array() - center) * scale + carrier;
  if (out.frequencies[0] <= 0.0) {
    throw NonPositiveFrequency(
        "carrier " + std::to_string(carrier) + " too small: lowest mode frequency " +
        std::to_string(out.frequencies[0]) + " is not positive");
  }

  const double span = out.frequencies[n_modes - 1] - out.frequencies[0];
  out.rwa_span_ratio = span / carrier;
  out.rwa_valid = out.rwa_span_ratio < rwa_threshold;
  return out;
}

CouplingMatrix sample_coupling(int n_modes, int n_channels,
                               const std::vector<double>& coupling_x,
                               double mean_spacing, std::uint64_t seed) {
  if (n_modes < 1) throw TooFewModes("need at least one mode");
  if (n_channels < 1) throw InvalidParameter("need at least one channel");
  if (!(mean_spacing > 0.0)) throw InvalidParameter("mean spacing must be positive");
  if (coupling_x.size() != 1 && coupling_x.size() != static_cast<std::size_t>(n_channels)) {
    throw DimensionMismatch("coupling_x must hold one value or one per channel (" +
                            std::to_string(n_channels) + "), got " +
                            std::to_string(coupling_x.size()));
  }
  for (double x : coupling_x) {
    // A closed cavity is modelled by omitting the channel, not by x = 0.
    if (!(x > 0.0) || !(x <= 1.0)) {
      throw InvalidParameter("coupling strength x must lie in (0, 1], got " + std::to_string(x));
    }
  }

  Rng rng(seed);
  CouplingMatrix out;
  out.entries.resize(n_modes, n_channels);
  for (int m = 0; m < n_channels; ++m) {
    const double x = coupling_x.size() == 1 ? coupling_x[0] : coupling_x[m];
    // Var(W_{lm}) = x * mean_spacing / (2 pi^2); at x = 1 the induced mean
    // width matches the Weisskopf estimate M * mean_spacing / (2 pi) per
    // open channel.
    const double sigma = std::sqrt(x * mean_spacing / (2.0 * M_PI * M_PI));
    for (int l = 0; l < n_modes; ++l) {
      out.entries(l, m) = sigma * rng.normal();
    }
  }
  return out;
}

double wigner_cdf(double s) {
  if (s <= 0.0) return 0.0;
  return 1.0 - std::exp(-M_PI * s * s / 4.0);
}

double poisson_cdf(double s) {
  if (s <= 0.0) return 0.0;
  return 1.0 - std::exp(-s);
}

double ks_statistic(const std::vector<double>& sorted_spacings, SpacingReference reference) {
  if (sorted_spacings.empty()) throw InvalidParameter("no spacings for KS statistic");
  const auto cdf = reference == SpacingReference::wigner_goe ? wigner_cdf : poisson_cdf;
  const double n = static_cast<double>(sorted_spacings.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_spacings.size(); ++i) {
    const double f = cdf(sorted_spacings[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
  if (n == 0) throw InvalidParameter("KS critical value needs at least one sample");
  // Asymptotic inverse of the Kolmogorov distribution; 1.6276/sqrt(n) at 1%.
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

SpacingStatistics spacing_statistics(const ModeSpectrum& spectrum, double window,
                                     SpacingReference reference) {
  spectrum.validate();
  if (!(window > 0.0) || window > 1.0) {
    throw InvalidParameter("spacing window must lie in (0, 1]");
  }
  const int n = spectrum.n_modes();
  const int count = std::max(2, static_cast<int>(std::floor(n * window + 0.5)));
  if (count > n || count < 3) {
    throw TooFewModes("spacing window keeps " + std::to_string(std::min(count, n)) +
                      " modes; need at least 3");
  }
  const int lo = (n - count) / 2;

  SpacingStatistics out;
  out.reference = reference;
  out.spacings.reserve(count - 1);
  double mean = 0.0;
  for (int i = lo; i + 1 < lo + count; ++i) {
    const double s = spectrum.frequencies[i + 1] - spectrum.frequencies[i];
    out.spacings.push_back(s);
    mean += s;
  }
  mean /= static_cast<double>(out.spacings.size());
  if (!(mean > 0.0)) throw InvalidParameter("degenerate spectrum: mean spacing is zero");
  for (double& s : out.spacings) s /= mean;
  std::sort(out.spacings.begin(), out.spacings.end());
  out.ks_statistic = ks_statistic(out.spacings, reference);
  return out;
}

}  // namespace openres
