#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "openres/ensembles.hpp"

using namespace openres;

TEST_CASE("goe_matrix") {
  Rng rng(11);

  SUBCASE("exactly symmetric") {
    const Eigen::MatrixXd h = goe_matrix(25, rng);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("entry variances 2 on the diagonal, 1 off it") {
    double diag_sq = 0.0, off_sq = 0.0;
    long n_diag = 0, n_off = 0;
    for (int rep = 0; rep < 30; ++rep) {
      const Eigen::MatrixXd h = goe_matrix(60, rng);
      for (int i = 0; i < 60; ++i) {
        diag_sq += h(i, i) * h(i, i);
        ++n_diag;
        for (int j = i + 1; j < 60; ++j) {
          off_sq += h(i, j) * h(i, j);
          ++n_off;
        }
      }
    }
    // chi-square concentration: relative sd of the variance estimate is
    // sqrt(2/n); allow 5 sigma
    CHECK(std::abs(diag_sq / n_diag - 2.0) < 2.0 * 5.0 * std::sqrt(2.0 / n_diag));
    CHECK(std::abs(off_sq / n_off - 1.0) < 5.0 * std::sqrt(2.0 / n_off));
  }

  SUBCASE("eigenvalues invariant under orthogonal conjugation") {
    const Eigen::MatrixXd h = goe_matrix(30, rng);
    Eigen::MatrixXd m(30, 30);
    for (int j = 0; j < 30; ++j) {
      for (int i = 0; i < 30; ++i) m(i, j) = rng.normal();
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
    const Eigen::VectorXd ev0 =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues();
    const Eigen::MatrixXd rotated = q * h * q.transpose();
    const Eigen::VectorXd ev1 =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(rotated, Eigen::EigenvaluesOnly)
            .eigenvalues();
    CHECK((ev0 - ev1).cwiseAbs().maxCoeff() < 1e-10 * ev0.cwiseAbs().maxCoeff());
  }

  SUBCASE("rejects empty dimension") { CHECK_THROWS_AS(goe_matrix(0, rng), TooFewModes); }
}

TEST_CASE("sample_goe_spectrum") {
  SUBCASE("single mode sits at the carrier") {
    const ModeSpectrum s = sample_goe_spectrum(1, 1.0, 100.0, 5);
    REQUIRE(s.n_modes() == 1);
    CHECK(s.frequencies[0] == 100.0);
    CHECK(s.rwa_valid);
  }

  SUBCASE("sorted, positive, centered on the carrier") {
    const ModeSpectrum s = sample_goe_spectrum(80, 0.5, 1000.0, 6);
    REQUIRE(s.n_modes() == 80);
    for (int i = 1; i < 80; ++i) CHECK(s.frequencies[i] > s.frequencies[i - 1]);
    CHECK(s.frequencies[0] > 0.0);
    // the unfolding shifts the spectral center of mass onto the carrier
    CHECK(s.frequencies.mean() == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK_NOTHROW(s.validate());
  }

  SUBCASE("central window has the requested mean spacing exactly") {
    const int n = 100;
    const double spacing = 0.37;
    const ModeSpectrum s = sample_goe_spectrum(n, spacing, 500.0, 7);
    const int lo = n / 4, hi = n - lo;
    const double bulk =
        (s.frequencies[hi - 1] - s.frequencies[lo]) / static_cast<double>(hi - 1 - lo);
    CHECK(bulk == doctest::Approx(spacing).epsilon(1e-12));
  }

  SUBCASE("deterministic in the seed") {
    const ModeSpectrum a = sample_goe_spectrum(40, 1.0, 800.0, 9);
    const ModeSpectrum b = sample_goe_spectrum(40, 1.0, 800.0, 9);
    const ModeSpectrum c = sample_goe_spectrum(40, 1.0, 800.0, 10);
    CHECK((a.frequencies - b.frequencies).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.frequencies - c.frequencies).cwiseAbs().maxCoeff() > 0.0);
  }

  SUBCASE("carrier too small for the span") {
    CHECK_THROWS_AS(sample_goe_spectrum(200, 1.0, 3.0, 8), NonPositiveFrequency);
  }

  SUBCASE("rotating-wave flag trips on a wide spectrum") {
    // span ~ 100 spacings; carrier only 4x that -> ratio ~ 0.25 > 0.1
    const ModeSpectrum wide = sample_goe_spectrum(100, 1.0, 400.0, 12);
    CHECK(!wide.rwa_valid);
    CHECK(wide.rwa_span_ratio > 0.1);
    const ModeSpectrum narrow = sample_goe_spectrum(100, 1.0, 40000.0, 12);
    CHECK(narrow.rwa_valid);
    CHECK(narrow.rwa_span_ratio < 0.1);
  }

  SUBCASE("parameter guards") {
    CHECK_THROWS_AS(sample_goe_spectrum(0, 1.0, 10.0, 1), TooFewModes);
    CHECK_THROWS_AS(sample_goe_spectrum(5, -1.0, 10.0, 1), InvalidParameter);
    CHECK_THROWS_AS(sample_goe_spectrum(5, 1.0, 0.0, 1), InvalidParameter);
  }
}

TEST_CASE("sample_coupling") {
  SUBCASE("entry variance is x * spacing / (2 pi^2)") {
    const double x = 0.36, spacing = 2.5;
    const double want = x * spacing / (2.0 * M_PI * M_PI);
    double sq = 0.0;
    long count = 0;
    for (int rep = 0; rep < 850; ++rep) {
      const CouplingMatrix w = sample_coupling(40, 3, {x}, spacing, 100 + rep);
      sq += w.entries.squaredNorm();
      count += w.entries.size();
    }
    REQUIRE(count >= 100000);  // the law-of-large-numbers regime under test
    CHECK(std::abs(sq / count - want) < 0.05 * want);
  }

  SUBCASE("per-channel strengths scale the columns") {
    const CouplingMatrix w = sample_coupling(500, 2, {0.01, 1.0}, 1.0, 21);
    const double v0 = w.entries.col(0).squaredNorm() / 500.0;
    const double v1 = w.entries.col(1).squaredNorm() / 500.0;
    // ratio of empirical variances tracks the 100x strength ratio
    CHECK(v1 / v0 > 30.0);
    CHECK(v1 / v0 < 300.0);
  }

  SUBCASE("single strength broadcasts to all channels") {
    const CouplingMatrix a = sample_coupling(10, 3, {0.5}, 1.0, 22);
    const CouplingMatrix b = sample_coupling(10, 3, {0.5, 0.5, 0.5}, 1.0, 22);
    CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("deterministic in the seed") {
    const CouplingMatrix a = sample_coupling(15, 2, {1.0}, 1.0, 23);
    const CouplingMatrix b = sample_coupling(15, 2, {1.0}, 1.0, 23);
    CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("closed channels are rejected, not zeroed") {
    CHECK_THROWS_AS(sample_coupling(10, 1, {0.0}, 1.0, 24), InvalidParameter);
    CHECK_THROWS_AS(sample_coupling(10, 1, {-0.2}, 1.0, 24), InvalidParameter);
    CHECK_THROWS_AS(sample_coupling(10, 1, {1.5}, 1.0, 24), InvalidParameter);
  }

  SUBCASE("strength list must match the channel count") {
    CHECK_THROWS_AS(sample_coupling(10, 3, {0.5, 0.5}, 1.0, 25), DimensionMismatch);
  }
}

TEST_CASE("spacing references and KS statistic") {
  SUBCASE("reference CDFs") {
    CHECK(wigner_cdf(0.0) == 0.0);
    CHECK(wigner_cdf(1.0) == doctest::Approx(0.5440618722340038).epsilon(1e-12));
    CHECK(poisson_cdf(1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-12));
  }

  SUBCASE("two-point KS against Wigner, precomputed") {
    const std::vector<double> sp{0.5, 1.5};
    CHECK(ks_statistic(sp, SpacingReference::wigner_goe) ==
          doctest::Approx(0.32918016384706994).epsilon(1e-12));
  }

  SUBCASE("critical values") {
    CHECK(ks_critical_value(0.01, 100) == doctest::Approx(1.6276236307187293 / 10.0).epsilon(1e-12));
    CHECK(ks_critical_value(0.05, 100) == doctest::Approx(1.3581015157406195 / 10.0).epsilon(1e-12));
    CHECK_THROWS_AS(ks_critical_value(0.0, 10), InvalidParameter);
    CHECK_THROWS_AS(ks_critical_value(0.01, 0), InvalidParameter);
  }

  SUBCASE("empty input") {
    CHECK_THROWS_AS(ks_statistic({}, SpacingReference::wigner_goe), InvalidParameter);
  }
}

TEST_CASE("spacing_statistics") {
  ModeSpectrum picket;
  picket.frequencies = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
  picket.carrier = 3.0;
  picket.mean_spacing = 1.0;

  SUBCASE("equally spaced spectrum degenerates to the CDF at 1") {
    const SpacingStatistics st = spacing_statistics(picket, 1.0);
    REQUIRE(st.spacings.size() == 4);
    for (double s : st.spacings) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    // all mass at s=1: D = max(F_W(1), 1 - F_W(1)) = F_W(1)
    CHECK(st.ks_statistic == doctest::Approx(0.5440618722340038).epsilon(1e-12));
    const SpacingStatistics pp = spacing_statistics(picket, 1.0, SpacingReference::poisson);
    CHECK(pp.ks_statistic == doctest::Approx(0.6321205588285577).epsilon(1e-12));
  }

  SUBCASE("normalization holds to 1e-9 on random spectra") {
    const ModeSpectrum s = sample_goe_spectrum(60, 1.0, 1000.0, 31);
    const SpacingStatistics st = spacing_statistics(s, 0.5);
    double mean = 0.0;
    for (double v : st.spacings) mean += v;
    mean /= static_cast<double>(st.spacings.size());
    CHECK(std::abs(mean - 1.0) < 1e-9);
    for (std::size_t i = 1; i < st.spacings.size(); ++i) {
      CHECK(st.spacings[i] >= st.spacings[i - 1]);  // sorted for the KS scan
    }
  }

  SUBCASE("windows that keep fewer than three modes are refused") {
    ModeSpectrum two;
    two.frequencies = Eigen::VectorXd::LinSpaced(2, 1.0, 2.0);
    two.carrier = 1.5;
    two.mean_spacing = 1.0;
    CHECK_THROWS_AS(spacing_statistics(two, 1.0), TooFewModes);
    CHECK_THROWS_AS(spacing_statistics(picket, 0.4), TooFewModes);  // keeps 2 of 5
  }

  SUBCASE("three modes in the window is the minimum") {
    ModeSpectrum three;
    three.frequencies = Eigen::VectorXd::LinSpaced(3, 1.0, 3.0);
    three.carrier = 2.0;
    three.mean_spacing = 1.0;
    CHECK(spacing_statistics(three, 1.0).spacings.size() == 2);
  }

  SUBCASE("window bounds") {
    CHECK_THROWS_AS(spacing_statistics(picket, 0.0), InvalidParameter);
    CHECK_THROWS_AS(spacing_statistics(picket, 1.2), InvalidParameter);
  }
}

TEST_CASE("GOE spacings follow the Wigner surmise, not Poisson") {
  // Pool the central-window spacings of several spectra; each window is
  // unit-mean by construction, so pooling is straightforward.
  std::vector<double> pooled;
  for (int rep = 0; rep < 8; ++rep) {
    const ModeSpectrum s = sample_goe_spectrum(200, 1.0, 10000.0, 400 + rep);
    const SpacingStatistics st = spacing_statistics(s, 0.5);
    pooled.insert(pooled.end(), st.spacings.begin(), st.spacings.end());
  }
  std::sort(pooled.begin(), pooled.end());
  const double crit = ks_critical_value(0.01, pooled.size());
  CHECK(ks_statistic(pooled, SpacingReference::wigner_goe) < crit);
  CHECK(ks_statistic(pooled, SpacingReference::poisson) > crit);
}
