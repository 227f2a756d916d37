#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "circkde/catalogue.hpp"
#include "circkde/kde.hpp"
#include "circkde/special_functions.hpp"
#include "oracles.hpp"

using namespace circkde;

namespace {

constexpr double kPi = std::numbers::pi;

double oracle_kde(const AngleSample& s, double nu, double theta) {
  double sum = 0.0;
  for (double x : s) {
    sum += oracle::von_mises(theta, x, nu);
  }
  return sum / static_cast<double>(s.size());
}

AngleSample draw(const char* id, std::size_t n, std::uint64_t stream) {
  Rng rng(31, stream);
  return sample(catalogue_model(id), n, rng);
}

}  // namespace

TEST(Kde, SingleObservationIsVonMises) {
  const KdeFit fit({1.1}, 3.5);
  for (double t = 0.0; t < kTwoPi; t += 0.4) {
    EXPECT_NEAR(fit.evaluate(t), oracle::von_mises(t, 1.1, 3.5), 1e-14);
  }
}

TEST(Kde, ZeroConcentrationIsUniform) {
  const KdeFit fit({0.3, 2.0, 5.0}, 0.0);
  for (double t = 0.0; t < kTwoPi; t += 0.4) {
    EXPECT_DOUBLE_EQ(fit.evaluate(t), 1.0 / (2 * kPi));
  }
}

TEST(Kde, ThreePointValue) {
  const KdeFit fit({0.0, 1.0, 2.0}, 2.0);
  EXPECT_NEAR(fit.evaluate(1.0), oracle_kde({0.0, 1.0, 2.0}, 2.0, 1.0), 1e-14);
  EXPECT_NEAR(fit.evaluate(1.0), 0.30910480368340144, 1e-14);
}

TEST(Kde, AgreesWithOracleAcrossConcentrations) {
  const auto s = draw("M12", 60, 1);
  for (double nu : {0.01, 0.7, 12.0, 90.0}) {
    const KdeFit fit(s, nu);
    for (double t = 0.05; t < kTwoPi; t += 0.5) {
      const double ref = oracle_kde(s, nu, t);
      EXPECT_NEAR(fit.evaluate(t), ref, 1e-11 * (1.0 + ref)) << nu;
    }
  }
}

TEST(Kde, LargeConcentrationStaysFinite) {
  const KdeFit fit({0.0, 3.0}, kKappaCap);
  EXPECT_TRUE(std::isfinite(fit.evaluate(0.0)));
  EXPECT_GT(fit.evaluate(0.0), 0.0);
  EXPECT_EQ(fit.evaluate(1.5), 0.0);
}

TEST(Kde, RejectsInvalidInput) {
  EXPECT_THROW(KdeFit({}, 1.0), std::invalid_argument);
  EXPECT_THROW(KdeFit({0.0}, -1.0), std::invalid_argument);
  EXPECT_THROW(KdeFit({0.0}, 2 * kKappaCap), std::invalid_argument);
  EXPECT_THROW(check_gridsize(1000), std::invalid_argument);
  EXPECT_THROW(check_gridsize(4), std::invalid_argument);
  EXPECT_NO_THROW(check_gridsize(8));
}

TEST(Kde, GridMatchesPointwiseAndIntegratesToOne) {
  const auto s = draw("M7", 150, 2);
  for (double nu : {0.5, 8.0, 60.0}) {
    const KdeFit fit(s, nu);
    const auto grid = kde_grid(fit);
    ASSERT_EQ(grid.size(), kDefaultGridSize);
    for (std::size_t k = 0; k < grid.size(); k += 37) {
      EXPECT_NEAR(grid.values[k], fit.evaluate(grid.theta(k)), 1e-13);
    }
    EXPECT_NEAR(grid.integral(), 1.0, 1e-6);
    const auto fast = KdeGridEvaluator(s, kDefaultGridSize).grid(nu);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      ASSERT_NEAR(fast.values[k], grid.values[k], 1e-13);
    }
  }
}

TEST(Kde, EqualsMixtureRepresentation) {
  const auto s = draw("M15", 40, 3);
  const KdeFit fit(s, 6.0);
  const auto mix = fit.as_mixture();
  EXPECT_EQ(mix.size(), s.size());
  for (double t = 0.0; t < kTwoPi; t += 0.3) {
    EXPECT_NEAR(fit.evaluate(t), density(mix, t), 1e-12);
  }
}

TEST(Kde, RotationEquivariance) {
  const auto s = draw("M9", 80, 4);
  const double phi = 2.4;
  const KdeFit a(s, 5.0);
  const KdeFit b(rotate(s, phi), 5.0);
  for (double t = 0.0; t < kTwoPi; t += 0.3) {
    EXPECT_NEAR(b.evaluate(t + phi), a.evaluate(t), 1e-12);
  }
}

TEST(Kde, PeakGrowsWithConcentration) {
  const KdeFit lo({1.0}, 2.0);
  const KdeFit hi({1.0}, 20.0);
  EXPECT_GT(hi.evaluate(1.0), lo.evaluate(1.0));
}

TEST(Ise, ZeroForIdenticalGrids) {
  const auto g = density_grid(catalogue_model("M7"));
  EXPECT_EQ(ise(g, g), 0.0);
  EXPECT_THROW((void)ise(g, density_grid(catalogue_model("M7"), 512)), std::invalid_argument);
}

TEST(Ise, UniformAgainstVonMises) {
  const double i0_1 = oracle::bessel(0, 1.0);
  const double i0_2 = oracle::bessel(0, 2.0);
  // int (f - 1/2pi)^2 = int f^2 - 1/2pi, with int f^2 = I0(2) / (2 pi I0(1)^2).
  const double expected = i0_2 / (2 * kPi * i0_1 * i0_1) - 1.0 / (2 * kPi);
  const double got = ise(density_grid(catalogue_model("M1")), density_grid(VonMisesMixture::single({0.0, 1.0})));
  EXPECT_NEAR(got, expected, 1e-12);
  EXPECT_NEAR(got, 0.067186130555254785, 1e-12);
}

TEST(Ise, StableUnderGridRefinement) {
  const auto s = draw("M7", 100, 5);
  const KdeFit fit(s, 10.0);
  const auto& m = catalogue_model("M7");
  const double coarse = ise(kde_grid(fit, 1024), density_grid(m, 1024));
  const double fine = ise(kde_grid(fit, 4096), density_grid(m, 4096));
  EXPECT_NEAR(coarse / fine, 1.0, 1e-8);
}
