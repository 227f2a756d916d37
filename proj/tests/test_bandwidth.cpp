#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "circkde/bandwidth.hpp"
#include "circkde/catalogue.hpp"
#include "circkde/special_functions.hpp"
#include "oracles.hpp"

using namespace circkde;

namespace {

constexpr double kPi = std::numbers::pi;

// Exact integral of the squared second derivative of vM(mu, kappa).
double vm_curvature(double kappa) {
  const double i0 = oracle::bessel(0, kappa);
  return (3.0 * kappa * kappa * oracle::bessel(2, 2.0 * kappa) + 2.0 * kappa * oracle::bessel(1, 2.0 * kappa)) /
         (8.0 * kPi * i0 * i0);
}

// Curvature implied by the rule-of-thumb formula.
double rt_curvature(double kappa) {
  const double i0 = oracle::bessel(0, kappa);
  return 3.0 * kappa * kappa * oracle::bessel(2, 2.0 * kappa) / (8.0 * kPi * i0 * i0);
}

double oracle_rt(double kappa, double n) {
  const double i0 = oracle::bessel(0, kappa);
  return std::pow(3.0 * n * kappa * kappa * oracle::bessel(2, 2.0 * kappa) / (4.0 * std::sqrt(kPi) * i0 * i0), 0.4);
}

AngleSample draw(const char* id, std::size_t n, std::uint64_t stream) {
  Rng rng(47, stream);
  return sample(catalogue_model(id), n, rng);
}

double model_ise(const ModelSpec& m, const AngleSample& s, double nu) {
  return ise(kde_grid(KdeFit(s, nu)), density_grid(m));
}

}  // namespace

TEST(Amise, VarianceTermIncreasing) {
  double prev = amise(1.0, 100, 0.0);
  for (double nu = 1.5; nu <= 100.0; nu *= 1.1) {
    const double cur = amise(nu, 100, 0.0);
    EXPECT_GT(cur, prev) << nu;
    prev = cur;
  }
}

TEST(Amise, FrozenValue) {
  EXPECT_NEAR(amise(4.0, 100, rt_curvature(1.0)), 0.005925172643668034, 1e-14);
  const double i2 = oracle::bessel(2, 4.0) / oracle::bessel(0, 4.0);
  const double expected = std::pow(1.0 - i2, 2) * rt_curvature(1.0) / 16.0 +
                          oracle::bessel(0, 8.0) / (200.0 * kPi * std::pow(oracle::bessel(0, 4.0), 2));
  EXPECT_NEAR(amise(4.0, 100, rt_curvature(1.0)), expected, 1e-14);
}

TEST(Amise, LargeConcentrationSurrogate) {
  for (double r : {0.05131, 2.0, 40.0}) {
    const double nu = 400.0;
    const double surrogate = r / (4.0 * nu * nu) + std::sqrt(nu) / (2.0 * std::sqrt(kPi) * 100.0);
    EXPECT_NEAR(amise(nu, 100, r) / surrogate, 1.0, 0.01) << r;
  }
}

TEST(RuleOfThumb, ClosedFormValues) {
  EXPECT_EQ(rule_of_thumb_nu(0.0, 100), 0.0);
  EXPECT_NEAR(rule_of_thumb_nu(1.0, 100), 3.191, 1e-3);
  for (double kappa : {0.3, 1.0, 4.0, 20.0}) {
    for (double n : {50.0, 1000.0}) {
      EXPECT_NEAR(rule_of_thumb_nu(kappa, static_cast<std::size_t>(n)) / oracle_rt(kappa, n), 1.0, 1e-12);
    }
  }
  EXPECT_EQ(rule_of_thumb_nu(kKappaCap, 100), kKappaCap);
}

TEST(RuleOfThumb, RotationInvariant) {
  const auto s = draw("M2", 120, 1);
  const auto a = rule_of_thumb(s);
  const auto b = rule_of_thumb(rotate(s, 2.2));
  EXPECT_NEAR(a.nu / b.nu, 1.0, 1e-9);
  EXPECT_EQ(a.selector, Selector::RuleOfThumb);
  ASSERT_TRUE(a.kappa_hat.has_value());
}

TEST(PlugIn, MinimizerAgreesWithBruteForce) {
  for (double r : {vm_curvature(1.0), vm_curvature(4.0), 3.0021549559038277, 40.0}) {
    for (std::size_t n : {100u, 500u}) {
      const auto dom = NuSearchDomain::for_sample_size(n);
      const auto res = minimize_amise(n, r, dom);
      // Independent refinement: best of the probe grid, then a dense grid
      // between its neighbours.
      const auto probes = log_space(dom.nu_min, dom.nu_max, dom.probes);
      std::size_t best = 0;
      for (std::size_t i = 1; i < probes.size(); ++i) {
        if (amise(probes[i], n, r) < amise(probes[best], n, r)) {
          best = i;
        }
      }
      const double lo = probes[best == 0 ? 0 : best - 1];
      const double hi = probes[std::min(best + 1, probes.size() - 1)];
      double brute = amise(probes[best], n, r);
      for (const double nu : log_space(lo, hi, 2000)) {
        brute = std::min(brute, amise(nu, n, r));
      }
      EXPECT_LE(std::abs(res.value - brute), 1e-8 * brute) << r << " " << n;
      EXPECT_NEAR(res.value, amise(res.x, n, r), 1e-15);
    }
  }
}

TEST(PlugIn, LargeSampleMinimizerMatchesAsymptoticRate) {
  // At n = 100 this curvature puts the minimizer near nu = 0.3, far from the
  // asymptotic regime; the prediction only holds once nu is large.
  const std::size_t n = 10000;
  const double r = rt_curvature(1.0);
  const auto res = minimize_amise(n, r, NuSearchDomain::for_sample_size(n));
  const double asymptotic = std::pow(2.0 * std::sqrt(kPi) * static_cast<double>(n) * r, 0.4);
  EXPECT_NEAR(res.x / asymptotic, 1.0, 0.05);
}

TEST(PlugIn, MonotoneInSampleSize) {
  const double r = vm_curvature(1.0);  // truth vM(pi, 1)
  double prev = 0.0;
  for (std::size_t n : {50u, 100u, 250u, 500u, 1000u, 5000u}) {
    const double nu = minimize_amise(n, r, NuSearchDomain::for_sample_size(n)).x;
    EXPECT_GT(nu, prev) << n;
    prev = nu;
  }
}

TEST(PlugIn, SingleComponentReferenceBeatsRuleOfThumbAmise) {
  const auto s = draw("M2", 200, 2);
  EmConfig cfg;
  cfg.seed = 9;
  const std::vector<int> one{1};
  const auto pi = plug_in(s, cfg, NuSearchDomain::for_sample_size(s.size()), one);
  ASSERT_FALSE(pi.fallback) << pi.fallback_reason;
  const double kappa = fit_single_von_mises(s).component.kappa;
  const double r = vm_curvature(kappa);
  EXPECT_NEAR(*pi.curvature / r, 1.0, 1e-6);
  EXPECT_LE(pi.objective, amise(rule_of_thumb_nu(kappa, s.size()), s.size(), r) * (1.0 + 1e-12));
}

TEST(PlugIn, FallsBackOnDegenerateSample) {
  const AngleSample s(25, 4.0);
  const auto res = plug_in(s, EmConfig{}, NuSearchDomain::for_sample_size(s.size()));
  EXPECT_TRUE(res.fallback);
  EXPECT_FALSE(res.fallback_reason.empty());
  EXPECT_EQ(res.nu, rule_of_thumb(s).nu);
  EXPECT_EQ(res.selector, Selector::PlugIn);
  EXPECT_FALSE(res.selected_components.has_value());
  EXPECT_EQ(res.aic_table.size(), kDefaultCandidates.size());
}

TEST(PlugIn, BeatsRuleOfThumbOnBimodalTruth) {
  const auto& m7 = catalogue_model("M7");
  const auto s = draw("M7", 500, 3);
  EmConfig cfg;
  cfg.seed = 5;
  const auto pi = plug_in(s, cfg, NuSearchDomain::for_sample_size(s.size()));
  ASSERT_FALSE(pi.fallback);
  EXPECT_LT(model_ise(m7, s, pi.nu), model_ise(m7, s, rule_of_thumb(s).nu));
}

TEST(Lcv, TwoPointObjective) {
  const AngleSample s{0.4, 1.9};
  const LcvObjective f(s);
  EXPECT_NEAR(f(0.0), 2.0 * std::log(1.0 / (2 * kPi)), 1e-12);
  for (double nu : {0.5, 3.0, 40.0}) {
    EXPECT_NEAR(f(nu), 2.0 * std::log(oracle::von_mises(0.4, 1.9, nu)), 1e-10);
  }
  // Antipodal points favour the flattest estimate.
  const AngleSample anti{0.0, kPi};
  const auto dom = NuSearchDomain::for_sample_size(2);
  EXPECT_NEAR(lcv(anti, dom).nu, dom.nu_min, 1e-12);
}

TEST(Lcv, UnderflowHandledAtLargeConcentration) {
  const AngleSample s{0.0, 0.5, 3.0, 3.2};
  const LcvObjective f(s);
  EXPECT_TRUE(std::isfinite(f(50000.0)));
  EXPECT_LT(f(50000.0), f(5.0));
}

TEST(Lcv, AgreesWithDenseGrid) {
  for (const char* id : {"M2", "M7", "M12"}) {
    const auto s = draw(id, 100, 4);
    const auto dom = NuSearchDomain::for_sample_size(s.size());
    const auto res = lcv(s, dom);
    const LcvObjective f(s);
    double best = -1e300;
    for (const double nu : log_space(dom.nu_min, dom.nu_max, 2000)) {
      best = std::max(best, f(nu));
    }
    EXPECT_GE(res.objective, best - 1e-6 * std::abs(best)) << id;
    EXPECT_NEAR(res.objective, f(res.nu), 1e-12 * std::abs(best));
  }
}

TEST(Lcv, RotationInvariant) {
  const auto s = draw("M9", 100, 5);
  const auto dom = NuSearchDomain::for_sample_size(s.size());
  const auto a = lcv(s, dom);
  const auto b = lcv(rotate(s, 0.9), dom);
  EXPECT_NEAR(a.nu / b.nu, 1.0, 1e-6);
}

TEST(Oracle, UniformTruthPicksSmallestConcentration) {
  Rng rng(3, 3);
  const auto grid = default_oracle_grid();
  ASSERT_EQ(grid.size(), 81u);
  EXPECT_NEAR(grid.front(), 0.01, 1e-15);
  EXPECT_NEAR(grid.back(), 1000.0, 1e-9);
  const auto res = oracle_bandwidth(catalogue_model("M1"), 500, 20, rng, grid);
  EXPECT_EQ(res.nu0, grid.front());
  EXPECT_LT(res.mise0, 1e-4);
}

TEST(Oracle, SingleReplicateReducesToIseArgmin) {
  const auto& m = catalogue_model("M7");
  const std::vector<AngleSample> samples{draw("M7", 100, 6)};
  const auto grid = log_space(0.5, 50.0, 21);
  const auto res = oracle_from_samples(m, samples, grid);
  double best = 1e300;
  double best_nu = 0.0;
  for (double nu : grid) {
    const double v = model_ise(m, samples[0], nu);
    if (v < best) {
      best = v;
      best_nu = nu;
    }
  }
  EXPECT_EQ(res.nu0, best_nu);
  EXPECT_NEAR(res.mise0, best, 1e-12);
  ASSERT_EQ(res.mise.size(), grid.size());
}

TEST(Selectors, NamesRoundTrip) {
  for (auto s : {Selector::RuleOfThumb, Selector::PlugIn, Selector::Lcv, Selector::Oracle}) {
    EXPECT_EQ(parse_selector(selector_name(s)), s);
  }
  EXPECT_FALSE(parse_selector("XYZ").has_value());
}
