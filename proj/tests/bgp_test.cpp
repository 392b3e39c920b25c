#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "uzawa/bgp.hpp"

using namespace uzawa;

namespace {

ModelParams defaults() { return ModelParams{0.2, 0.05, 0.01, 1.0, 1.0}; }

Trajectory run(const ProductionFunction& pf, const ModelParams& mp = defaults(), double t_end = 600.0) {
  return simulate(pf, mp, t_end, 0.05);
}

}  // namespace

TEST(DetectBgp, CobbDouglasHarrodGrowsAtNPlusRho) {
  const auto r = detect_bgp(run(ProductionFunction::cobb_douglas(1.0 / 3.0, TechBias::harrod(0.02))), 0.25, 1e-4);
  EXPECT_EQ(r.verdict, Verdict::BGP);
  EXPECT_NEAR(r.g_hat, 0.03, 2e-4);
  EXPECT_NEAR(r.rho_implied, 0.02, 2e-4);
  EXPECT_EQ(r.window_end, 600.0);
  EXPECT_GE(r.window_points, kMinWindowPoints);
  EXPECT_LE(r.max_drift(), r.tol);
}

TEST(DetectBgp, NoGrowthSourcesIsStationary) {
  ModelParams mp = defaults();
  mp.n = 0.0;
  const auto r = detect_bgp(run(ProductionFunction::ces(0.4, 0.5), mp), 0.25, 1e-4);
  EXPECT_EQ(r.verdict, Verdict::BGP);
  EXPECT_NEAR(r.g_hat, 0.0, 1e-8);
}

TEST(DetectBgp, CesHicksDriftsAwayFromBalance) {
  const auto traj = run(ProductionFunction::ces(0.4, 0.5, TechBias::hicks(0.02)));
  const auto r = detect_bgp(traj, 0.25, 1e-4);
  EXPECT_EQ(r.verdict, Verdict::NoBGP);
  EXPECT_GT(r.share_rel_drift, 1.0);
  // The capital share falls monotonically over the whole tail.
  for (std::size_t i = traj.size() - r.window_points + 1; i < traj.size(); ++i) {
    ASSERT_LT(traj.share_K[i], traj.share_K[i - 1]);
  }
}

TEST(DetectBgp, RejectsShortWindowAndBadOptions) {
  const auto traj = simulate(ProductionFunction::cobb_douglas(0.3), defaults(), 10.0, 0.5);
  EXPECT_THROW(detect_bgp(traj, 0.25, 1e-4), AnalysisError);
  const auto ok = run(ProductionFunction::cobb_douglas(0.3), defaults(), 100.0);
  EXPECT_THROW(detect_bgp(ok, 0.0, 1e-4), ConfigError);
  EXPECT_THROW(detect_bgp(ok, 1.0, 1e-4), ConfigError);
  EXPECT_THROW(detect_bgp(ok, 0.25, 0.0), ConfigError);
}

TEST(DetectBgp, InvariantUnderCommonRescaling) {
  const auto pf = ProductionFunction::ces(0.4, 2.0, TechBias::harrod(0.02));
  const auto base = detect_bgp(run(pf));
  for (double lambda : {0.01, 3.0, 250.0}) {
    ModelParams mp = defaults();
    mp.K0 *= lambda;
    mp.L0 *= lambda;
    const auto scaled = detect_bgp(run(pf, mp));
    EXPECT_EQ(scaled.verdict, base.verdict);
    EXPECT_NEAR(scaled.g_hat, base.g_hat, 1e-9);
  }
}

TEST(BgpConditionResidual, HarrodQuotientIsTheRate) {
  const auto pf = ProductionFunction::ces(0.4, 0.5, TechBias::harrod(0.02));
  const auto traj = run(pf, defaults(), 100.0);
  for (std::size_t i = 0; i < traj.size(); i += 50) {
    const auto p = traj.point(i);
    EXPECT_NEAR(bgp_condition_residual(pf, p), (0.01 + 0.02) - p.gY, 1e-15);
  }
}

TEST(BgpConditionResidual, NoTechnicalChangeReducesToPopulationGrowth) {
  ModelParams mp = defaults();
  mp.n = 0.0;
  const auto pf = ProductionFunction::cobb_douglas(0.3);
  const auto traj = run(pf, mp);
  const auto p = traj.point(traj.size() - 1);
  EXPECT_NEAR(bgp_condition_residual(pf, p), -p.gY, 1e-16);
  EXPECT_NEAR(bgp_condition_residual(pf, p), 0.0, 1e-9);
}

TEST(BgpConditionResidual, SmallOnBalancedPaths) {
  for (const auto& pf : {ProductionFunction::cobb_douglas(1.0 / 3.0, TechBias::hicks(0.02)),
                         ProductionFunction::ces(0.4, 0.5, TechBias::harrod(0.02)),
                         ProductionFunction::ces(0.4, 2.0)}) {
    const auto series = bgp_condition_series(pf, run(pf), 0.25);
    for (double v : series) ASSERT_LE(std::abs(v), 10.0 * 1e-4) << pf.describe();
  }
}

TEST(BgpConditionResidual, CesHicksNeverSettles) {
  // On a balanced path the residual sits at rounding level. Under Hicks bias
  // with sigma < 1 it equals share_K*(n + gamma/share_L - gK): nonzero at
  // every point and shrinking only as fast as the capital share does.
  const auto harrod = ProductionFunction::ces(0.4, 0.5, TechBias::harrod(0.02));
  double harrod_floor = 0.0;
  for (double v : bgp_condition_series(harrod, run(harrod), 0.25)) harrod_floor = std::max(harrod_floor, std::abs(v));
  ASSERT_LT(harrod_floor, 1e-12);

  const auto hicks = ProductionFunction::ces(0.4, 0.5, TechBias::hicks(0.02));
  const auto traj = run(hicks);
  const auto series = bgp_condition_series(hicks, traj, 0.25);
  const std::size_t begin = traj.size() - series.size();
  for (std::size_t k = 0; k < series.size(); ++k) {
    ASSERT_GT(std::abs(series[k]), 10.0 * harrod_floor);
    ASSERT_NEAR(series[k] / traj.share_K[begin + k], 0.01 + 0.02 / traj.share_L[begin + k] - traj.gK[begin + k],
                1e-6);
  }
  EXPECT_LT(std::abs(series.back()), 0.5 * std::abs(series.front()));
}

TEST(UzawaVerdict, CobbDouglasHicksMapsToHarrod) {
  const auto v = uzawa_verdict(ProductionFunction::cobb_douglas(0.3, TechBias::hicks(0.014)), defaults());
  EXPECT_EQ(v.verdict, Verdict::BGP);
  EXPECT_NEAR(v.rho_implied, 0.014 / 0.7, 2e-4);
  EXPECT_TRUE(v.consistent);
  EXPECT_FALSE(v.doubled);
}

TEST(UzawaVerdict, CesHarrodBalancedAtNPlusRho) {
  const auto v = uzawa_verdict(ProductionFunction::ces(0.4, 0.5, TechBias::harrod(0.02)), defaults());
  EXPECT_EQ(v.verdict, Verdict::BGP);
  EXPECT_NEAR(v.g_hat, 0.03, 1e-4);
  EXPECT_TRUE(v.consistent) << (v.violations.empty() ? "" : v.violations.front());
}

TEST(UzawaVerdict, CesSolowExcluded) {
  const auto v = uzawa_verdict(ProductionFunction::ces(0.4, 0.5, TechBias::solow(0.02)), defaults());
  EXPECT_EQ(v.verdict, Verdict::NoBGP);
  EXPECT_EQ(v.expected, Verdict::NoBGP);
  EXPECT_TRUE(v.doubled);
  EXPECT_TRUE(v.consistent);
  // The drift persists when the horizon doubles.
  EXPECT_GE(v.report.max_drift(), v.first_max_drift);
}

TEST(UzawaVerdict, ExplosiveRunIsTruncatedNotFatal) {
  const auto v = uzawa_verdict(ProductionFunction::ces(0.4, 2.0, TechBias::hicks(0.02)), defaults());
  EXPECT_EQ(v.verdict, Verdict::NoBGP);
  ASSERT_TRUE(v.divergence_time.has_value());
  EXPECT_LT(v.horizon, *v.divergence_time);
  EXPECT_TRUE(v.consistent);
}

TEST(UzawaVerdict, DoublingRescuesSlowConvergence) {
  // A short horizon leaves the CES(2) economy visibly off its balanced path;
  // doubling it resolves the transition.
  const auto pf = ProductionFunction::ces(0.4, 2.0);
  UzawaSettings settings;
  settings.t_end = 200.0;  // max drift 5.2e-3 here, 6.8e-4 at 400
  settings.tol = 1e-3;
  const auto first = detect_bgp(simulate(pf, defaults(), settings.t_end, settings.dt), 0.25, settings.tol);
  ASSERT_EQ(first.verdict, Verdict::NoBGP);
  const auto v = uzawa_verdict(pf, defaults(), settings);
  EXPECT_TRUE(v.doubled);
  EXPECT_EQ(v.verdict, Verdict::BGP);
  EXPECT_TRUE(v.consistent);
}

TEST(UzawaVerdict, BrokenMarginalProductsViolateConsistency) {
  const auto pf = ProductionFunction::custom(
      [](double K, double L) { return std::pow(K, 0.3) * std::pow(L, 0.7); }, TechBias::harrod(0.02),
      [](double K, double L) {
        const double F = std::pow(K, 0.3) * std::pow(L, 0.7);
        return std::array<double, 2>{0.45 * F / K, 0.7 * F / L};
      },
      "broken_gradient");
  const auto v = uzawa_verdict(pf, defaults());
  EXPECT_FALSE(v.consistent);
  EXPECT_FALSE(v.violations.empty());
}

TEST(UzawaVerdict, CustomKernelWithFiniteDifferencesIsConsistent) {
  const auto pf = ProductionFunction::custom(
      [](double K, double L) { return std::pow(K, 0.3) * std::pow(L, 0.7); }, TechBias::harrod(0.02));
  const auto v = uzawa_verdict(pf, defaults());
  EXPECT_EQ(v.verdict, Verdict::BGP);
  EXPECT_EQ(v.identity_tol, 1e-5);
  EXPECT_TRUE(v.consistent);
}

TEST(VerifyHarrodForm, HarrodRunIsExact) {
  const auto pf = ProductionFunction::cobb_douglas(1.0 / 3.0, TechBias::harrod(0.02));
  EXPECT_LE(verify_harrod_form(run(pf), pf), 1e-6);
}

TEST(VerifyHarrodForm, CobbDouglasHicksViaEquivalentRate) {
  const auto pf = ProductionFunction::cobb_douglas(0.3, TechBias::hicks(0.014));
  EXPECT_LE(verify_harrod_form(run(pf), pf), 1e-4);
}

TEST(VerifyHarrodForm, PurePopulationGrowth) {
  const auto pf = ProductionFunction::ces(0.4, 0.5);
  const auto traj = run(pf);
  EXPECT_NEAR(detect_bgp(traj).g_hat, 0.01, 1e-8);
  EXPECT_LE(verify_harrod_form(traj, pf), 1e-8);
}

TEST(VerifyHarrodForm, NoBalancedPathIsAnError) {
  const auto pf = ProductionFunction::ces(0.4, 0.5, TechBias::hicks(0.02));
  EXPECT_THROW(verify_harrod_form(run(pf), pf), AnalysisError);
}
