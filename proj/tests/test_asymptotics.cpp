#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "chs/asymptotics.hpp"
#include "chs/energy.hpp"

namespace chs {
namespace {

ProblemParams make(double s, double p, double q, double lambda = 1.0, double mu = 1.0) {
  ProblemParams pr;
  pr.N = 3;
  pr.alpha = 1.0;
  pr.s = s;
  pr.p = p;
  pr.q = q;
  pr.lambda = lambda;
  pr.mu = mu;
  return pr;
}

std::vector<double> ladder6() { return geometric_ladder(1.0, 2, 7); }

TEST(Ladder, Geometric) {
  EXPECT_EQ(geometric_ladder(2.0, 1, 3), (std::vector<double>{1.0, 0.5, 0.25}));
  SweepConfig c;
  const auto d = c.resolved_ladder(1.0);
  ASSERT_EQ(d.size(), 8u);
  EXPECT_EQ(d.front(), 0.5);
  EXPECT_EQ(d.back(), 1.0 / 256.0);
}

TEST(FitRate, SyntheticPower) {
  std::vector<double> eps, y;
  for (double e : ladder6()) {
    eps.push_back(e);
    y.push_back(3.0 * std::pow(e, 1.7));
  }
  const auto fit = fit_rate(eps, y, SweepColumn::HardyTerm, {1.7, 0.01, false, false});
  EXPECT_NEAR(fit.slope, 1.7, 1e-12);
  EXPECT_FALSE(fit.log_factor_detected);
  EXPECT_EQ(fit.points, kFitWindow);
  EXPECT_EQ(fit.verdict, FitVerdict::Pass);
  EXPECT_EQ(fit_rate(eps, y, SweepColumn::HardyTerm, {1.7, 0.01, false, true}).verdict, FitVerdict::Fail);
  EXPECT_EQ(fit_rate(eps, y, SweepColumn::HardyTerm, {1.5, 0.05, true, std::nullopt}).verdict, FitVerdict::Pass);
  EXPECT_EQ(fit_rate(eps, y, SweepColumn::HardyTerm, {2.0, 0.05, true, std::nullopt}).verdict, FitVerdict::Fail);
}

TEST(FitRate, DetectsLogFactor) {
  std::vector<double> eps, y;
  for (double e : ladder6()) {
    eps.push_back(e);
    y.push_back(2.0 * std::pow(e, 1.25) * std::abs(std::log(e)));
  }
  const auto fit = fit_rate(eps, y, SweepColumn::HardyTerm, {1.25, 0.01, false, true});
  EXPECT_TRUE(fit.log_factor_detected);
  EXPECT_NEAR(fit.slope, 1.25, 1e-10);
  EXPECT_LT(fit.power_slope, 1.25);
  EXPECT_EQ(fit.verdict, FitVerdict::Pass);
}

TEST(FitRate, PowerPredictionIgnoresSlowCorrection) {
  // ε(1 + 5ε) looks like a log factor on a short ladder.
  std::vector<double> eps, y;
  for (double e : geometric_ladder(1.0, 1, 8)) {
    eps.push_back(e);
    y.push_back(e * (1.0 + 5.0 * e));
  }
  const auto fit = fit_rate(eps, y, SweepColumn::KineticDeviation, {1.0, 0.1, false, false});
  EXPECT_EQ(fit.slope, fit.power_slope);
  EXPECT_EQ(fit.verdict, FitVerdict::Pass) << fit.slope;
  const auto free = fit_rate(eps, y, SweepColumn::KineticDeviation, {1.0, 0.1, false, std::nullopt});
  if (free.log_factor_detected) EXPECT_EQ(free.slope, free.log_slope);
}

TEST(FitRate, DegenerateInputs) {
  EXPECT_THROW(fit_rate({0.5, 0.25, 0.125}, {1.0, 2.0, 3.0}, SweepColumn::Kinetic, {}), std::invalid_argument);
  EXPECT_THROW(fit_rate({0.5, 0.25, 0.125, 0.1}, {1.0, 2.0, 3.0}, SweepColumn::Kinetic, {}), std::invalid_argument);
  EXPECT_EQ(fit_rate({0.5, 0.25, 0.125, 0.06}, {1.0, 0.0, 3.0, 1.0}, SweepColumn::Kinetic, {}).verdict,
            FitVerdict::Inconclusive);
  // Scatter with no trend.
  EXPECT_EQ(fit_rate({0.5, 0.25, 0.125, 0.0625, 0.03}, {1.0, 5.0, 0.3, 4.0, 0.9}, SweepColumn::Kinetic, {}).verdict,
            FitVerdict::Inconclusive);
}

TEST(EpsilonSweep, Validation) {
  const auto pr = make(0.0, 4.5, 6.0);
  SweepConfig c;
  c.ladder = {0.1, 0.2};
  EXPECT_THROW(epsilon_sweep(pr, c), std::invalid_argument);
  c.ladder = {0.1, 0.0};
  EXPECT_THROW(epsilon_sweep(pr, c), std::invalid_argument);
  c.ladder = {0.1};
  c.cutoff_inner = 0.6;
  EXPECT_THROW(epsilon_sweep(pr, c), std::invalid_argument);
  c = {};
  c.family = BubbleFamily::AubinTalenti;
  EXPECT_THROW(epsilon_sweep(pr, c), std::invalid_argument);
  c = {};
  EXPECT_THROW(epsilon_sweep(make(1.0, 5.0, 3.0), c), std::invalid_argument);
}

TEST(EpsilonSweep, UncutKineticIsScaleInvariant) {
  // Cut minus deviation is the full-space bubble energy S^{N/2}.
  const auto pr = make(0.5, 3.0, 4.0);
  SweepConfig c;
  c.family = BubbleFamily::AubinTalenti;
  c.ladder = {0.2, 0.05, 0.01, 0.002};
  const auto t = epsilon_sweep(pr, c);
  ASSERT_EQ(t.rows.size(), 4u);
  const double full = std::pow(sobolev_constant(3), 1.5);
  for (const auto& row : t.rows) {
    EXPECT_NEAR((row.kinetic - row.kinetic_deviation) / full, 1.0, 1e-8) << row.epsilon;
    EXPECT_NEAR(row.h_star, fiber_max(row.kinetic, row.nonlocal_term, row.hardy_term, 1.0, 1.0, 3.0, 4.0).h_star,
                1e-14);
  }
  EXPECT_FALSE(t.threshold);
  EXPECT_TRUE(std::isnan(t.rows[0].margin));
}

TEST(EpsilonSweep, UncutHardyTermIsScaleInvariant) {
  const double s = 1.0;
  const auto pr = make(s, 4.0, 4.0);  // q = 2*(1) = 4
  SweepConfig c;
  c.ladder = {0.1, 0.02, 0.004};
  const auto t = epsilon_sweep(pr, c);
  const double full = std::pow(hardy_sobolev_constant(3, s), (3.0 - s) / (2.0 - s));
  for (const auto& row : t.rows) EXPECT_NEAR((row.hardy_term - row.hardy_deviation) / full, 1.0, 1e-8);
}

TEST(EpsilonSweep, KineticDeviationRate) {
  const auto pr = make(0.0, 4.5, 6.0);
  SweepConfig c;
  c.ladder = ladder6();
  const auto t = epsilon_sweep(pr, c);
  const auto fit = fit_rate(t, SweepColumn::KineticDeviation, {1.0, 0.1, false, std::nullopt});
  EXPECT_EQ(fit.verdict, FitVerdict::Pass) << fit.slope;
}

TEST(EpsilonSweep, GridModeMatchesProfile) {
  const auto pr = make(0.5, 3.0, 4.0);
  SweepConfig c;
  c.family = BubbleFamily::AubinTalenti;
  c.ladder = {0.1};
  const auto prof = epsilon_sweep(pr, c);
  c.mode = SweepMode::Grid;
  c.grid_points = 256;
  c.grading = 2.0;
  const auto grid = epsilon_sweep(pr, c);
  EXPECT_TRUE(std::isnan(grid.rows[0].kinetic_deviation));
  EXPECT_NEAR(grid.rows[0].kinetic / prof.rows[0].kinetic, 1.0, 1e-3);
  EXPECT_NEAR(grid.rows[0].hardy_term / prof.rows[0].hardy_term, 1.0, 1e-3);
  EXPECT_NEAR(grid.rows[0].nonlocal_term / prof.rows[0].nonlocal_term, 1.0, 1e-2);
}

TEST(PredictedRates, ByFamily) {
  SweepConfig at;
  at.family = BubbleFamily::AubinTalenti;
  const auto a = predicted_rates(make(0.5, 5.0, 2.5), at);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].column, SweepColumn::KineticDeviation);
  EXPECT_EQ(a[0].prediction.exponent, 1.0);
  EXPECT_EQ(a[1].column, SweepColumn::HardyTerm);
  EXPECT_DOUBLE_EQ(a[1].prediction.exponent, 1.25);
  EXPECT_EQ(a[1].prediction.expect_log, true);

  const auto h = predicted_rates(make(0.0, 4.5, 6.0), SweepConfig{});
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[1].column, SweepColumn::HardyDeviation);
  EXPECT_EQ(h[1].prediction.exponent, 3.0);
  EXPECT_EQ(h[2].column, SweepColumn::NonlocalTerm);
  EXPECT_TRUE(h[2].prediction.one_sided);
  EXPECT_DOUBLE_EQ(h[2].prediction.exponent, 5.0 - 4.5);
}

TEST(VerifyLevelBound, RegimeGate) {
  const auto pr = make(0.5, 3.0, 4.0);
  const auto thr = ps_thresholds(pr, compute_sharp_constants(3, 1.0, 0.5));
  EXPECT_THROW(verify_level_bound(pr, SweepConfig{}, thr), RegimeError);
}

TEST(VerifyLevelBound, ForcesFamilyAndReportsMargins) {
  const auto pr = make(1.0, 5.0, 3.0);  // 4iii
  const auto thr = ps_thresholds(pr, compute_sharp_constants(3, 1.0, 1.0));
  SweepConfig c;
  c.ladder = {0.1, 0.05, 0.025};
  c.theta = 2.0;
  const auto rep = verify_level_bound(pr, c, thr);
  EXPECT_EQ(rep.case_id, CaseId::FourIII);
  EXPECT_EQ(rep.threshold_kind, "hls");
  EXPECT_EQ(rep.threshold, thr.hls_threshold);
  EXPECT_EQ(rep.table.family, BubbleFamily::AubinTalenti);
  ASSERT_EQ(rep.warnings.size(), 2u);
  EXPECT_NE(rep.warnings[0].find("aubin_talenti"), std::string::npos);
  EXPECT_NE(rep.warnings[1].find("theta ignored"), std::string::npos);
  for (const auto& row : rep.table.rows) EXPECT_EQ(row.margin, rep.threshold - row.h_star);
  EXPECT_EQ(rep.verdict == LevelVerdict::Verified, rep.tail_positive && rep.tail_increasing);
}

TEST(VerifyLevelBound, ThetaAtBoundIsNotVerified) {
  const auto pr = make(0.0, 3.5, 6.0);  // 3ii, bound 0.5
  const auto thr = ps_thresholds(pr, compute_sharp_constants(3, 1.0, 0.0));
  SweepConfig c;
  c.ladder = {0.1, 0.05, 0.025};
  c.theta = 0.5;
  const auto rep = verify_level_bound(pr, c, thr);
  EXPECT_EQ(rep.verdict, LevelVerdict::NotVerified);
  EXPECT_EQ(rep.theta_lower_bound, 0.5);
  ASSERT_EQ(rep.warnings.size(), 1u);
  EXPECT_NE(rep.warnings[0].find("lower bound"), std::string::npos);
  for (const auto& row : rep.table.rows) EXPECT_NEAR(row.lambda, std::pow(row.epsilon, -0.5), 1e-12);
}

TEST(Names, Strings) {
  EXPECT_EQ(to_string(SweepColumn::HardyDeviation), "hardy_deviation");
  EXPECT_EQ(to_string(FitVerdict::Inconclusive), "inconclusive");
  EXPECT_EQ(to_string(LevelVerdict::NotVerified), "not verified");
}

}  // namespace
}  // namespace chs
