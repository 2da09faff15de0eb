#include <gtest/gtest.h>

#include <random>

#include "pcfbpm/vparam.hpp"

using namespace pcf;

TEST(VNumber, StepIndexHandValue) {
  // 2*pi/1.55 * 4.1 * sqrt(1.45^2 - 1.444^2) = 16.620 * 0.13178
  EXPECT_NEAR(v_number({4.1, 1.45, 1.444}, 1.55).V, 2.190, 1e-3);
}

TEST(VNumber, EqualIndicesGiveZero) { EXPECT_EQ(v_number({4.1, 1.45, 1.45}, 1.55).V, 0.0); }

TEST(VNumber, UAndWCompleteV) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const StepFiberSpec s{0.5 + 10 * u(rng), 1.45 + 0.05 * u(rng), 1.40 + 0.04 * u(rng)};
    const double n = s.n_cl + u(rng) * (s.n_co - s.n_cl);
    const auto b = v_number(s, 0.4 + 2 * u(rng), n);
    EXPECT_LE(std::abs(*b.U * *b.U + *b.W * *b.W - b.V * b.V), 1e-12 * b.V * b.V);
  }
}

TEST(VNumber, InvalidInputsThrow) {
  EXPECT_THROW(v_number({4.1, 1.44, 1.45}, 1.55), ConfigError);
  EXPECT_THROW(v_number({-1, 1.45, 1.44}, 1.55), ConfigError);
  EXPECT_THROW(v_number({4.1, 1.45, 1.44}, 1.55, 1.46), ConfigError);
}

TEST(SingleMode, StrictInequalityAtCutoff) {
  EXPECT_TRUE(single_mode(0.0));
  EXPECT_FALSE(single_mode(2.405));
  EXPECT_FALSE(single_mode(3.0));
  EXPECT_TRUE(single_mode(2.4049));
  EXPECT_THROW(single_mode(-0.1), ConfigError);
}

TEST(VEff, ZeroContrastAndErrors) {
  EXPECT_EQ(v_eff(2.3, 1.45, 1.45, 1.55), 0.0);
  EXPECT_THROW(v_eff(2.3, 1.44, 1.45, 1.55), ConfigError);
  EXPECT_THROW(v_eff(0.0, 1.45, 1.44, 1.55), ConfigError);
}

TEST(Empirical, CoefficientsAtRatio045) {
  const auto c = empirical_coeffs(0.45);
  EXPECT_NEAR(c.A, 4.282, 1e-3);
  EXPECT_NEAR(c.B, 0.3055, 1e-4);
  EXPECT_NEAR(c.C, 2.125, 1e-3);
  EXPECT_NEAR(empirical_v(1.0, 0.45), 1.204, 1e-3);
}

TEST(Empirical, CoefficientsPositiveAndPoleAtUpperBound) {
  const auto c = empirical_coeffs(0.20);
  EXPECT_GT(c.A, 0.0);
  EXPECT_GT(c.B, 0.0);
  EXPECT_GT(c.C, 0.0);
  EXPECT_GT(empirical_coeffs(0.9039).A, 1e3);
  EXPECT_THROW(empirical_coeffs(0.904), ConfigError);
  EXPECT_THROW(empirical_coeffs(0.0), ConfigError);
}

TEST(Empirical, Limits) {
  const auto c = empirical_coeffs(0.5);
  EXPECT_NEAR(empirical_v(1e-9, 0.5), c.A / (c.B + 1.0), 1e-7);
  EXPECT_LT(empirical_v(50.0, 0.5), 1e-20);
  EXPECT_THROW(empirical_v(0.0, 0.5), ConfigError);
}

TEST(Empirical, IncreasingInHoleSizeDecreasingInWavelength) {
  for (double x = 0.05; x <= 2.0 + 1e-9; x += 0.05)
    for (double r = 0.20; r < 0.80 - 1e-9; r += 0.05) {
      EXPECT_LT(empirical_v(x, r), empirical_v(x, r + 0.05));
      EXPECT_GT(empirical_v(x, r), empirical_v(x + 0.05, r));
    }
}

TEST(Fsm, UniformCellGivesBackgroundIndex) {
  PcfGeometry g;
  g.hole_diameter_um = 0.0;
  EXPECT_NEAR(fsm_index(g, 1.55), g.n_background, 1e-9);
  // An index within 1e-9 of n0 bounds V by k pitch sqrt(2 n0 1e-9).
  const double bound = wavenumber(1.0) * g.pitch_um * std::sqrt(2.0 * g.n_background * 1e-9);
  EXPECT_NEAR(v_eff(g.pitch_um, g.n_background, fsm_index(g, 1.0), 1.0), 0.0, bound);
}

TEST(Fsm, IndexFallsWithWavelength) {
  PcfGeometry g;
  g.hole_diameter_um = 0.45 * g.pitch_um;
  double last = g.n_background;
  for (double lp : {0.1, 0.3, 1.0}) {
    const double n = fsm_index(g, lp * g.pitch_um);
    EXPECT_LT(n, last) << lp;
    EXPECT_GT(n, g.n_hole);
    last = n;
  }
}

TEST(Fsm, IndexFallsWithHoleSize) {
  PcfGeometry g;
  double last = g.n_background;
  for (double r : {0.15, 0.30, 0.45}) {
    g.hole_diameter_um = r * g.pitch_um;
    const double n = fsm_index(g, 1.55);
    EXPECT_LT(n, last) << r;
    last = n;
  }
}

TEST(Fsm, ExtrapolationAgreesWithAFinerStep) {
  PcfGeometry g;
  g.hole_diameter_um = 0.45 * g.pitch_um;
  const auto base = fsm_solve(g, g.pitch_um);
  FsmOptions fine;
  fine.step_scale = 0.00125;
  fine.extrapolate = false;
  const auto ref = fsm_solve(g, g.pitch_um, fine);
  ASSERT_TRUE(base.n_fine);
  // Extrapolated value sits beyond the quarter-step solve, towards the limit.
  EXPECT_LT(std::abs(base.n_cl_eff - ref.n_cl_eff), std::abs(*base.n_fine - ref.n_cl_eff));
}

TEST(Sweep, RangeExpansionAndValidation) {
  EXPECT_EQ((SweepRange{0.5, 1.0, 0.25}.values()), (std::vector<double>{0.5, 0.75, 1.0}));
  EXPECT_EQ(SweepRange({0.05, 2.0, 0.05}).values().size(), 40u);
  EXPECT_THROW((SweepRange{1, 2, 0}.values()), ConfigError);
  EXPECT_THROW((SweepRange{2, 1, 0.1}.values()), ConfigError);
  EXPECT_THROW((SweepRange{0, 1, 0.1}.values()), ConfigError);
}

TEST(Sweep, CrossingIsInterpolated) {
  std::vector<VPoint> pts{{1.0, 2.0, {}}, {2.0, 3.0, {}}, {3.0, 4.0, {}}};
  const auto c = find_cutoff_crossing(pts);
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->abscissa, 1.405, 1e-12);
  EXPECT_EQ(c->uncertainty, 1.0);
  pts[1].V = 2.2;
  pts[2].V = 2.3;
  EXPECT_FALSE(find_cutoff_crossing(pts));
}

TEST(Sweep, EmpiricalCurvesKeepRequestedOrder) {
  const auto curves = sweep_v(CurveKind::EmpiricalV, {0.3, 0.2}, {0.1, 0.3, 0.1});
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[0].d_over_pitch, 0.3);
  ASSERT_EQ(curves[0].points.size(), 3u);
  EXPECT_DOUBLE_EQ(curves[0].points[1].V, empirical_v(0.2, 0.3));
  EXPECT_EQ(curves[0].abscissa, Abscissa::LambdaOverPitch);
}

TEST(Sweep, FailedPointsCarryTheirError) {
  const auto curves = sweep_v(CurveKind::EmpiricalV, {0.95}, {0.5, 1.0, 0.5});
  for (const auto& p : curves[0].points) {
    EXPECT_FALSE(p.ok());
    EXPECT_TRUE(std::isnan(p.V));
  }
}

TEST(Sweep, NumericCurveIsIndependentOfWorkerCount) {
  SweepOptions one, many;
  one.workers = 1;
  many.workers = 3;
  const SweepRange r{1.0, 2.0, 0.5};
  const auto a = sweep_v(CurveKind::NumericVeff, {0.3}, r, one);
  const auto b = sweep_v(CurveKind::NumericVeff, {0.3}, r, many);
  ASSERT_EQ(a[0].points.size(), b[0].points.size());
  for (std::size_t k = 0; k < a[0].points.size(); ++k) EXPECT_EQ(a[0].points[k].V, b[0].points[k].V);
}
