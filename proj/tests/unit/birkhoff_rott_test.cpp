#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/errors.hpp"
#include "vsheet/timestepping.hpp"

using namespace vsheet;

namespace {

RealField wave(const PeriodicGrid& g, double amp, int k, bool sine = false) {
  return RealField::sample(g, [=](double a) { return amp * (sine ? std::sin(k * a) : std::cos(k * a)); });
}

}  // namespace

TEST(SheetCurve, RejectsVanishingTangent) {
  const PeriodicGrid g(64);
  // x = a + sin(a) has dx = 1 + cos(a) = 0 at a = pi.
  EXPECT_THROW(SheetCurve(wave(g, 1.0, 1, true), RealField::zeros(g)), InvariantViolation);
  EXPECT_NO_THROW(SheetCurve(wave(g, 0.5, 1, true), RealField::zeros(g)));
}

TEST(VortexAmplitude, RejectsNonzeroMean) {
  const PeriodicGrid g(64);
  try {
    VortexAmplitude(wave(g, 1.0, 1) + RealField::constant(g, 1.0));
    FAIL() << "accepted 1 + cos";
  } catch (const InvariantViolation& e) {
    EXPECT_NEAR(e.value(), 2.0 * kPi, 1e-12);
  }
  EXPECT_NO_THROW(VortexAmplitude(wave(g, 1.0, 1) + RealField::constant(g, 1.0), 1.0));
}

TEST(BirkhoffRott, FlatSheetIsHalfHilbert) {
  for (int k : {1, 2, 5}) {
    const PeriodicGrid g(128);
    const VectorField br = br_integral(SheetCurve::flat(g), VortexAmplitude(wave(g, 1.0, k)));
    EXPECT_LT(br.x.max_abs(), 1e-13);
    EXPECT_LT(oracle::max_diff(br.y, [k](double a) { return 0.5 * std::sin(k * a); }), 1e-13);
  }
}

TEST(BirkhoffRott, TranslationInvariant) {
  const PeriodicGrid g(64);
  const VortexAmplitude w(wave(g, 1.0, 2));
  const RealField p2 = wave(g, 0.1, 1, true);
  const VectorField a = br_integral(SheetCurve(RealField::zeros(g), p2), w);
  const VectorField b = br_integral(SheetCurve(RealField::zeros(g), p2 + RealField::constant(g, 3.0)), w);
  EXPECT_LT(oracle::max_diff(a.x, b.x), 1e-13);
  EXPECT_LT(oracle::max_diff(a.y, b.y), 1e-13);
}

TEST(BirkhoffRott, MatchesSingularitySubtractedQuadrature) {
  const std::size_t n = 128;
  const PeriodicGrid g(n);
  const double e1 = 0.1, e2 = 0.15;
  // Z(a) = a + e1 sin(a) + i e2 cos(2a); w = cos(a) + 0.3 sin(2a)
  oracle::CurveData c;
  c.z = [=](double a) { return Complex(a + e1 * std::sin(a), e2 * std::cos(2 * a)); };
  c.dz = [=](double a) { return Complex(1 + e1 * std::cos(a), -2 * e2 * std::sin(2 * a)); };
  c.d2z = [=](double a) { return Complex(-e1 * std::sin(a), -4 * e2 * std::cos(2 * a)); };
  c.w = [](double a) { return std::cos(a) + 0.3 * std::sin(2 * a); };
  c.dw = [](double a) { return -std::sin(a) + 0.6 * std::cos(2 * a); };
  const std::vector<Complex> ref = oracle::br_subtracted(c, n);

  const SheetCurve z(wave(g, e1, 1, true), wave(g, e2, 2));
  const VectorField br = br_integral(z, VortexAmplitude(RealField::sample(g, c.w)));
  for (std::size_t j = 0; j < n; ++j) {
    EXPECT_NEAR(br.x[j], ref[j].real(), 1e-10) << j;
    EXPECT_NEAR(br.y[j], ref[j].imag(), 1e-10) << j;
  }
}

TEST(BirkhoffRott, ThreadCountDoesNotChangeBits) {
  const PeriodicGrid g(96);
  const SheetCurve z(wave(g, 0.1, 1, true), wave(g, 0.05, 3));
  const VortexAmplitude w(wave(g, 1.0, 1) + wave(g, 0.2, 2, true));
  const VectorField a = br_integral(z, w, {0.0, 1});
  const VectorField b = br_integral(z, w, {0.0, 3});
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_EQ(a.x[j], b.x[j]);
    EXPECT_EQ(a.y[j], b.y[j]);
  }
}

TEST(BirkhoffRott, ArcChordFloorIsEnforced) {
  const PeriodicGrid g(64);
  const SheetCurve z(wave(g, 0.95, 1, true), RealField::zeros(g));
  EXPECT_THROW(br_integral(z, VortexAmplitude(wave(g, 1.0, 1)), {0.5, 1}), ArcChordViolation);
}

TEST(ArcChord, FlatSheetIsExactlyOne) {
  EXPECT_EQ(arc_chord(SheetCurve::flat(PeriodicGrid(64))), 1.0);
  EXPECT_EQ(arc_chord(SheetCurve::flat(PeriodicGrid(256))), 1.0);
}

TEST(ArcChord, MatchesPairwiseOracle) {
  for (auto [a, k, b, m] : {std::tuple{0.3, 1, 0.0, 1}, std::tuple{0.2, 2, 0.4, 3}, std::tuple{0.0, 1, 1.5, 2}}) {
    const PeriodicGrid g(64);
    const RealField p1 = wave(g, a, k, true);
    const RealField p2 = wave(g, b, m);
    std::vector<double> x(g.size()), y(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      x[j] = g.node(j) + p1[j];
      y[j] = p2[j];
    }
    EXPECT_NEAR(arc_chord(SheetCurve(p1, p2)), oracle::arc_chord_pairs(x, y), 1e-12);
  }
}

TEST(ArcChord, ApproachesContinuousInfimum) {
  // x = a + a0 sin a: the infimum over the continuum is (1 - a0)^2, reached
  // as beta -> 0 at a = pi.
  const double a0 = 0.5;
  double prev = INFINITY;
  for (std::size_t n : {32, 64, 128, 256}) {
    const PeriodicGrid g(n);
    const double ac = arc_chord(SheetCurve(wave(g, a0, 1, true), RealField::zeros(g)));
    const double err = ac - (1 - a0) * (1 - a0);
    EXPECT_GT(err, 0.0);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(SheetRhs, FlatSheetCosine) {
  const PeriodicGrid g(64);
  const SheetRhs r = sheet_rhs({SheetCurve::flat(g), VortexAmplitude(wave(g, 1.0, 1)), 0.0});
  EXPECT_LT(oracle::max_diff(r.dz.x, [](double a) { return std::sin(a); }), 1e-13);
  EXPECT_LT(oracle::max_diff(r.dz.y, [](double a) { return 0.5 * std::sin(a); }), 1e-13);
  // d/da (cos a sin a) = cos 2a
  EXPECT_LT(oracle::max_diff(r.dw, [](double a) { return std::cos(2 * a); }), 1e-13);
}

TEST(SheetRhs, UniformBackgroundIsSteady) {
  const PeriodicGrid g(64);
  const SheetRhs r = sheet_rhs({SheetCurve::flat(g), VortexAmplitude(RealField::constant(g, 1.0), 1.0), 0.0});
  EXPECT_LT(r.dz.x.max_abs(), 1e-14);
  EXPECT_LT(r.dz.y.max_abs(), 1e-14);
  EXPECT_LT(r.dw.max_abs(), 1e-14);
}

TEST(SheetRhs, LinearizationAboutUnitBackground) {
  // Small p1, p2 about the flat sheet with w = 1: dp1/dt = -Lambda p2 / 2,
  // dp2/dt = -Lambda p1 / 2 to first order.
  const PeriodicGrid g(64);
  const double eps = 1e-7;
  const RealField p1 = wave(g, eps, 3);
  const RealField p2 = wave(g, eps, 2, true);
  const SheetRhs r = sheet_rhs({SheetCurve(p1, p2), VortexAmplitude(RealField::constant(g, 1.0), 1.0), 0.0});
  EXPECT_LT(oracle::max_diff(r.dz.x, -0.5 * lambda_op(p2)), 1e-12);
  EXPECT_LT(oracle::max_diff(r.dz.y, -0.5 * lambda_op(p1)), 1e-12);
}

TEST(OneSided, JumpAndAverage) {
  const PeriodicGrid g(64);
  const SheetState s{SheetCurve(wave(g, 0.1, 1, true), wave(g, 0.1, 2)), VortexAmplitude(wave(g, 1.0, 1)), 0.0};
  const OneSidedVelocities v = one_sided_velocities(s);
  const VectorField br = br_integral(s.curve, s.amplitude);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(0.5 * (v.upper.x[j] + v.lower.x[j]), br.x[j], 1e-14);
    EXPECT_NEAR(0.5 * (v.upper.y[j] + v.lower.y[j]), br.y[j], 1e-14);
    const double dx = s.curve.dx()[j], dy = s.curve.dy()[j];
    // Tangential jump (u+ - u-) . dz = w.
    const double jump = (v.upper.x[j] - v.lower.x[j]) * dx + (v.upper.y[j] - v.lower.y[j]) * dy;
    EXPECT_NEAR(jump, s.amplitude.field()[j], 1e-13);
  }
}

TEST(PotentialJump, AntiderivativeOfFluctuation) {
  const PeriodicGrid g(64);
  const RealField w = wave(g, 1.0, 1) + RealField::constant(g, 2.0);
  EXPECT_LT(oracle::max_diff(potential_jump(VortexAmplitude(w, 2.0)), [](double a) { return std::sin(a); }), 1e-14);
}

TEST(Bernoulli, ResidualIsSecondOrderInSnapshotSpacing) {
  const PeriodicGrid g(64);
  const auto system = make_system(Mode::full_sheet);
  const FieldSet u0{RealField::zeros(g), wave(g, 0.05, 1, true), wave(g, 0.5, 1)};
  IntegratorConfig cfg;
  cfg.adaptive = false;
  cfg.dt_init = 1e-3;
  cfg.t_end = 0.04;
  const RunRecord rec = run_simulation(cfg, *system, u0);
  ASSERT_EQ(rec.stop_reason, StopReason::t_end);
  auto residual_at = [&](std::size_t stride) {
    std::vector<SheetState> trio;
    for (std::size_t m : {20 - stride, std::size_t(20), 20 + stride}) {
      trio.push_back(unpack_sheet(rec.snapshots[m].fields, 0.0, rec.snapshots[m].time));
    }
    return bernoulli_residual(trio).front().max_abs();
  };
  const double r4 = residual_at(8), r2 = residual_at(4);
  EXPECT_NEAR(r4 / r2, 4.0, 0.2);
}

TEST(Bernoulli, RejectsShortOrUnevenSeries) {
  const PeriodicGrid g(32);
  const SheetState s{SheetCurve::flat(g), VortexAmplitude(RealField::zeros(g)), 0.0};
  std::vector<SheetState> two{s, s};
  two[1].time = 0.1;
  EXPECT_THROW(bernoulli_residual(two), std::invalid_argument);
  std::vector<SheetState> uneven{s, s, s};
  uneven[1].time = 0.1;
  uneven[2].time = 0.3;
  EXPECT_THROW(bernoulli_residual(uneven), std::invalid_argument);
}

TEST(DuchonRobert, FlatGraphMatchesSheet) {
  const PeriodicGrid g(64);
  const GraphRhs r = duchon_robert_rhs(RealField::zeros(g), VortexAmplitude(wave(g, 1.0, 1)));
  EXPECT_LT(r.c.max_abs(), 1e-13);
  EXPECT_LT(oracle::max_diff(r.dy, [](double a) { return 0.5 * std::sin(a); }), 1e-13);
}

TEST(DuchonRobert, NormalVelocityAgreesWithSheet) {
  const PeriodicGrid g(64);
  const RealField y = wave(g, 0.1, 1, true) + wave(g, 0.03, 3);
  const VortexAmplitude w(wave(g, 1.0, 1) + wave(g, 0.3, 2, true));
  const GraphRhs r = duchon_robert_rhs(y, w);
  const VectorField br = br_integral(SheetCurve(RealField::zeros(g), y), w);
  const RealField dy = derivative(y, 1);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(r.dy[j], br.y[j] - br.x[j] * dy[j], 1e-14);
}

TEST(DuchonRobert, RejectsNonGraphCurves) {
  const PeriodicGrid g(64);
  const VortexAmplitude w(wave(g, 1.0, 1));
  EXPECT_THROW(duchon_robert_rhs(SheetCurve(wave(g, 0.1, 1, true), RealField::zeros(g)), w), GraphConditionError);
  EXPECT_NO_THROW(duchon_robert_rhs(SheetCurve(RealField::zeros(g), wave(g, 0.1, 1)), w));
}
