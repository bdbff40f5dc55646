#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plasmaeq/bobnev.hpp"
#include "plasmaeq/sampling.hpp"
#include "plasmaeq/transforms.hpp"

using namespace plasmaeq;

namespace {

const BobnevSolution& vortex() {
  static const BobnevSolution s = bobnev_state(1.0, 3, 100.0, 4500.0);
  return s;
}

std::vector<Point3> pts(int n = 5) { return ball_lattice(1.0, n, 0.1); }

double rel_momentum(const MhdState& st, const std::vector<Point3>& ps) {
  double m = 0, s = 0;
  for (const auto& p : ps) {
    const auto r = mhd_residual(st, p);
    m = std::max(m, norm(r.momentum));
    s = std::max(s, r.force_scale);
  }
  return m / s;
}

double rel_momentum(const CglState& st, const std::vector<Point3>& ps) {
  double m = 0, s = 0;
  for (const auto& p : ps) {
    const auto r = cgl_residual(st, p);
    m = std::max(m, norm(r.momentum));
    s = std::max(s, r.force_scale);
  }
  return m / s;
}

// Uniform B along z with constant pressures; label x is constant on field lines.
CglState uniform_cgl(double tau, double pperp = 2.0) {
  return {VectorField::constant({0, 0, 1.5}), ScalarField::constant(pperp), ScalarField::constant(tau),
          {[](const Point3& p) { return p.x; }, [](const Point3&) { return Vec3{1, 0, 0}; }, {}}, {}};
}

}  // namespace

TEST(Isometry, RotationIsOrthogonal) {
  const EuclideanMotion m{{1, 2, 3}, 0.4, -1.1, 2.2};
  const Mat3 A = m.rotation();
  const Mat3 I = A * A.transposed();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(I(i, j), i == j ? 1.0 : 0.0, 1e-15);
  EXPECT_NEAR(A.determinant(), 1.0, 1e-15);
}

TEST(Isometry, MovesEquilibriumWithPoints) {
  const EuclideanMotion m{{0.5, -2, 1}, 0.3, 0.9, -0.4};
  const auto moved = apply_isometry(vortex().state, m);
  std::vector<Point3> ps;
  for (const auto& p : pts()) ps.push_back(m.rotation() * p + m.a);
  EXPECT_LT(rel_momentum(moved, ps), 1e-6);
  const Point3 p{0.1, 0.2, -0.3};
  EXPECT_NEAR(norm(moved.B(m.rotation() * p + m.a)), norm(vortex().state.B(p)), 1e-12);
  EXPECT_THROW(moved.B.at({0, 0, 0}), DomainError);  // origin is no longer inside
}

TEST(Scaling, PreservesBalance) {
  const auto s = apply_scaling(vortex().state, -3.0);
  EXPECT_LT(rel_momentum(s, pts()), 1e-6);
  EXPECT_DOUBLE_EQ(s.P({0.1, 0, 0}), 9.0 * vortex().state.P({0.1, 0, 0}));
}

TEST(Dilation, StretchesDomain) {
  const auto d = apply_dilation(vortex().state, 2.0);
  std::vector<Point3> ps;
  for (const auto& p : pts()) ps.push_back(2.0 * p);
  EXPECT_LT(rel_momentum(d, ps), 1e-6);
  EXPECT_NO_THROW(d.B.at({1.5, 0, 0}));
  EXPECT_THROW(apply_dilation(vortex().state, 0.0), InvalidParameter);
}

TEST(PressureShift, AddsConstant) {
  const auto s = apply_pressure_shift(vortex().state, -4500.0);
  EXPECT_NEAR(s.P({0.2, 0.1, 0}), vortex().state.P({0.2, 0.1, 0}) - 4500.0, 1e-12);
  EXPECT_LT(rel_momentum(s, pts()), 1e-6);
}

TEST(MhdToCgl, OscillatoryFamilyIsCglEquilibrium) {
  TransformOptions opt;
  opt.samples = pts();
  const auto c = mhd_to_cgl(vortex().state, SurfaceFunction::oscillatory(200, 60), 0.0, opt);
  EXPECT_LT(rel_momentum(c, pts()), 1e-6);
  double worst = 0, scale = 0;
  for (const auto& p : pts(3)) {
    EXPECT_NEAR(c.p_parallel(p), mhd_to_cgl_p_parallel(vortex().state, SurfaceFunction::oscillatory(200, 60), 0, p),
                1e-9);
    const auto r = cgl_residual(c, p);
    worst = std::max(worst, std::abs(r.state_eq));
    scale = std::max(scale, r.state_scale);
  }
  EXPECT_LT(worst, 1e-5 * scale);
}

TEST(MhdToCgl, RoundTripRecoversState) {
  const auto M = SurfaceFunction::oscillatory(200, 60);
  const double P1 = 17.0;
  const auto back = cgl_to_mhd(mhd_to_cgl(vortex().state, M, P1));
  for (const auto& p : pts()) {
    const Vec3 b = vortex().state.B(p);
    EXPECT_LE(norm(back.B(p) - b), 1e-12 * norm(b));
    EXPECT_NEAR(back.P(p), vortex().state.P(p) + P1, 1e-12 * vortex().state.P(p));
  }
}

TEST(MhdToCgl, RejectsVanishingM) {
  TransformOptions opt;
  opt.samples = pts();
  EXPECT_THROW(mhd_to_cgl(vortex().state, SurfaceFunction::affine(1.0, 0.1), 0.0, opt), DegenerateError);
  EXPECT_THROW(mhd_to_cgl(vortex().state, SurfaceFunction::constant(0.0), 0.0, opt), DegenerateError);
}

TEST(MhdToCgl, RejectsLabelThatIsNotASurfaceFunction) {
  MhdState st = vortex().state;
  st.surface_label = {[](const Point3& p) { return p.x; }, nullptr, st.domain};
  TransformOptions opt;
  opt.samples = pts(3);
  EXPECT_THROW(mhd_to_cgl(st, SurfaceFunction::constant(2.0), 0.0, opt), DegenerateError);
}

TEST(MhdToCgl, LazyMCheckCatchesZeroWithoutSamples) {
  const auto c = mhd_to_cgl(vortex().state, SurfaceFunction::constant(0.0), 0.0);
  EXPECT_THROW(c.B({0.1, 0, 0}), DegenerateError);
}

TEST(InfiniteTransform, InvariantsHold) {
  const auto base = mhd_to_cgl(vortex().state, SurfaceFunction::oscillatory(200, 60), 0.0);
  const auto M = SurfaceFunction::affine(1.3, 0.004);
  const auto t = infinite_transform(base, M);
  for (const auto& p : pts()) {
    const Vec3 a = std::sqrt(1 - t.tau(p)) * t.B(p);
    const Vec3 b = std::sqrt(1 - base.tau(p)) * base.B(p);
    EXPECT_LE(norm(a - b), 1e-13 * norm(b));
    EXPECT_NEAR(t.mean_pressure(p), base.mean_pressure(p), 1e-13 * base.mean_pressure(p));
    EXPECT_NEAR(infinite_transform_p_parallel(base, M, p), t.p_parallel(p), 1e-9);
  }
}

TEST(InfiniteTransform, FirehoseSignIsInvariant) {
  for (double m : {0.2, 1.0, 5.0})
    for (double tau : {-1.0, 0.5, 2.0}) {
      const auto st = uniform_cgl(tau);
      const auto t = infinite_transform(st, SurfaceFunction::constant(m));
      const Point3 p{0.3, 0.1, 0};
      EXPECT_EQ(std::signbit(1 - t.tau(p)), std::signbit(1 - tau)) << m << " " << tau;
      EXPECT_EQ(firehose_unstable(t, p), tau > 1.0);
    }
}

TEST(InfiniteTransform, TwoStepsEqualProduct) {
  const auto base = mhd_to_cgl(vortex().state, SurfaceFunction::oscillatory(200, 60), 0.0);
  GroupElement g1(1), g2(-1);
  g1.add("psi", 0.002, SurfaceFunction::identity());
  g2.add("sin", 0.3, {[](double s) { return std::sin(s / 50); }, [](double s) { return std::cos(s / 50) / 50; }, ""});
  const auto two = infinite_transform(infinite_transform(base, g1.as_function()), g2.as_function());
  const auto one = infinite_transform(base, compose(g1, g2).as_function());
  for (const auto& p : pts()) {
    EXPECT_LE(norm(two.B(p) - one.B(p)), 1e-13 * norm(one.B(p)));
    EXPECT_NEAR(two.tau(p), one.tau(p), 1e-13 * (1 + std::abs(one.tau(p))));
    EXPECT_NEAR(two.p_perp(p), one.p_perp(p), 1e-13 * std::abs(one.p_perp(p)));
  }
}

TEST(Stability, MirrorCriterion) {
  // p_perp (p_perp / (6 p_par) - 1) > |B|^2 / 2 with |B|^2 = 2.25.
  const auto st = uniform_cgl((1.0 - 12.0) / 2.25, 12.0);  // p_par = 1
  EXPECT_NEAR(st.p_parallel({}), 1.0, 1e-14);
  EXPECT_TRUE(mirror_unstable(st, {}));
  EXPECT_FALSE(mirror_unstable(uniform_cgl(0.0, 1.0), {}));
  EXPECT_THROW(mirror_unstable(uniform_cgl(-1.0, 2.25), {}), UndefinedCriterionError);
}

TEST(Group, AlphaMustBeSign) { EXPECT_THROW(GroupElement(2), InvalidParameter); }

TEST(Group, RandomizedAxiomsHoldExactly) {
  std::mt19937_64 rng(11);
  const std::vector<std::pair<std::string, SurfaceFunction>> basis{
      {"one", SurfaceFunction::constant(1.0)}, {"psi", SurfaceFunction::identity()},
      {"osc", SurfaceFunction::oscillatory(3, 2)}};
  // Dyadic coefficients keep coefficient sums exact in double precision.
  auto random_element = [&] {
    GroupElement g(rng() % 2 ? 1 : -1);
    for (const auto& [name, f] : basis)
      if (rng() % 3) g.add(name, (static_cast<int>(rng() % 2049) - 1024) / 256.0, f);
    return g;
  };
  for (int k = 0; k < 2000; ++k) {
    const auto a = random_element(), b = random_element(), c = random_element();
    ASSERT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
    ASSERT_EQ(compose(a, b), compose(b, a));
    ASSERT_EQ(compose(a, inverse(a)), GroupElement::identity());
    ASSERT_EQ(compose(a, GroupElement::identity()), a);
  }
}

TEST(Group, MOfComposeIsProduct) {
  GroupElement a(-1), b(1);
  a.add("psi", 0.5, SurfaceFunction::identity());
  b.add("psi", 0.25, SurfaceFunction::identity());
  EXPECT_NEAR(compose(a, b).M(2.0), a.M(2.0) * b.M(2.0), 1e-14);
  EXPECT_DOUBLE_EQ(GroupElement::identity().M(123.0), 1.0);
}

TEST(Generators, ScalingResidualIsSecondOrder) {
  std::vector<double> eps{1e-2, 1e-3, 1e-4}, ch;
  for (double e : eps)
    ch.push_back(infinitesimal_generator_check(vortex().state, Generator::scaling, e, pts(4)).change);
  EXPECT_NEAR(log_log_slope(eps, ch), 2.0, 0.2);
}

TEST(Generators, InfiniteWithConstantFIsSecondOrder) {
  const auto base = mhd_to_cgl(vortex().state, SurfaceFunction::oscillatory(200, 60), 0.0);
  std::vector<double> eps{1e-2, 1e-3, 1e-4}, ch;
  for (double e : eps)
    ch.push_back(infinitesimal_generator_check(base, Generator::infinite, e, pts(4), {},
                                               SurfaceFunction::constant(1.0))
                     .change);
  EXPECT_NEAR(log_log_slope(eps, ch), 2.0, 0.2);
}

TEST(Generators, PressureShiftIsExactToRoundoff) {
  for (double e : {1e-2, 1e-3, 1e-4}) {
    const auto g = infinitesimal_generator_check(vortex().state, Generator::pressure_shift, e, pts(4));
    EXPECT_LE(g.change, g.floor) << e;
  }
}

TEST(Generators, InfiniteNeedsAnisotropicStateAndF) {
  EXPECT_THROW(perturb(vortex().state, Generator::infinite, 1e-3), InvalidParameter);
  EXPECT_THROW(perturb(as_cgl(vortex().state), Generator::infinite, 1e-3), InvalidParameter);
}
