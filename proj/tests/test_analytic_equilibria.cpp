#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "plasmaeq/bobnev.hpp"
#include "plasmaeq/io.hpp"
#include "plasmaeq/sampling.hpp"

using namespace plasmaeq;

TEST(BobnevRoots, FirstThreeForUnitSphere) {
  const auto l = bobnev_roots(1.0, 3);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_NEAR(l[0], 2.882, 5e-4);
  EXPECT_NEAR(l[1], 4.548, 5e-4);
  EXPECT_NEAR(l[2], 6.161, 5e-4);
  for (double t : l) EXPECT_LT(std::abs(bobnev_root_function(t)), 1e-12);
}

TEST(BobnevRoots, ScaleInverselyWithRadius) {
  const auto a = bobnev_roots(1.0, 4), b = bobnev_roots(2.0, 4);
  for (size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(b[k], 0.5 * a[k], 1e-13);
}

TEST(BobnevRoots, StrictlyIncreasing) {
  const auto l = bobnev_roots(1.0, 12);
  for (size_t k = 1; k < l.size(); ++k) EXPECT_GT(l[k], l[k - 1] + 0.5);
}

TEST(V0Profile, SeriesMatchesClosedFormAtSwitch) {
  // Closed form V0 = 3 (sin x - x cos x) / x^3, V0'/x = 3((x^2-3) sin x + 3x cos x)/x^5.
  for (double x : {0.999, 1.0, 1.001}) {
    const double v = 3 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
    EXPECT_NEAR(v0_profile(x), v, 1e-14);
  }
  EXPECT_DOUBLE_EQ(v0_profile(0.0), 1.0);
  EXPECT_NEAR(v0_prime_over_x(0.0), -0.2, 1e-16);
  EXPECT_NEAR(v0_prime_over_x(0.5), (v0_profile(0.5 + 1e-6) - v0_profile(0.5 - 1e-6)) / 2e-6 / 0.5, 1e-8);
}

TEST(BobnevParams, GammaForReferenceCase) {
  const auto prm = bobnev_params(1.0, 3, 100.0, 4500.0);
  EXPECT_NEAR(prm.gamma_const, -72.831, 5e-3);
  EXPECT_NEAR(prm.lambda, 6.1615, 1e-4);
}

TEST(BobnevParams, SeparatrixRadii) {
  const auto r = separatrix_radii(bobnev_params(1.0, 3, 100.0, 4500.0));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], 0.376, 5e-4);
  EXPECT_NEAR(r[1], 0.597, 5e-4);
  const BobnevProfiles pr{bobnev_params(1.0, 3, 100.0, 4500.0)};
  for (double rho : r) EXPECT_LT(std::abs(pr.V(rho)), 1e-12);
  EXPECT_LT(std::abs(pr.V(1.0)), 1e-12);  // boundary sphere is a surface too
}

TEST(BobnevParams, FirstModeHasNoInnerSeparatrix) {
  EXPECT_TRUE(separatrix_radii(bobnev_params(1.0, 1, 1.0, 0.0)).empty());
}

TEST(BobnevParams, RejectsBadInput) {
  EXPECT_THROW(bobnev_params(0.0, 1, 1, 0), InvalidParameter);
  EXPECT_THROW(bobnev_params(1.0, 0, 1, 0), InvalidParameter);
}

TEST(BobnevState, PressureEqualsP0OnBoundaryAndSeparatrices) {
  const auto sol = bobnev_state(1.0, 3, 100.0, 4500.0);
  const auto r = separatrix_radii(sol.params);
  for (double rho : {r[0], r[1], 1.0 - 1e-15}) {
    for (double th : {0.3, 1.2, 2.5}) {
      const Point3 p{rho * std::sin(th), 0.0, rho * std::cos(th)};
      EXPECT_NEAR(sol.state.P(p), 4500.0, 1e-9);
    }
  }
}

TEST(BobnevState, ForceBalanceAndSolenoidal) {
  const auto sol = bobnev_state(1.0, 3, 100.0, 4500.0);
  double mom = 0, force = 0, div = 0, dscale = 0;
  for (const auto& p : ball_lattice(1.0, 6, 0.1)) {
    const auto r = mhd_residual(sol.state, p);
    mom = std::max(mom, norm(r.momentum));
    force = std::max(force, r.force_scale);
    div = std::max(div, std::abs(r.solenoidal));
    dscale = std::max(dscale, r.div_scale);
  }
  EXPECT_LT(mom, 1e-5 * force);
  EXPECT_LT(div, 1e-5 * dscale);
}

TEST(BobnevState, FieldIsRegularAtOrigin) {
  const auto sol = bobnev_state(1.0, 3, 100.0, 4500.0);
  const Vec3 b0 = sol.state.B({0, 0, 0});
  const Vec3 b1 = sol.state.B({1e-9, -1e-9, 1e-9});
  EXPECT_TRUE(is_finite(b0));
  EXPECT_NEAR(norm(b0 - b1), 0.0, 1e-5);
  EXPECT_EQ(b0.x, 0.0);
  EXPECT_NEAR(b0.z, sol.profiles.V(0.0), 1e-9);  // B_z(0) = -W(0) = V(0)
}

TEST(BobnevState, LabelIsConstantAlongField) {
  const auto sol = bobnev_state(1.0, 3, 100.0, 4500.0);
  for (const auto& p : ball_lattice(1.0, 5, 0.1)) {
    const Vec3 g = grad(sol.state.surface_label, p);
    const Vec3 b = sol.state.B(p);
    EXPECT_LT(std::abs(dot(b, g)), 1e-6 * (norm(b) * norm(g) + 1.0));
  }
}

TEST(BobnevState, OutsideSphereIsDomainError) {
  const auto sol = bobnev_state(1.0, 3, 100.0, 4500.0);
  EXPECT_THROW(sol.state.B.at({1.0, 0.1, 0}), DomainError);
  EXPECT_THROW(mhd_residual(sol.state, {0.99999, 0, 0}, FdScheme::absolute(1e-4)), DomainError);
}

TEST(BobnevState, SliceShowsP0AtSeparatrices) {
  // Along the equator of the (x, z) slice P - P0 changes sign at 0.376 and 0.597.
  const auto sol = bobnev_state(1.0, 3, 100.0, 4500.0);
  const auto t = slice_xz(sol.state, 0.0, 1.0, -1.0, 1.0, 1001, 3);
  std::vector<double> crossings;
  double prev_x = 0.0, prev = 0.0;
  for (const auto& row : t.rows) {
    if (row[1] != 0.0 || row[2] == 0.0) continue;  // z = 0, inside only
    const double d = row[4] - 4500.0;
    if (prev != 0.0 && d != 0.0 && (d < 0) != (prev < 0)) crossings.push_back(0.5 * (row[0] + prev_x));
    if (d != 0.0) {
      prev = d;
      prev_x = row[0];
    }
  }
  ASSERT_EQ(crossings.size(), 2u);
  EXPECT_NEAR(crossings[0], 0.376, 1e-3);
  EXPECT_NEAR(crossings[1], 0.597, 1e-3);
}
