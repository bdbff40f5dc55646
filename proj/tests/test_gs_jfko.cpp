#include <gtest/gtest.h>

#include <cmath>

#include "plasmaeq/cli/scene.hpp"
#include "plasmaeq/gs.hpp"
#include "plasmaeq/sampling.hpp"

using namespace plasmaeq;
using plasmaeq::cli::Solovev;

namespace {

const Solovev kSol{1.0, 2.0, 0.5, 1.0};

FluxGrid boundary_only(int n) {
  GridGeometry g;
  g.nr = g.nz = n;
  FluxGrid b = FluxGrid::sample(g, [](double r, double z) { return kSol.psi(r, z); });
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j) b.at(i, j) = 0.0;
  return b;
}

SolverConfig solovev_config() {
  SolverConfig c;
  c.source = AffineSource{kSol.a0, 0.0, kSol.b0, 0.0};
  return c;
}

double max_error(const FluxGrid& g) {
  double e = 0;
  for (int i = 0; i < g.geom.nr; ++i)
    for (int j = 0; j < g.geom.nz; ++j) e = std::max(e, std::abs(g.at(i, j) - kSol.psi(g.geom.r(i), g.geom.z(j))));
  return e;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Solovev, ContinuousEquationHolds) {
  // psi_rr - psi_r / r + psi_zz + a0 + r^2 b0 = 0, checked by central differences.
  const double h = 1e-3;
  for (double r : {0.6, 1.0, 1.4})
    for (double z : {-0.3, 0.2}) {
      const double rr = (kSol.psi(r + h, z) - 2 * kSol.psi(r, z) + kSol.psi(r - h, z)) / (h * h);
      const double zz = (kSol.psi(r, z + h) - 2 * kSol.psi(r, z) + kSol.psi(r, z - h)) / (h * h);
      EXPECT_NEAR(rr - kSol.psi_r(r, z) / r + zz + kSol.a0 + r * r * kSol.b0, 0.0, 1e-5);
      EXPECT_NEAR(kSol.psi_r(r, z), (kSol.psi(r + h, z) - kSol.psi(r - h, z)) / (2 * h), 1e-5);
      EXPECT_NEAR(kSol.psi_z(r, z), (kSol.psi(r, z + h) - kSol.psi(r, z - h)) / (2 * h), 1e-5);
    }
}

TEST(GsResidual, SampledExactSolutionIsSecondOrder) {
  const auto pr = ProfilePair::solovev(2.0, kSol.a0, 1.0, kSol.b0);
  std::vector<double> hs, rs;
  for (int n : {17, 33, 65}) {
    GridGeometry g;
    g.nr = g.nz = n;
    const auto grid = FluxGrid::sample(g, [](double r, double z) { return kSol.psi(r, z); });
    hs.push_back(g.dr());
    rs.push_back(max_abs(gs_residual(grid, pr)));
  }
  EXPECT_NEAR(log_log_slope(hs, rs), 2.0, 0.1);
}

TEST(SolveGs, ManufacturedSolutionConvergesAtSecondOrder) {
  std::vector<double> hs, es;
  for (int n : {17, 33, 65}) {
    const auto x = solve_gs(boundary_only(n), solovev_config());
    EXPECT_LE(x.info.residual_norm, 1e-9);
    hs.push_back(x.geom.dr());
    es.push_back(max_error(x));
  }
  EXPECT_NEAR(log_log_slope(hs, es), 2.0, 0.2);
}

TEST(SolveGs, ZeroProblemGivesZeroGrid) {
  GridGeometry g;
  g.nr = g.nz = 9;
  const auto x = solve_gs(FluxGrid(g), SolverConfig{});
  for (double v : x.psi) EXPECT_EQ(v, 0.0);
}

TEST(SolveGs, PathologicalRelaxationSurfacesHistory) {
  auto cfg = solovev_config();
  cfg.omega = 1.99;
  cfg.max_iterations = 300;
  try {
    solve_gs(boundary_only(33), cfg);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    ASSERT_EQ(e.history().size(), 300u);
    EXPECT_GT(e.history().back(), cfg.tolerance);
  }
}

TEST(SolveGs, RejectsBadSettings) {
  auto cfg = solovev_config();
  cfg.omega = 2.0;
  EXPECT_THROW(solve_gs(boundary_only(9), cfg), InvalidParameter);
  cfg.omega = 0.0;
  cfg.tolerance = 0.0;
  EXPECT_THROW(solve_gs(boundary_only(9), cfg), InvalidParameter);
  GridGeometry g;
  g.r0 = 0.0;
  EXPECT_THROW(solve_gs(FluxGrid(g), SolverConfig{}), InvalidParameter);
}

TEST(SolveGs, ManufacturedSourceMatchesAffine) {
  auto cfg = solovev_config();
  const auto a = solve_gs(boundary_only(17), cfg);
  cfg.source = ManufacturedSource{[](double r, double) { return kSol.a0 + r * r * kSol.b0; }};
  const auto b = solve_gs(boundary_only(17), cfg);
  for (size_t k = 0; k < a.psi.size(); ++k) EXPECT_NEAR(a.psi[k], b.psi[k], 1e-9);
}

TEST(SolveGs, PicardAgreesForAffineProfiles) {
  const auto pr = ProfilePair::solovev(2.0, kSol.a0, 1.0, kSol.b0);
  const auto a = solve_gs(boundary_only(17), solovev_config());
  const auto b = solve_gs_picard(boundary_only(17), pr, SolverConfig{});
  for (size_t k = 0; k < a.psi.size(); ++k) EXPECT_NEAR(a.psi[k], b.psi[k], 1e-8);
}

TEST(Jfko, GammaZeroIsGsOverRSquared) {
  const auto pr = ProfilePair::solovev(2.0, kSol.a0, 1.0, kSol.b0);
  GridGeometry g;
  g.nr = g.nz = 33;
  const auto grid = FluxGrid::sample(g, [](double r, double z) { return kSol.psi(r, z) + 0.1 * std::sin(3 * z); });
  const auto gs = gs_residual(grid, pr);
  const auto jf = jfko_residual(grid, pr, 0.0);
  for (int i = 1; i < g.nr - 1; ++i)
    for (int j = 1; j < g.nz - 1; ++j) {
      const size_t k = static_cast<size_t>(i - 1) * (g.nz - 2) + (j - 1);
      const double r = g.r(i);
      EXPECT_NEAR(jf[k] * r * r, gs[k], 1e-13 * (1 + std::abs(gs[k])));
    }
}

TEST(Jfko, GammaZeroSolveMatchesGs) {
  const auto a = solve_gs(boundary_only(17), solovev_config());
  const auto b = solve_jfko(boundary_only(17), 0.0, solovev_config());
  for (size_t k = 0; k < a.psi.size(); ++k) EXPECT_NEAR(a.psi[k], b.psi[k], 1e-8);
}

TEST(Jfko, HelicalFieldForceIdentity) {
  // For any Psi(r, u) and I, P: curl B x B - grad P = -L grad Psi with L the
  // continuous JFKO left side (mu = 1).
  const double gam = 0.7;
  auto psi = [](double r, double u) { return r * r + 0.3 * std::sin(u) + 0.2 * r * std::cos(u); };
  auto psi_r = [](double r, double u) { return 2 * r + 0.2 * std::cos(u); };
  auto psi_u = [](double r, double u) { return 0.3 * std::cos(u) - 0.2 * r * std::sin(u); };
  auto psi_rr = [](double, double) { return 2.0; };
  auto psi_uu = [](double r, double u) { return -0.3 * std::sin(u) - 0.2 * r * std::cos(u); };
  const auto F = FluxFunction::analytic(psi, psi_r, psi_u);
  const ProfilePair pr = ProfilePair::linear(1.0, 0.5, 2.0, 0.7);
  const VectorField B = jfko_field(F, pr.I, gam);
  const ScalarField label{[F, gam](const Point3& p) {
                            return F.psi(std::hypot(p.x, p.y), p.z - gam * std::atan2(p.y, p.x));
                          },
                          nullptr, B.domain};
  const ScalarField P{[label, pr](const Point3& p) { return pr.P(label(p)); }, nullptr, B.domain};
  const MhdState st{B, P, label, B.domain};
  for (const Point3 p : {Point3{1.0, 0.2, 0.1}, Point3{0.6, -0.5, 0.8}, Point3{0.9, 0.9, -0.4}}) {
    const double r = std::hypot(p.x, p.y), u = p.z - gam * std::atan2(p.y, p.x);
    const double q = r * r + gam * gam, a = r / q, da = (gam * gam - r * r) / (q * q);
    const double s = psi(r, u), I = pr.I(s);
    const double L = psi_uu(r, u) / (r * r) + (a * psi_rr(r, u) + da * psi_r(r, u)) / r + pr.IdI(s) / q +
                     2 * gam * I / (q * q) + pr.dP(s);
    const Vec3 expect = -L * grad(label, p, FdScheme::absolute(1e-5, FdOrder::central4));
    const auto res = mhd_residual(st, p, FdScheme::absolute(1e-5, FdOrder::central4));
    EXPECT_LT(norm(res.momentum - expect), 1e-7 * (res.force_scale + norm(expect))) << p;
  }
}

TEST(FromGrid, HermiteLiftIsAccurate) {
  std::vector<double> hs, ev, ed;
  for (int n : {17, 33, 65}) {
    GridGeometry g;
    g.nr = g.nz = n;
    const auto F = FluxFunction::from_grid(FluxGrid::sample(g, [](double r, double z) {
      return kSol.psi(r, z) + 0.05 * std::cos(4 * r) * std::sin(5 * z);
    }));
    double e0 = 0, e1 = 0;
    for (double r = 0.53; r < 1.47; r += 0.071)
      for (double z = -0.47; z < 0.47; z += 0.063) {
        const double ex = kSol.psi(r, z) + 0.05 * std::cos(4 * r) * std::sin(5 * z);
        const double exr = kSol.psi_r(r, z) - 0.2 * std::sin(4 * r) * std::sin(5 * z);
        e0 = std::max(e0, std::abs(F.psi(r, z) - ex));
        e1 = std::max(e1, std::abs(F.psi_a(r, z) - exr));
      }
    hs.push_back(g.dr());
    ev.push_back(e0);
    ed.push_back(e1);
  }
  EXPECT_GT(log_log_slope(hs, ev), 3.5);
  EXPECT_GT(log_log_slope(hs, ed), 2.5);
  EXPECT_LT(ev.back(), 1e-7);
}

TEST(Lifted, SolovevStateIsInEquilibrium) {
  GridGeometry box;
  const auto eq = gs_equilibrium(kSol.flux(box), ProfilePair::solovev(2.0, kSol.a0, 1.0, kSol.b0));
  for (const Point3 p : {Point3{1.0, 0.0, 0.1}, Point3{-0.7, 0.6, -0.2}, Point3{0.3, -1.1, 0.35}}) {
    const auto r = mhd_residual(eq.state, p);
    EXPECT_LT(norm(r.momentum), 1e-7 * r.force_scale) << p;
    EXPECT_LT(std::abs(r.solenoidal), 1e-7 * (r.div_scale + 1)) << p;
  }
  EXPECT_THROW(eq.state.B.at({0.2, 0, 0}), DomainError);
  EXPECT_THROW(eq.b_cyl(0.0, 0.1), SingularAxisError);
}

TEST(Lifted, SolvedGridStateIsNearEquilibrium) {
  const auto x = solve_gs(boundary_only(65), solovev_config());
  const auto eq = gs_equilibrium(FluxFunction::from_grid(x), ProfilePair::solovev(2.0, kSol.a0, 1.0, kSol.b0));
  const auto r = mhd_residual(eq.state, {1.0, 0.1, 0.05}, FdScheme::absolute(1e-4));
  EXPECT_LT(norm(r.momentum), 1e-3 * r.force_scale);
}
