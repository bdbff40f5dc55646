#ifndef PLASMAEQ_GS_HPP
#define PLASMAEQ_GS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "plasmaeq/errors.hpp"
#include "plasmaeq/frame.hpp"
#include "plasmaeq/states.hpp"
#include "plasmaeq/surface_function.hpp"

namespace plasmaeq {

/// Uniform rectangular grid in (r, z) or (r, u). Axis excluded: r0 > 0.
struct GridGeometry {
  double r0 = 0.5, r1 = 1.5;
  double z0 = -0.5, z1 = 0.5;
  int nr = 33, nz = 33;

  double dr() const { return (r1 - r0) / (nr - 1); }
  double dz() const { return (z1 - z0) / (nz - 1); }
  double r(int i) const { return r0 + i * dr(); }
  double z(int j) const { return z0 + j * dz(); }

  void validate() const {
    if (nr < 3 || nz < 3) throw InvalidParameter("grid needs >= 3 nodes per direction");
    if (!(r0 > 0.0)) throw InvalidParameter("grid must exclude the axis (r0 > 0)");
    if (!(r1 > r0) || !(z1 > z0)) throw InvalidParameter("grid extents must be increasing");
  }
};

struct SolveInfo {
  int iterations = 0;
  double final_update = 0.0;
  double residual_norm = 0.0;
  std::vector<double> history;  // max update per sweep
};

struct FluxGrid {
  GridGeometry geom;
  std::vector<double> psi;  // index i * nz + j
  SolveInfo info;

  FluxGrid() = default;
  explicit FluxGrid(GridGeometry g, double fill = 0.0) : geom(g), psi(static_cast<size_t>(g.nr) * g.nz, fill) {
    geom.validate();
  }

  double& at(int i, int j) { return psi[static_cast<size_t>(i) * geom.nz + j]; }
  double at(int i, int j) const { return psi[static_cast<size_t>(i) * geom.nz + j]; }

  template <class F>
  static FluxGrid sample(GridGeometry g, F f) {
    FluxGrid out(g);
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; j < g.nz; ++j) out.at(i, j) = f(g.r(i), g.z(j));
    return out;
  }
};

/// I(psi) and P(psi) with analytic derivatives.
struct ProfilePair {
  SurfaceFunction I;
  SurfaceFunction P;

  double IdI(double psi) const { return I(psi) * I.derivative(psi); }
  double dP(double psi) const { return P.derivative(psi); }

  static ProfilePair zero() { return {SurfaceFunction::constant(0.0), SurfaceFunction::constant(0.0)}; }

  /// I I' = ii0 (I^2 = I0^2 + 2 ii0 psi) and P = P_axis + dp0 psi.
  static ProfilePair solovev(double I0, double ii0, double P_axis, double dp0) {
    SurfaceFunction I{[I0, ii0](double s) { return std::sqrt(I0 * I0 + 2.0 * ii0 * s); },
                      [I0, ii0](double s) { return ii0 / std::sqrt(I0 * I0 + 2.0 * ii0 * s); },
                      "sqrt(I0^2 + 2 ii0 psi)"};
    return {std::move(I), SurfaceFunction::affine(P_axis, dp0)};
  }

  /// I = i0 + i1 psi, P = p0 + p1 psi.
  static ProfilePair linear(double i0, double i1, double p0, double p1) {
    return {SurfaceFunction::affine(i0, i1), SurfaceFunction::affine(p0, p1)};
  }
};

// ------------------------------------------------------------ residuals

namespace detail {
struct NodeDerivs {
  double rr, r, zz;
};

inline NodeDerivs node_derivs(const FluxGrid& g, int i, int j) {
  const double dr = g.geom.dr(), dz = g.geom.dz();
  const double c = g.at(i, j);
  return {(g.at(i + 1, j) - 2.0 * c + g.at(i - 1, j)) / (dr * dr),
          (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * dr),
          (g.at(i, j + 1) - 2.0 * c + g.at(i, j - 1)) / (dz * dz)};
}
}  // namespace detail

/// Interior residual array (nr-2) x (nz-2), index (i-1) * (nz-2) + (j-1).
inline std::vector<double> gs_residual(const FluxGrid& g, const ProfilePair& pr) {
  g.geom.validate();
  const int nr = g.geom.nr, nz = g.geom.nz;
  std::vector<double> out(static_cast<size_t>(nr - 2) * (nz - 2));
  for (int i = 1; i < nr - 1; ++i) {
    const double r = g.geom.r(i);
    for (int j = 1; j < nz - 1; ++j) {
      const auto d = detail::node_derivs(g, i, j);
      const double psi = g.at(i, j);
      out[static_cast<size_t>(i - 1) * (nz - 2) + (j - 1)] =
          d.rr - d.r / r + d.zz + pr.IdI(psi) + r * r * pr.dP(psi);
    }
  }
  return out;
}

/// Helical analogue on a (r, u) grid; mu multiplies P'.
inline std::vector<double> jfko_residual(const FluxGrid& g, const ProfilePair& pr, double gamma,
                                         double mu = 1.0) {
  g.geom.validate();
  const int nr = g.geom.nr, nz = g.geom.nz;
  const double g2 = gamma * gamma;
  std::vector<double> out(static_cast<size_t>(nr - 2) * (nz - 2));
  for (int i = 1; i < nr - 1; ++i) {
    const double r = g.geom.r(i);
    const double q = r * r + g2;
    const double a = r / q;                // r / (r^2 + gamma^2)
    const double da = (g2 - r * r) / (q * q);
    for (int j = 1; j < nz - 1; ++j) {
      const auto d = detail::node_derivs(g, i, j);
      const double psi = g.at(i, j);
      const double I = pr.I(psi);
      out[static_cast<size_t>(i - 1) * (nz - 2) + (j - 1)] =
          d.zz / (r * r) + (a * d.rr + da * d.r) / r + pr.IdI(psi) / q + 2.0 * gamma * I / (q * q) +
          mu * pr.dP(psi);
    }
  }
  return out;
}

// ---------------------------------------------------------------- solver

/// I I'(psi) = ii0 + ii1 psi, P'(psi) = dp0 + dp1 psi.
struct AffineSource {
  double ii0 = 0.0, ii1 = 0.0, dp0 = 0.0, dp1 = 0.0;
};

/// Explicit source S(r, z): the equation reads L psi + S = 0.
struct ManufacturedSource {
  std::function<double(double, double)> S;
};

struct SolverConfig {
  int max_iterations = 20000;
  double tolerance = 1e-10;
  double omega = 0.0;  // 0 selects the optimal SOR factor for the grid
  std::variant<AffineSource, ManufacturedSource> source = AffineSource{};
};

/// Optimal SOR factor for the 5-point Laplacian on an nr x nz grid.
inline double optimal_sor_omega(int nr, int nz) {
  const double rho = 0.5 * (std::cos(std::numbers::pi / (nr - 1)) + std::cos(std::numbers::pi / (nz - 1)));
  return 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
}

/// Linear 5-point problem  aE psi_E + aW psi_W + aN psi_N + aS psi_S + aC psi_C + s = 0.
struct StencilRow {
  double aE, aW, aN, aS, aC, s;
};

/// SOR on a linear 5-point operator with Dirichlet data taken from `g`.
/// Converged when the max update < tol and max |residual| <= 10 tol.
template <class RowFn>
void sor_solve(FluxGrid& g, RowFn row, const SolverConfig& cfg) {
  if (!(cfg.tolerance > 0.0)) throw InvalidParameter("solver tolerance must be positive");
  const int nr = g.geom.nr, nz = g.geom.nz;
  const double omega = cfg.omega > 0.0 ? cfg.omega : optimal_sor_omega(nr, nz);
  if (!(omega > 0.0 && omega < 2.0)) throw InvalidParameter("relaxation factor must lie in (0, 2)");

  std::vector<StencilRow> rows(static_cast<size_t>(nr) * nz);
  for (int i = 1; i < nr - 1; ++i)
    for (int j = 1; j < nz - 1; ++j) rows[static_cast<size_t>(i) * nz + j] = row(i, j);

  auto residual_norm = [&] {
    double m = 0.0;
    for (int i = 1; i < nr - 1; ++i)
      for (int j = 1; j < nz - 1; ++j) {
        const auto& c = rows[static_cast<size_t>(i) * nz + j];
        const double res = c.aE * g.at(i + 1, j) + c.aW * g.at(i - 1, j) + c.aN * g.at(i, j + 1) +
                           c.aS * g.at(i, j - 1) + c.aC * g.at(i, j) + c.s;
        m = std::max(m, std::abs(res));
      }
    return m;
  };

  SolveInfo info;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    double upd = 0.0;
    for (int i = 1; i < nr - 1; ++i)
      for (int j = 1; j < nz - 1; ++j) {
        const auto& c = rows[static_cast<size_t>(i) * nz + j];
        const double gs = -(c.aE * g.at(i + 1, j) + c.aW * g.at(i - 1, j) + c.aN * g.at(i, j + 1) +
                            c.aS * g.at(i, j - 1) + c.s) / c.aC;
        const double d = omega * (gs - g.at(i, j));
        g.at(i, j) += d;
        upd = std::max(upd, std::abs(d));
      }
    info.history.push_back(upd);
    info.iterations = it;
    info.final_update = upd;
    if (!std::isfinite(upd)) break;
    if (upd < cfg.tolerance) {
      info.residual_norm = residual_norm();
      if (info.residual_norm <= 10.0 * cfg.tolerance) {
        g.info = std::move(info);
        return;
      }
    }
  }
  info.residual_norm = residual_norm();
  std::ostringstream os;
  os << "SOR did not converge in " << info.iterations << " iterations (omega " << omega << ", last update "
     << info.final_update << ", residual " << info.residual_norm << ")";
  throw DivergenceError(os.str(), std::move(info.history));
}

/// Solve the GS equation with Dirichlet data from the boundary nodes of `boundary`.
inline FluxGrid solve_gs(const FluxGrid& boundary, const SolverConfig& cfg) {
  FluxGrid g = boundary;
  g.geom.validate();
  const auto& geo = g.geom;
  const double dr = geo.dr(), dz = geo.dz();
  const double idr2 = 1.0 / (dr * dr), idz2 = 1.0 / (dz * dz);
  auto row = [&](int i, int j) {
    const double r = geo.r(i), z = geo.z(j);
    StencilRow c{idr2 - 0.5 / (r * dr), idr2 + 0.5 / (r * dr), idz2, idz2, -2.0 * idr2 - 2.0 * idz2, 0.0};
    if (const auto* a = std::get_if<AffineSource>(&cfg.source)) {
      c.aC += a->ii1 + r * r * a->dp1;
      c.s = a->ii0 + r * r * a->dp0;
    } else {
      c.s = std::get<ManufacturedSource>(cfg.source).S(r, z);
    }
    return c;
  };
  sor_solve(g, row, cfg);
  return g;
}

/// Helical JFKO solve on a (r, u) grid with an explicit source (L psi + S = 0).
inline FluxGrid solve_jfko(const FluxGrid& boundary, double gamma, const SolverConfig& cfg) {
  FluxGrid g = boundary;
  g.geom.validate();
  const auto& geo = g.geom;
  const double dr = geo.dr(), du = geo.dz();
  const double g2 = gamma * gamma;
  const auto* src = std::get_if<ManufacturedSource>(&cfg.source);
  const auto* aff = std::get_if<AffineSource>(&cfg.source);
  auto row = [&](int i, int j) {
    const double r = geo.r(i), u = geo.z(j);
    const double q = r * r + g2, a = r / q, da = (g2 - r * r) / (q * q);
    const double cr2 = a / (r * dr * dr), cr1 = da / (2.0 * r * dr), cu = 1.0 / (r * r * du * du);
    StencilRow c{cr2 + cr1, cr2 - cr1, cu, cu, -2.0 * cr2 - 2.0 * cu, 0.0};
    if (src) {
      c.s = src->S(r, u);
    } else {
      // I I' / q + mu P' with affine pieces; the 2 gamma I / q^2 term needs I itself,
      // so the affine mode only covers gamma = 0 or I = 0 problems.
      c.aC += aff->ii1 / q + aff->dp1;
      c.s = aff->ii0 / q + aff->dp0;
    }
    return c;
  };
  sor_solve(g, row, cfg);
  return g;
}

/// Picard outer iteration for general profiles: freeze the source at the previous
/// iterate, solve the linear problem, repeat until the outer change < tol.
inline FluxGrid solve_gs_picard(const FluxGrid& boundary, const ProfilePair& pr, SolverConfig cfg,
                                int max_outer = 200) {
  FluxGrid cur = boundary;
  std::vector<double> outer_history;
  for (int k = 0; k < max_outer; ++k) {
    auto frozen = std::make_shared<FluxGrid>(cur);
    const auto& geo = frozen->geom;
    cfg.source = ManufacturedSource{[frozen, pr, geo](double r, double z) {
      const int i = static_cast<int>(std::lround((r - geo.r0) / geo.dr()));
      const int j = static_cast<int>(std::lround((z - geo.z0) / geo.dz()));
      const double psi = frozen->at(i, j);
      return pr.IdI(psi) + r * r * pr.dP(psi);
    }};
    FluxGrid next = solve_gs(cur, cfg);
    double change = 0.0;
    for (size_t n = 0; n < next.psi.size(); ++n) change = std::max(change, std::abs(next.psi[n] - cur.psi[n]));
    outer_history.push_back(change);
    cur = std::move(next);
    if (change < cfg.tolerance * 10.0) {
      cur.info.history = outer_history;
      const auto res = gs_residual(cur, pr);
      double m = 0.0;
      for (double v : res) m = std::max(m, std::abs(v));
      cur.info.residual_norm = m;
      return cur;
    }
  }
  throw DivergenceError("Picard iteration did not converge", std::move(outer_history));
}

// ------------------------------------------------------------ flux functions

/// Psi(a, b) with first derivatives, a = r and b = z (or u).
struct FluxFunction {
  std::function<double(double, double)> psi;
  std::function<double(double, double)> psi_a;
  std::function<double(double, double)> psi_b;
  double a0 = 0.0, a1 = std::numeric_limits<double>::infinity();
  double b0 = -std::numeric_limits<double>::infinity(), b1 = std::numeric_limits<double>::infinity();

  bool contains(double a, double b) const { return a > a0 && a < a1 && b > b0 && b < b1; }

  static FluxFunction analytic(std::function<double(double, double)> f, std::function<double(double, double)> fa,
                               std::function<double(double, double)> fb) {
    return {std::move(f), std::move(fa), std::move(fb)};
  }

  /// Derivatives by central differences of f (step h).
  static FluxFunction finite_difference(std::function<double(double, double)> f, double h = 1e-5) {
    FluxFunction out;
    out.psi = f;
    out.psi_a = [f, h](double a, double b) { return (f(a + h, b) - f(a - h, b)) / (2 * h); };
    out.psi_b = [f, h](double a, double b) { return (f(a, b + h) - f(a, b - h)) / (2 * h); };
    return out;
  }

  static FluxFunction from_grid(const FluxGrid& g);
};

namespace detail {
/// Node derivatives (4th-order differences, one-sided at edges) plus bicubic
/// Hermite patches; value and first derivatives are exact for the interpolant.
struct HermiteSurface {
  GridGeometry geo;
  std::vector<double> f, fa, fb, fab;

  static double d1(const std::vector<double>& v, int k, int n, int stride, size_t base, double h) {
    auto at = [&](int m) { return v[base + static_cast<size_t>(m) * stride]; };
    if (n < 5) {
      if (k == 0) return (at(1) - at(0)) / h;
      if (k == n - 1) return (at(n - 1) - at(n - 2)) / h;
      return (at(k + 1) - at(k - 1)) / (2 * h);
    }
    if (k >= 2 && k <= n - 3) return (at(k - 2) - 8 * at(k - 1) + 8 * at(k + 1) - at(k + 2)) / (12 * h);
    if (k < 2) {
      const int o = k;  // forward 5-point stencil at offset o
      static const double c0[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
      static const double c1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
      const double* c = o == 0 ? c0 : c1;
      double s = 0;
      for (int m = 0; m < 5; ++m) s += c[m] * at(m);
      return s / (12 * h);
    }
    const int o = n - 1 - k;
    static const double c0[5] = {25.0, -48.0, 36.0, -16.0, 3.0};
    static const double c1[5] = {3.0, 10.0, -18.0, 6.0, -1.0};
    const double* c = o == 0 ? c0 : c1;
    double s = 0;
    for (int m = 0; m < 5; ++m) s += c[m] * at(n - 1 - m);
    return s / (12 * h);
  }

  explicit HermiteSurface(const FluxGrid& g) : geo(g.geom), f(g.psi) {
    const int nr = geo.nr, nz = geo.nz;
    fa.resize(f.size());
    fb.resize(f.size());
    fab.resize(f.size());
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nr; ++i) fa[static_cast<size_t>(i) * nz + j] = d1(f, i, nr, nz, j, geo.dr());
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nz; ++j) {
        const size_t base = static_cast<size_t>(i) * nz;
        fb[base + j] = d1(f, j, nz, 1, base, geo.dz());
        fab[base + j] = d1(fa, j, nz, 1, base, geo.dz());
      }
  }

  struct Eval {
    double v, da, db;
  };

  Eval eval(double a, double b) const {
    const double ha = geo.dr(), hb = geo.dz();
    int i = static_cast<int>(std::floor((a - geo.r0) / ha));
    int j = static_cast<int>(std::floor((b - geo.z0) / hb));
    i = std::clamp(i, 0, geo.nr - 2);
    j = std::clamp(j, 0, geo.nz - 2);
    const double s = (a - geo.r(i)) / ha, t = (b - geo.z(j)) / hb;
    auto h = [](double x, double out[4], double dout[4]) {
      const double x2 = x * x, x3 = x2 * x;
      out[0] = 2 * x3 - 3 * x2 + 1;
      out[1] = x3 - 2 * x2 + x;
      out[2] = -2 * x3 + 3 * x2;
      out[3] = x3 - x2;
      dout[0] = 6 * x2 - 6 * x;
      dout[1] = 3 * x2 - 4 * x + 1;
      dout[2] = -6 * x2 + 6 * x;
      dout[3] = 3 * x2 - 2 * x;
    };
    double hs[4], dhs[4], ht[4], dht[4];
    h(s, hs, dhs);
    h(t, ht, dht);
    const int nz = geo.nz;
    auto idx = [nz](int ii, int jj) { return static_cast<size_t>(ii) * nz + jj; };
    // basis in a: value at i (hs0), slope at i (hs1 * ha), value at i+1 (hs2), slope at i+1 (hs3 * ha)
    Eval e{0, 0, 0};
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        const size_t k = idx(i + p, j + q);
        const double A0 = hs[2 * p], A1 = hs[2 * p + 1] * ha, dA0 = dhs[2 * p] / ha, dA1 = dhs[2 * p + 1];
        const double B0 = ht[2 * q], B1 = ht[2 * q + 1] * hb, dB0 = dht[2 * q] / hb, dB1 = dht[2 * q + 1];
        e.v += f[k] * A0 * B0 + fa[k] * A1 * B0 + fb[k] * A0 * B1 + fab[k] * A1 * B1;
        e.da += f[k] * dA0 * B0 + fa[k] * dA1 * B0 + fb[k] * dA0 * B1 + fab[k] * dA1 * B1;
        e.db += f[k] * A0 * dB0 + fa[k] * A1 * dB0 + fb[k] * A0 * dB1 + fab[k] * A1 * dB1;
      }
    return e;
  }
};
}  // namespace detail

inline FluxFunction FluxFunction::from_grid(const FluxGrid& g) {
  auto hs = std::make_shared<const detail::HermiteSurface>(g);
  FluxFunction out;
  out.psi = [hs](double a, double b) { return hs->eval(a, b).v; };
  out.psi_a = [hs](double a, double b) { return hs->eval(a, b).da; };
  out.psi_b = [hs](double a, double b) { return hs->eval(a, b).db; };
  out.a0 = g.geom.r0;
  out.a1 = g.geom.r1;
  out.b0 = g.geom.z0;
  out.b1 = g.geom.z1;
  return out;
}

// ---------------------------------------------------------- lifted fields

/// Axisymmetric equilibrium in cylindrical form plus its Cartesian MHD state.
struct AxisymmetricEquilibrium {
  std::function<Vec3(double, double)> b_cyl;     // (B_r, B_phi, B_z) at (r, z)
  std::function<double(double, double)> pressure;  // P at (r, z)
  MhdState state;
};

namespace detail {
inline Domain annulus_domain(const FluxFunction& F) {
  return [F](const Point3& p) {
    const double r = std::hypot(p.x, p.y);
    return r > 0.0 && F.contains(r, p.z);
  };
}

inline void require_off_axis(double r) {
  if (!(r > 0.0)) throw SingularAxisError("field undefined on the axis r = 0");
}
}  // namespace detail

/// B = (psi_z / r) e_r + (I(psi) / r) e_phi - (psi_r / r) e_z.
inline VectorField gs_field(const FluxFunction& F, const SurfaceFunction& I) {
  return {[F, I](const Point3& p) {
            const double r = std::hypot(p.x, p.y);
            detail::require_off_axis(r);
            const double c = p.x / r, s = p.y / r;
            const double br = F.psi_b(r, p.z) / r, bphi = I(F.psi(r, p.z)) / r, bz = -F.psi_a(r, p.z) / r;
            return Vec3{br * c - bphi * s, br * s + bphi * c, bz};
          },
          nullptr, detail::annulus_domain(F)};
}

inline AxisymmetricEquilibrium gs_equilibrium(const FluxFunction& F, const ProfilePair& pr) {
  AxisymmetricEquilibrium eq;
  eq.b_cyl = [F, I = pr.I](double r, double z) {
    detail::require_off_axis(r);
    return Vec3{F.psi_b(r, z) / r, I(F.psi(r, z)) / r, -F.psi_a(r, z) / r};
  };
  eq.pressure = [F, P = pr.P](double r, double z) { return P(F.psi(r, z)); };
  Domain dom = detail::annulus_domain(F);
  eq.state.B = gs_field(F, pr.I);
  eq.state.P = {[F, P = pr.P](const Point3& p) { return P(F.psi(std::hypot(p.x, p.y), p.z)); }, nullptr, dom};
  eq.state.surface_label = {[F](const Point3& p) { return F.psi(std::hypot(p.x, p.y), p.z); }, nullptr, dom};
  eq.state.domain = dom;
  return eq;
}

/// Helical field: u = z - gamma phi with phi = atan2(y, x) in (-pi, pi].
/// B = (psi_u / r) e_r + (r I + gamma psi_r)/(r^2+gamma^2) e_phi + (gamma I - r psi_r)/(r^2+gamma^2) e_z.
inline VectorField jfko_field(const FluxFunction& F, const SurfaceFunction& I, double gamma) {
  Domain dom = [F, gamma](const Point3& p) {
    const double r = std::hypot(p.x, p.y);
    return r > 0.0 && F.contains(r, p.z - gamma * std::atan2(p.y, p.x));
  };
  return {[F, I, gamma](const Point3& p) {
            const double r = std::hypot(p.x, p.y);
            detail::require_off_axis(r);
            const double phi = std::atan2(p.y, p.x);
            const double u = p.z - gamma * phi;
            const double q = r * r + gamma * gamma;
            const double Iv = I(F.psi(r, u)), pr_ = F.psi_a(r, u);
            const double br = F.psi_b(r, u) / r;
            const double bphi = (r * Iv + gamma * pr_) / q;
            const double bz = (gamma * Iv - r * pr_) / q;
            const double c = p.x / r, s = p.y / r;
            return Vec3{br * c - bphi * s, br * s + bphi * c, bz};
          },
          nullptr, std::move(dom)};
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_GS_HPP
