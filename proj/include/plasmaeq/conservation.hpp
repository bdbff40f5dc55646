#ifndef PLASMAEQ_CONSERVATION_HPP
#define PLASMAEQ_CONSERVATION_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "plasmaeq/bobnev.hpp"
#include "plasmaeq/errors.hpp"
#include "plasmaeq/frame.hpp"
#include "plasmaeq/gs.hpp"
#include "plasmaeq/sampling.hpp"
#include "plasmaeq/states.hpp"
#include "plasmaeq/surface_function.hpp"

namespace plasmaeq {

/// zeta(x) = a + b x x
struct KillingVector {
  Vec3 a{}, b{};

  Vec3 operator()(const Point3& x) const { return a + cross(b, x); }

  static KillingVector translation(const Vec3& a) { return {a, {}}; }
  static KillingVector rotation(const Vec3& b) { return {{}, b}; }

  /// Three translations then three rotations about the coordinate axes.
  static std::vector<KillingVector> basis() {
    return {translation({1, 0, 0}), translation({0, 1, 0}), translation({0, 0, 1}),
            rotation({1, 0, 0}),    rotation({0, 1, 0}),    rotation({0, 0, 1})};
  }
};

/// Value with a magnitude to judge it against.
struct ScaledValue {
  double value = 0.0;
  double scale = 0.0;
};

enum class StressKind { isotropic_T, anisotropic_S };

struct StressTensorField {
  std::function<Mat3(const Point3&)> evaluate;
  StressKind kind = StressKind::isotropic_T;
  Domain domain;

  Mat3 operator()(const Point3& p) const { return evaluate(p); }
};

/// T = -B (x) B + (P + |B|^2/2) I
inline Mat3 stress_T_at(const Vec3& B, double P) {
  return (-1.0) * Mat3::outer(B, B) + (P + 0.5 * norm2(B)) * Mat3::identity();
}

/// S = -(1 - tau) B (x) B + (p + (1 - tau)|B|^2/2) I, p = p_perp + tau |B|^2/2
inline Mat3 stress_S_at(const Vec3& B, double p_perp, double tau) {
  const double b2 = norm2(B);
  const double p = p_perp + 0.5 * tau * b2;
  return (-(1.0 - tau)) * Mat3::outer(B, B) + (p + 0.5 * (1.0 - tau) * b2) * Mat3::identity();
}

inline StressTensorField stress_T(const MhdState& st) {
  return {[B = st.B, P = st.P](const Point3& p) { return stress_T_at(B(p), P(p)); }, StressKind::isotropic_T,
          st.domain};
}

inline StressTensorField stress_S(const CglState& st) {
  return {[B = st.B, pp = st.p_perp, t = st.tau](const Point3& p) { return stress_S_at(B(p), pp(p), t(p)); },
          StressKind::anisotropic_S, st.domain};
}

/// The vector zeta . T as a field.
inline VectorField contract(const StressTensorField& T, const KillingVector& z) {
  return {[T, z](const Point3& p) { return left_multiply(z(p), T(p)); }, nullptr, T.domain};
}

inline ScaledValue stress_divergence_residual(const StressTensorField& T, const KillingVector& z, const Point3& p,
                                              const FdScheme& s = {}) {
  const Mat3 J = jacobian(contract(T, z), p, s);
  return {J.trace(), div_scale(J)};
}

inline ScaledValue stress_divergence_residual(const MhdState& st, const KillingVector& z, const Point3& p,
                                              const FdScheme& s = {}) {
  return stress_divergence_residual(stress_T(st), z, p, s);
}

inline ScaledValue stress_divergence_residual(const CglState& st, const KillingVector& z, const Point3& p,
                                              const FdScheme& s = {}) {
  return stress_divergence_residual(stress_S(st), z, p, s);
}

// ------------------------------------------------------------- quadrature

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw InvalidParameter("gauss_legendre: n must be >= 1");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

struct SphereQuadrature {
  Point3 center{};
  double radius = 1.0;
  int n_theta = 64;
  int n_phi = 128;
};

struct SphereNode {
  Point3 x;
  Vec3 n;
  double weight;  // includes radius^2
  double theta, phi;
};

inline std::vector<SphereNode> sphere_nodes(const SphereQuadrature& q) {
  if (!(q.radius > 0.0)) throw InvalidParameter("sphere radius must be positive");
  const auto [ct, wt] = gauss_legendre(q.n_theta);
  std::vector<SphereNode> nodes;
  nodes.reserve(static_cast<size_t>(q.n_theta) * q.n_phi);
  const double dphi = 2.0 * std::numbers::pi / q.n_phi;
  for (int i = 0; i < q.n_theta; ++i) {
    const double theta = std::acos(ct[i]);
    for (int j = 0; j < q.n_phi; ++j) {
      const double phi = (j + 0.5) * dphi;
      const Vec3 n = spherical_basis(theta, phi).e_rho;
      nodes.push_back({q.center + q.radius * n, n, wt[i] * dphi * q.radius * q.radius, theta, phi});
    }
  }
  return nodes;
}

struct FluxReport {
  double value = 0.0;
  double error = 0.0;  // |Q(2n) - Q(n)|
  double scale = 0.0;  // integral of |V . n|
  double tolerance = 0.0;
  size_t samples = 0;
  bool passed = false;
};

/// Integral of a pointwise integrand g(node) over the sphere at base and doubled resolution.
template <class G>
FluxReport sphere_integral(const SphereQuadrature& q, G g, int threads = 1, double rel_tol = 1e-8) {
  auto run = [&](const SphereQuadrature& qq, double& scale) {
    const auto nodes = sphere_nodes(qq);
    const auto vals = parallel_map(nodes, [&](const SphereNode& nd) { return g(nd); }, threads);
    double s = 0.0;
    scale = 0.0;
    for (size_t k = 0; k < nodes.size(); ++k) {
      s += nodes[k].weight * vals[k];
      scale += nodes[k].weight * std::abs(vals[k]);
    }
    return std::make_pair(s, nodes.size());
  };
  double sc0 = 0.0, sc1 = 0.0;
  const auto [v0, n0] = run(q, sc0);
  SphereQuadrature q2 = q;
  q2.n_theta *= 2;
  q2.n_phi *= 2;
  const auto [v1, n1] = run(q2, sc1);
  FluxReport r;
  r.value = v1;
  r.error = std::abs(v1 - v0);
  r.scale = sc1;
  r.samples = n0 + n1;
  r.tolerance = std::max(rel_tol * r.scale, 10.0 * r.error);
  r.passed = std::isfinite(r.value) && std::abs(r.value) <= r.tolerance;
  return r;
}

/// Net outward flux of V through the sphere.
inline FluxReport flux_surface_integral(const VectorField& V, const SphereQuadrature& q, int threads = 1) {
  return sphere_integral(q, [&](const SphereNode& nd) { return dot(V.at(nd.x), nd.n); }, threads);
}

// ------------------------------------------------------------ table fluxes

/// Curl used inside flux rows. Fourth order keeps the FD error well below
/// the flux tolerance.
inline FdScheme default_curl_scheme() { return FdScheme::absolute(1e-4, FdOrder::central4); }

enum class FluxRow { stress, flux, current };

struct FluxRowSpec {
  FluxRow row = FluxRow::stress;
  KillingVector zeta{};
  SurfaceFunction f = SurfaceFunction::constant(1.0);
  FdScheme curl_scheme = default_curl_scheme();
};

/// Conserved vectors: zeta.T, f(P) B, f(P) J.
inline VectorField mhd_conserved_flux(const MhdState& st, const FluxRowSpec& spec) {
  switch (spec.row) {
    case FluxRow::stress:
      return contract(stress_T(st), spec.zeta);
    case FluxRow::flux:
      return {[B = st.B, P = st.P, f = spec.f](const Point3& p) { return f(P(p)) * B(p); }, nullptr, st.domain};
    case FluxRow::current: {
      VectorField J = curl_field(st.B, spec.curl_scheme);
      return {[J, P = st.P, f = spec.f](const Point3& p) { return f(P(p)) * J(p); }, nullptr, st.domain};
    }
  }
  return {};
}

/// Conserved vectors: zeta.S, f(p) B, f(p) A with A = curl(sqrt(1 - tau) B).
inline VectorField cgl_conserved_flux(const CglState& st, const FluxRowSpec& spec) {
  const MhdState iso = isotropic_image(st);
  switch (spec.row) {
    case FluxRow::stress:
      return contract(stress_S(st), spec.zeta);
    case FluxRow::flux:
      return {[B = st.B, p = iso.P, f = spec.f](const Point3& x) { return f(p(x)) * B(x); }, nullptr, st.domain};
    case FluxRow::current: {
      VectorField A = curl_field(iso.B, spec.curl_scheme);
      return {[A, p = iso.P, f = spec.f](const Point3& x) { return f(p(x)) * A(x); }, nullptr, st.domain};
    }
  }
  return {};
}

// ----------------------------------------------------- multiplier identities

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;
};

/// Multiplier-weighted equation residuals against the divergence of the row
/// flux, oriented so that lhs = rhs holds identically (rows 1 and 3 carry a
/// minus sign on the tabulated flux).
inline IdentityCheck multiplier_identity_check(const MhdState& st, const FluxRowSpec& spec, const Point3& p,
                                               const FdScheme& s = {}) {
  const Mat3 JB = jacobian(st.B, p, s);
  const Vec3 b = st.B.at(p);
  const Vec3 j = curl_from_jacobian(JB);
  const Vec3 gp = grad(st.P, p, s);
  const double divB = JB.trace();
  const Vec3 mom = cross(j, b) - gp;
  const double P = st.P(p);

  IdentityCheck out;
  double sign = 1.0;
  switch (spec.row) {
    case FluxRow::stress: {
      const Vec3 z = spec.zeta(p);
      out.lhs = dot(b, z) * divB + dot(z, mom);
      sign = -1.0;
      break;
    }
    case FluxRow::flux:
      out.lhs = spec.f(P) * divB - spec.f.derivative(P) * dot(b, mom);
      break;
    case FluxRow::current: {
      const Vec3 jj = curl(st.B, p, spec.curl_scheme);
      out.lhs = spec.f.derivative(P) * dot(jj, mom);
      sign = -1.0;
      break;
    }
  }
  const Mat3 JF = jacobian(mhd_conserved_flux(st, spec), p, s);
  out.rhs = sign * JF.trace();
  out.scale = div_scale(JF) + std::abs(out.lhs);
  return out;
}

inline IdentityCheck multiplier_identity_check(const CglState& st, const FluxRowSpec& spec, const Point3& p,
                                               const FdScheme& s = {}) {
  const Mat3 JB = jacobian(st.B, p, s);
  const Vec3 b = st.B.at(p);
  const Vec3 j = curl_from_jacobian(JB);
  const double tau = st.tau.at(p);
  const Vec3 gpp = grad(st.p_perp, p, s);
  const Vec3 gtau = grad(st.tau, p, s);
  const double divB = JB.trace();
  const Vec3 mom = (1.0 - tau) * cross(j, b) - gpp - tau * left_multiply(b, JB);
  const double state = dot(b, gtau);
  const double pm = st.mean_pressure(p);

  IdentityCheck out;
  double sign = 1.0;
  switch (spec.row) {
    case FluxRow::stress: {
      const Vec3 z = spec.zeta(p);
      const double bz = dot(b, z);
      out.lhs = (1.0 - tau) * bz * divB + dot(z, mom) - bz * state;
      sign = -1.0;
      break;
    }
    case FluxRow::flux: {
      const double fp = spec.f.derivative(pm);
      out.lhs = spec.f(pm) * divB - fp * dot(b, mom) + 0.5 * fp * norm2(b) * state;
      break;
    }
    case FluxRow::current: {
      const Vec3 A = curl(isotropic_image(st).B, p, spec.curl_scheme);
      const double fp = spec.f.derivative(pm);
      out.lhs = fp * dot(A, mom) - 0.5 * fp * dot(A, b) * state;
      sign = -1.0;
      break;
    }
  }
  const Mat3 JF = jacobian(cgl_conserved_flux(st, spec), p, s);
  out.rhs = sign * JF.trace();
  out.scale = div_scale(JF) + std::abs(out.lhs);
  return out;
}

// ------------------------------------------------------ Bobnev closed forms

struct SphericalKilling {
  double a_rho, a_theta, a_phi, b_rho, b_theta, b_phi;
};

/// Spherical components of the constant vectors a, b at angles (theta, phi).
inline SphericalKilling spherical_components(const KillingVector& z, double theta, double phi) {
  const auto e = spherical_basis(theta, phi);
  return {dot(z.a, e.e_rho), dot(z.a, e.e_theta), dot(z.a, e.e_phi),
          dot(z.b, e.e_rho), dot(z.b, e.e_theta), dot(z.b, e.e_phi)};
}

struct BobnevIntegrands {
  double stress = 0.0;    // equals -(zeta . T . n)
  double magnetic = 0.0;  // f(P) B . n
  double current = 0.0;   // f(P) J . n
};

inline BobnevIntegrands bobnev_flux_integrands(const BobnevProfiles& pr, const KillingVector& z,
                                               const SurfaceFunction& f, double rho, double theta, double phi) {
  const auto k = spherical_components(z, theta, phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double V = pr.V(rho), U = pr.U(rho), W = pr.W(rho), p = pr.p(rho);
  const double P0 = pr.prm.P0;
  const double P = P0 - p * st * st;
  BobnevIntegrands out;
  out.stress = k.a_rho * (-P0 + p * st * st + 0.5 * (V * V * ct * ct - (U * U + W * W) * st * st)) +
               V * st * ct * (U * (k.a_phi - rho * k.b_theta) + W * (k.a_theta + rho * k.b_phi));
  out.magnetic = f(P) * V * ct;
  out.current = 2.0 * f(P) * (U / rho) * ct;
  return out;
}

/// Stress integrand on a sphere where V = 0: a_rho [-P0 - rho^2 V'^2 sin^2 / 8].
inline double separatrix_stress_integrand(const BobnevProfiles& pr, const KillingVector& z, double rho,
                                          double theta, double phi) {
  const auto k = spherical_components(z, theta, phi);
  const double dV = pr.dV(rho), st = std::sin(theta);
  return k.a_rho * (-pr.prm.P0 - rho * rho * dV * dV * st * st / 8.0);
}

// --------------------------------------------------- cylindrical laws

namespace detail {
template <class F>
double deriv1(F f, double x, const FdScheme& s) {
  const double h = s.h;
  if (s.order == FdOrder::central2) return (f(x + h) - f(x - h)) / (2 * h);
  return (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h);
}
}  // namespace detail

/// Divergence-form stress laws of an axisymmetric state, written as
///   (1/r) d_r [r F_r] + (1/r) d_phi [F_phi] + d_z [F_z],
/// law 1..6 in the order x-stress, y-stress, z-stress, x-, y-, z-angular stress.
/// Laws 3 and 6 carry no phi and never evaluate it. Step h is absolute.
inline ScaledValue cylindrical_cl_residual(const AxisymmetricEquilibrium& eq, int law, const CylindricalPoint& c,
                                           const FdScheme& s = FdScheme::absolute(1e-4)) {
  if (law < 1 || law > 6) throw InvalidParameter("cylindrical law index must be 1..6");
  if (!(c.r > 0.0)) throw SingularAxisError("cylindrical laws undefined at r = 0");

  struct Flux {
    double Fr, Fphi, Fz;
  };
  auto fluxes = [&eq, law](double r, double phi, double z) -> Flux {
    const Vec3 B = eq.b_cyl(r, z);
    const double Br = B.x, Bp = B.y, Bz = B.z;
    const double e = eq.pressure(r, z) + 0.5 * norm2(B);
    if (law == 3) return {Br * Bz, 0.0, -(e - Bz * Bz)};
    if (law == 6) return {r * Br * Bp, 0.0, r * Bp * Bz};
    const double cp = std::cos(phi), sp = std::sin(phi);
    switch (law) {
      case 1:
        return {(e - Br * Br) * cp + Br * Bp * sp, -((e - Bp * Bp) * sp + Br * Bp * cp),
                -Bz * (Br * cp - Bp * sp)};
      case 2:
        return {(e - Br * Br) * sp - Br * Bp * cp, (e - Bp * Bp) * cp - Br * Bp * sp,
                -Bz * (Br * sp + Bp * cp)};
      case 4:
        return {(z * (e - Br * Br) + r * Br * Bz) * sp - z * Br * Bp * cp,
                z * (e - Bp * Bp) * cp + (r * Bz - z * Br) * Bp * sp,
                -((r * (e - Bz * Bz) + z * Br * Bz) * sp + z * Bp * Bz * cp)};
      default:  // 5
        return {(z * (e - Br * Br) + r * Br * Bz) * cp + z * Br * Bp * sp,
                -(z * (e - Bp * Bp) * sp - (r * Bz - z * Br) * Bp * cp),
                -((r * (e - Bz * Bz) + z * Br * Bz) * cp - z * Bp * Bz * sp)};
    }
  };

  const double t_r = detail::deriv1([&](double r) { return r * fluxes(r, c.phi, c.z).Fr; }, c.r, s) / c.r;
  const double t_z = detail::deriv1([&](double z) { return fluxes(c.r, c.phi, z).Fz; }, c.z, s);
  double t_phi = 0.0;
  if (law != 3 && law != 6)
    t_phi = detail::deriv1([&](double phi) { return fluxes(c.r, phi, c.z).Fphi; }, c.phi, s) / c.r;
  return {t_r + t_phi + t_z, std::abs(t_r) + std::abs(t_phi) + std::abs(t_z)};
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_CONSERVATION_HPP
