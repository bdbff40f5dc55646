#ifndef PLASMAEQ_STATES_HPP
#define PLASMAEQ_STATES_HPP

#include <cmath>
#include <string>
#include <utility>

#include "plasmaeq/errors.hpp"
#include "plasmaeq/field.hpp"

namespace plasmaeq {

/// Isotropic equilibrium: curl B x B = grad P, div B = 0.
struct MhdState {
  VectorField B;
  ScalarField P;
  ScalarField surface_label;  // constant on field lines
  Domain domain;

  bool contains(const Point3& p) const { return in_domain(domain, p); }
};

/// Anisotropic (CGL) equilibrium. p_par is derived: p_par = p_perp + tau |B|^2.
struct CglState {
  VectorField B;
  ScalarField p_perp;
  ScalarField tau;
  ScalarField surface_label;
  Domain domain;

  bool contains(const Point3& p) const { return in_domain(domain, p); }

  double p_parallel(const Point3& p) const { return p_perp(p) + tau(p) * norm2(B(p)); }

  ScalarField p_parallel_field() const {
    return {[B = B, pp = p_perp, t = tau](const Point3& p) { return pp(p) + t(p) * norm2(B(p)); },
            nullptr, domain};
  }

  /// Mean pressure p = p_perp + tau |B|^2 / 2.
  double mean_pressure(const Point3& p) const { return p_perp(p) + 0.5 * tau(p) * norm2(B(p)); }
};

/// Embed an isotropic state as tau = 0.
inline CglState as_cgl(const MhdState& st) {
  return {st.B, st.P, ScalarField::constant(0.0), st.surface_label, st.domain};
}

struct MhdResidual {
  Vec3 momentum;       // curl B x B - grad P
  double solenoidal = 0.0;
  double force_scale = 0.0;  // |J||B| + |grad P|
  double div_scale = 0.0;    // sum |d_i B_i|
};

inline MhdResidual mhd_residual(const MhdState& st, const Point3& p, const FdScheme& s = {}) {
  const Mat3 JB = jacobian(st.B, p, s);
  const Vec3 b = st.B.at(p);
  const Vec3 j = curl_from_jacobian(JB);
  const Vec3 gp = grad(st.P, p, s);
  MhdResidual r;
  r.momentum = cross(j, b) - gp;
  r.solenoidal = JB.trace();
  r.force_scale = norm(j) * norm(b) + norm(gp);
  r.div_scale = div_scale(JB);
  return r;
}

struct CglResidual {
  Vec3 momentum;
  double solenoidal = 0.0;
  double state_eq = 0.0;  // B . grad tau
  double force_scale = 0.0;
  double div_scale = 0.0;
  double state_scale = 0.0;
};

inline CglResidual cgl_residual(const CglState& st, const Point3& p, const FdScheme& s = {}) {
  const Mat3 JB = jacobian(st.B, p, s);
  const Vec3 b = st.B.at(p);
  const Vec3 j = curl_from_jacobian(JB);
  const Vec3 gpp = grad(st.p_perp, p, s);
  const Vec3 gtau = grad(st.tau, p, s);
  const double t = st.tau.at(p);
  const Vec3 gmag = left_multiply(b, JB);  // grad(|B|^2/2)
  const double bgt = dot(b, gtau);

  CglResidual r;
  r.momentum = (1.0 - t) * cross(j, b) - gpp - t * gmag - b * bgt;
  r.solenoidal = JB.trace();
  r.state_eq = bgt;
  const double jb = norm(j) * norm(b);
  r.force_scale = std::abs(1.0 - t) * jb + norm(gpp) + std::abs(t) * norm(gmag) +
                  norm2(b) * norm(gtau);
  r.div_scale = div_scale(JB);
  r.state_scale = norm(b) * norm(gtau);
  return r;
}

/// sqrt(1 - tau) at a point, or FirehoseRegimeError.
inline double firehose_factor(double tau, const Point3& p) {
  if (!(tau < 1.0))
    throw FirehoseRegimeError("tau >= 1 at " + detail::describe(p) +
                              ": sqrt(1 - tau) is not real");
  return std::sqrt(1.0 - tau);
}

/// The isotropic pair (sqrt(1-tau) B, p_perp + tau |B|^2/2) of a CGL state.
inline MhdState isotropic_image(const CglState& st) {
  VectorField Bt{[B = st.B, t = st.tau](const Point3& p) {
                   return firehose_factor(t(p), p) * B(p);
                 },
                 nullptr, st.B.domain};
  ScalarField pm{[B = st.B, pp = st.p_perp, t = st.tau](const Point3& p) {
                   return pp(p) + 0.5 * t(p) * norm2(B(p));
                 },
                 nullptr, st.p_perp.domain};
  return {std::move(Bt), std::move(pm), st.surface_label, st.domain};
}

inline MhdResidual isotropic_image_residual(const CglState& st, const Point3& p, const FdScheme& s = {}) {
  return mhd_residual(isotropic_image(st), p, s);
}

struct EulerFields {
  VectorField v;
  ScalarField pi;
};

/// Steady Euler flow v = B with pressure pi = P0 - P - |B|^2/2.
inline EulerFields euler_map(const MhdState& st, double P0) {
  ScalarField pi{[B = st.B, P = st.P, P0](const Point3& p) {
                   return P0 - P(p) - 0.5 * norm2(B(p));
                 },
                 nullptr, st.P.domain};
  return {st.B, std::move(pi)};
}

struct EulerResidual {
  Vec3 momentum;  // (v . grad) v + grad pi
  double continuity = 0.0;
  double scale = 0.0;
  double div_scale = 0.0;
};

inline EulerResidual euler_residual(const EulerFields& e, const Point3& p, const FdScheme& s = {}) {
  const Mat3 Jv = jacobian(e.v, p, s);
  const Vec3 v = e.v.at(p);
  const Vec3 adv = Jv * v;
  const Vec3 gpi = grad(e.pi, p, s);
  EulerResidual r;
  r.momentum = adv + gpi;
  r.continuity = Jv.trace();
  r.scale = norm(adv) + norm(gpi);
  r.div_scale = div_scale(Jv);
  return r;
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_STATES_HPP
