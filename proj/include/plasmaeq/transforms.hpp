#ifndef PLASMAEQ_TRANSFORMS_HPP
#define PLASMAEQ_TRANSFORMS_HPP

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "plasmaeq/errors.hpp"
#include "plasmaeq/sampling.hpp"
#include "plasmaeq/states.hpp"
#include "plasmaeq/surface_function.hpp"

namespace plasmaeq {

// ---------------------------------------------------------------- isometries

/// Translation a plus rotation A3(psi) A2(theta) A1(phi).
struct EuclideanMotion {
  Vec3 a{};
  double phi = 0.0, theta = 0.0, psi = 0.0;

  Mat3 rotation() const {
    auto about_z = [](double t) {
      Mat3 m = Mat3::identity();
      m(0, 0) = std::cos(t);
      m(0, 1) = std::sin(t);
      m(1, 0) = -std::sin(t);
      m(1, 1) = std::cos(t);
      return m;
    };
    Mat3 a2 = Mat3::identity();
    a2(1, 1) = std::cos(theta);
    a2(1, 2) = std::sin(theta);
    a2(2, 1) = -std::sin(theta);
    a2(2, 2) = std::cos(theta);
    return about_z(psi) * a2 * about_z(phi);
  }
};

namespace detail {
/// Pull a domain back through x = inv(x').
template <class Inv>
Domain pull_back(const Domain& d, Inv inv) {
  if (!d) return {};
  return [d, inv](const Point3& p) { return d(inv(p)); };
}

template <class Inv>
ScalarField pull_scalar(const ScalarField& f, Inv inv, const Domain& dom) {
  return {[f, inv](const Point3& p) { return f(inv(p)); }, nullptr, dom};
}
}  // namespace detail

inline MhdState apply_isometry(const MhdState& st, const EuclideanMotion& m) {
  const Mat3 A = m.rotation(), At = A.transposed();
  const Vec3 a = m.a;
  auto inv = [At, a](const Point3& q) { return At * (q - a); };
  Domain dom = detail::pull_back(st.domain, inv);
  VectorField B{[B = st.B, A, inv](const Point3& q) { return A * B(inv(q)); }, nullptr,
                detail::pull_back(st.B.domain, inv)};
  return {std::move(B), detail::pull_scalar(st.P, inv, detail::pull_back(st.P.domain, inv)),
          detail::pull_scalar(st.surface_label, inv, dom), dom};
}

inline CglState apply_isometry(const CglState& st, const EuclideanMotion& m) {
  const Mat3 A = m.rotation(), At = A.transposed();
  const Vec3 a = m.a;
  auto inv = [At, a](const Point3& q) { return At * (q - a); };
  Domain dom = detail::pull_back(st.domain, inv);
  VectorField B{[B = st.B, A, inv](const Point3& q) { return A * B(inv(q)); }, nullptr,
                detail::pull_back(st.B.domain, inv)};
  return {std::move(B), detail::pull_scalar(st.p_perp, inv, dom), detail::pull_scalar(st.tau, inv, dom),
          detail::pull_scalar(st.surface_label, inv, dom), dom};
}

// ------------------------------------------------ scaling, dilation, shift

inline MhdState apply_scaling(const MhdState& st, double a4) {
  MhdState out = st;
  out.B = {[B = st.B, a4](const Point3& p) { return a4 * B(p); }, nullptr, st.B.domain};
  out.P = {[P = st.P, a4](const Point3& p) { return a4 * a4 * P(p); }, nullptr, st.P.domain};
  return out;
}

inline CglState apply_scaling(const CglState& st, double a4) {
  CglState out = st;
  out.B = {[B = st.B, a4](const Point3& p) { return a4 * B(p); }, nullptr, st.B.domain};
  out.p_perp = {[P = st.p_perp, a4](const Point3& p) { return a4 * a4 * P(p); }, nullptr, st.p_perp.domain};
  return out;
}

template <class State>
State apply_dilation(const State& st, double a5) {
  if (a5 == 0.0 || !std::isfinite(a5)) throw InvalidParameter("dilation factor must be nonzero and finite");
  auto inv = [a5](const Point3& q) { return q / a5; };
  State out = st;
  out.domain = detail::pull_back(st.domain, inv);
  out.B = {[B = st.B, inv](const Point3& q) { return B(inv(q)); }, nullptr,
           detail::pull_back(st.B.domain, inv)};
  out.surface_label = detail::pull_scalar(st.surface_label, inv, out.domain);
  if constexpr (std::is_same_v<State, MhdState>) {
    out.P = detail::pull_scalar(st.P, inv, detail::pull_back(st.P.domain, inv));
  } else {
    out.p_perp = detail::pull_scalar(st.p_perp, inv, out.domain);
    out.tau = detail::pull_scalar(st.tau, inv, out.domain);
  }
  return out;
}

inline MhdState apply_pressure_shift(const MhdState& st, double a6) {
  MhdState out = st;
  out.P = {[P = st.P, a6](const Point3& p) { return P(p) + a6; }, nullptr, st.P.domain};
  return out;
}

inline CglState apply_pressure_shift(const CglState& st, double a6) {
  CglState out = st;
  out.p_perp = {[P = st.p_perp, a6](const Point3& p) { return P(p) + a6; }, nullptr, st.p_perp.domain};
  return out;
}

// ------------------------------------------------------ surface-label maps

struct TransformOptions {
  std::vector<Point3> samples;  // where label validity and |M| are asserted
  FdScheme scheme{};
  double label_tolerance = 1e-6;
  double min_abs_M = 1e-8;
};

/// max |B . grad psi| / max |B| |grad psi| over the samples. The global scale
/// keeps O-points (grad psi = 0) from inflating the FD error.
inline double surface_label_defect(const VectorField& B, const ScalarField& label,
                                   const std::vector<Point3>& samples, const FdScheme& s) {
  double worst = 0.0, scale = 0.0;
  for (const auto& p : samples) {
    const Vec3 b = B.at(p);
    const Vec3 g = grad(label, p, s);
    worst = std::max(worst, std::abs(dot(b, g)));
    scale = std::max(scale, norm(b) * norm(g));
  }
  return scale > 0.0 ? worst / scale : worst;
}

namespace detail {
inline void check_preconditions(const VectorField& B, const ScalarField& label, const SurfaceFunction& M,
                                const TransformOptions& opt) {
  if (opt.samples.empty()) return;
  const double defect = surface_label_defect(B, label, opt.samples, opt.scheme);
  if (!(defect < opt.label_tolerance)) {
    std::ostringstream os;
    os << "surface label is not constant on field lines (defect " << defect << " >= " << opt.label_tolerance
       << ")";
    throw DegenerateError(os.str());
  }
  double mmin = std::numeric_limits<double>::infinity();
  double lo = mmin, hi = -mmin;
  Point3 at{};
  for (const auto& p : opt.samples) {
    const double mv = M(label(p));
    lo = std::min(lo, mv);
    hi = std::max(hi, mv);
    if (std::abs(mv) < mmin) { mmin = std::abs(mv); at = p; }
  }
  if (lo < 0.0 && hi > 0.0) {
    std::ostringstream os;
    os << "M(psi) changes sign on the label range (M from " << lo << " to " << hi << ", " << M.description
       << "), so it vanishes on some magnetic surface";
    throw DegenerateError(os.str());
  }
  if (!(mmin >= opt.min_abs_M)) {
    std::ostringstream os;
    os << "M(psi) vanishes on the label range: |M| = " << mmin << " at " << describe(at) << " (" << M.description
       << ")";
    throw DegenerateError(os.str());
  }
}

inline double checked_M(const SurfaceFunction& M, double psi, double min_abs) {
  const double m = M(psi);
  if (!(std::abs(m) >= min_abs)) {
    std::ostringstream os;
    os << "M(psi) = " << m << " at psi = " << psi << " is too close to zero";
    throw DegenerateError(os.str());
  }
  return m;
}
}  // namespace detail

/// B' = M B, tau' = 1 - (1 - tau)/M^2, p_perp' = p_perp + (|B|^2 - |B'|^2)/2.
inline CglState infinite_transform(const CglState& st, const SurfaceFunction& M,
                                   const TransformOptions& opt = {}) {
  detail::check_preconditions(st.B, st.surface_label, M, opt);
  const double mmin = opt.min_abs_M;
  const auto& L = st.surface_label;
  CglState out = st;
  out.B = {[B = st.B, L, M, mmin](const Point3& p) { return detail::checked_M(M, L(p), mmin) * B(p); }, nullptr,
           st.B.domain};
  out.tau = {[t = st.tau, L, M, mmin](const Point3& p) {
               const double m = detail::checked_M(M, L(p), mmin);
               return 1.0 - (1.0 - t(p)) / (m * m);
             },
             nullptr, st.tau.domain};
  out.p_perp = {[B = st.B, pp = st.p_perp, L, M, mmin](const Point3& p) {
                  const double m = detail::checked_M(M, L(p), mmin);
                  const double b2 = norm2(B(p));
                  return pp(p) + 0.5 * (b2 - m * m * b2);
                },
                nullptr, st.p_perp.domain};
  return out;
}

/// p_par' written as p_perp' + |B'|^2 (1 - (1 - (p_par - p_perp)/|B|^2) M^-2).
inline double infinite_transform_p_parallel(const CglState& st, const SurfaceFunction& M, const Point3& p) {
  const double m = M(st.surface_label(p));
  const double b2 = norm2(st.B(p));
  const double pperp = st.p_perp(p), ppar = st.p_parallel(p);
  const double pperp_new = pperp + 0.5 * (b2 - m * m * b2);
  return pperp_new + m * m * b2 * (1.0 - (1.0 - (ppar - pperp) / b2) / (m * m));
}

/// Family of anisotropic equilibria generated from an isotropic one.
inline CglState mhd_to_cgl(const MhdState& st, const SurfaceFunction& M, double P1,
                           const TransformOptions& opt = {}) {
  detail::check_preconditions(st.B, st.surface_label, M, opt);
  const double mmin = opt.min_abs_M;
  const auto& L = st.surface_label;
  CglState out;
  out.domain = st.domain;
  out.surface_label = L;
  out.B = {[B = st.B, L, M, mmin](const Point3& p) { return detail::checked_M(M, L(p), mmin) * B(p); }, nullptr,
           st.B.domain};
  out.tau = {[L, M, mmin](const Point3& p) {
               const double m = detail::checked_M(M, L(p), mmin);
               return 1.0 - 1.0 / (m * m);
             },
             nullptr, st.domain};
  out.p_perp = {[B = st.B, P = st.P, L, M, mmin, P1](const Point3& p) {
                  const double m = detail::checked_M(M, L(p), mmin);
                  return P1 + P(p) + 0.5 * norm2(B(p)) * (1.0 - m * m);
                },
                nullptr, st.P.domain};
  return out;
}

/// p_par' = P1 + P - |B|^2 (1 - M^2)/2.
inline double mhd_to_cgl_p_parallel(const MhdState& st, const SurfaceFunction& M, double P1, const Point3& p) {
  const double m = M(st.surface_label(p));
  return P1 + st.P(p) - 0.5 * norm2(st.B(p)) * (1.0 - m * m);
}

/// (sqrt(1 - tau) B, p_perp + tau |B|^2/2). Fire-hose regime raises on evaluation.
inline MhdState cgl_to_mhd(const CglState& st) { return isotropic_image(st); }

// ------------------------------------------------------------ group G_C

/// Element (alpha, H) acting by M = alpha exp(H). H is a finite combination of
/// named basis functions; the algebra acts on coefficients only.
class GroupElement {
 public:
  struct Term {
    double coeff = 0.0;
    SurfaceFunction basis;
  };

  GroupElement() = default;
  explicit GroupElement(int alpha) : alpha_(check_alpha(alpha)) {}

  static GroupElement identity() { return GroupElement(1); }

  GroupElement& add(const std::string& name, double coeff, SurfaceFunction basis) {
    auto it = terms_.find(name);
    if (it == terms_.end()) {
      if (coeff != 0.0) terms_.emplace(name, Term{coeff, std::move(basis)});
    } else {
      it->second.coeff += coeff;
      if (it->second.coeff == 0.0) terms_.erase(it);
    }
    return *this;
  }

  int alpha() const { return alpha_; }
  const std::map<std::string, Term>& terms() const { return terms_; }

  double H(double psi) const {
    double s = 0.0;
    for (const auto& [name, t] : terms_) s += t.coeff * t.basis(psi);
    return s;
  }

  double M(double psi) const { return alpha_ * std::exp(H(psi)); }

  SurfaceFunction as_function() const {
    GroupElement g = *this;
    return {[g](double s) { return g.M(s); },
            [g](double s) {
              double dh = 0.0;
              for (const auto& [name, t] : g.terms_) dh += t.coeff * t.basis.derivative(s);
              return g.M(s) * dh;
            },
            g.describe()};
  }

  std::string describe() const {
    std::ostringstream os;
    os << (alpha_ > 0 ? "+" : "-") << "exp(";
    bool first = true;
    for (const auto& [name, t] : terms_) {
      os << (first ? "" : " + ") << t.coeff << "*" << name;
      first = false;
    }
    if (first) os << "0";
    os << ")";
    return os.str();
  }

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    if (a.alpha_ != b.alpha_ || a.terms_.size() != b.terms_.size()) return false;
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib)
      if (ia->first != ib->first || ia->second.coeff != ib->second.coeff) return false;
    return true;
  }

 private:
  static int check_alpha(int a) {
    if (a != 1 && a != -1) throw InvalidParameter("group element alpha must be +1 or -1");
    return a;
  }

  int alpha_ = 1;
  std::map<std::string, Term> terms_;

  friend GroupElement compose(const GroupElement&, const GroupElement&);
  friend GroupElement inverse(const GroupElement&);
};

/// (alpha, H)(beta, K) = (alpha beta, H + K)
inline GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
  GroupElement out(g1.alpha_ * g2.alpha_);
  for (const auto& [name, t] : g1.terms_) out.add(name, t.coeff, t.basis);
  for (const auto& [name, t] : g2.terms_) out.add(name, t.coeff, t.basis);
  return out;
}

inline GroupElement inverse(const GroupElement& g) {
  GroupElement out(g.alpha_);
  for (const auto& [name, t] : g.terms_) out.add(name, -t.coeff, t.basis);
  return out;
}

// ---------------------------------------------------- stability criteria

/// p_par - p_perp > |B|^2, i.e. tau > 1.
inline bool firehose_unstable(const CglState& st, const Point3& p) { return st.tau.at(p) > 1.0; }

/// p_perp (p_perp / (6 p_par) - 1) > |B|^2 / 2.
inline bool mirror_unstable(const CglState& st, const Point3& p) {
  const double pperp = st.p_perp.at(p);
  const double ppar = st.p_parallel(p);
  if (ppar == 0.0) throw UndefinedCriterionError("mirror criterion undefined where p_par = 0");
  return pperp * (pperp / (6.0 * ppar) - 1.0) > 0.5 * norm2(st.B(p));
}

// ------------------------------------------------ infinitesimal generators

enum class Generator { scaling, pressure_shift, infinite };

inline const char* to_string(Generator g) {
  switch (g) {
    case Generator::scaling: return "scaling";
    case Generator::pressure_shift: return "pressure_shift";
    case Generator::infinite: return "infinite";
  }
  return "?";
}

struct GeneratorCheck {
  double change = 0.0;    // max |R(eps) - R(0)|
  double baseline = 0.0;  // max |R(0)|
  double floor = 0.0;     // roundoff level of the residual difference
};

/// First-order perturbation along a generator (fields only, no exponentiation).
inline CglState perturb(const CglState& st, Generator gen, double eps, const SurfaceFunction& f = {}) {
  CglState out = st;
  switch (gen) {
    case Generator::scaling:
      out.B = {[B = st.B, eps](const Point3& p) { return (1.0 + eps) * B(p); }, nullptr, st.B.domain};
      out.p_perp = {[P = st.p_perp, eps](const Point3& p) { return (1.0 + 2.0 * eps) * P(p); }, nullptr,
                    st.p_perp.domain};
      break;
    case Generator::pressure_shift:
      out.p_perp = {[P = st.p_perp, eps](const Point3& p) { return P(p) + eps; }, nullptr, st.p_perp.domain};
      break;
    case Generator::infinite: {
      if (!f.value) throw InvalidParameter("infinite generator needs f(psi)");
      const auto& L = st.surface_label;
      out.B = {[B = st.B, L, f, eps](const Point3& p) { return (1.0 + eps * f(L(p))) * B(p); }, nullptr,
               st.B.domain};
      out.p_perp = {[B = st.B, P = st.p_perp, L, f, eps](const Point3& p) {
                      return P(p) - eps * f(L(p)) * norm2(B(p));
                    },
                    nullptr, st.p_perp.domain};
      out.tau = {[t = st.tau, L, f, eps](const Point3& p) {
                   const double tv = t(p);
                   return tv + 2.0 * eps * f(L(p)) * (1.0 - tv);
                 },
                 nullptr, st.tau.domain};
      break;
    }
  }
  return out;
}

inline MhdState perturb(const MhdState& st, Generator gen, double eps) {
  MhdState out = st;
  switch (gen) {
    case Generator::scaling:
      out.B = {[B = st.B, eps](const Point3& p) { return (1.0 + eps) * B(p); }, nullptr, st.B.domain};
      out.P = {[P = st.P, eps](const Point3& p) { return (1.0 + 2.0 * eps) * P(p); }, nullptr, st.P.domain};
      break;
    case Generator::pressure_shift:
      out.P = {[P = st.P, eps](const Point3& p) { return P(p) + eps; }, nullptr, st.P.domain};
      break;
    case Generator::infinite:
      throw InvalidParameter("the infinite generator acts on anisotropic states only");
  }
  return out;
}

inline GeneratorCheck infinitesimal_generator_check(const MhdState& st, Generator gen, double eps,
                                                    const std::vector<Point3>& samples, const FdScheme& s = {},
                                                    int threads = 1) {
  const MhdState pert = perturb(st, gen, eps);
  struct Out { double change, base, pmax, h; };
  auto rows = parallel_map(samples, [&](const Point3& p) {
    const auto r0 = mhd_residual(st, p, s);
    const auto r1 = mhd_residual(pert, p, s);
    const double ch = norm(r1.momentum - r0.momentum) + std::abs(r1.solenoidal - r0.solenoidal);
    return Out{ch, norm(r0.momentum) + std::abs(r0.solenoidal), std::abs(pert.P(p)), s.step_at(p)};
  }, threads);
  GeneratorCheck g;
  for (const auto& o : rows) {
    g.change = std::max(g.change, o.change);
    g.baseline = std::max(g.baseline, o.base);
    g.floor = std::max(g.floor, 16.0 * std::numeric_limits<double>::epsilon() * o.pmax / o.h);
  }
  return g;
}

inline GeneratorCheck infinitesimal_generator_check(const CglState& st, Generator gen, double eps,
                                                    const std::vector<Point3>& samples, const FdScheme& s = {},
                                                    const SurfaceFunction& f = {}, int threads = 1) {
  const CglState pert = perturb(st, gen, eps, f);
  struct Out { double change, base, pmax, h; };
  auto rows = parallel_map(samples, [&](const Point3& p) {
    const auto r0 = cgl_residual(st, p, s);
    const auto r1 = cgl_residual(pert, p, s);
    const double ch = norm(r1.momentum - r0.momentum) + std::abs(r1.solenoidal - r0.solenoidal) +
                      std::abs(r1.state_eq - r0.state_eq);
    const double base = norm(r0.momentum) + std::abs(r0.solenoidal) + std::abs(r0.state_eq);
    const double pmax = std::abs(pert.p_perp(p)) + norm2(pert.B(p));
    return Out{ch, base, pmax, s.step_at(p)};
  }, threads);
  GeneratorCheck g;
  for (const auto& o : rows) {
    g.change = std::max(g.change, o.change);
    g.baseline = std::max(g.baseline, o.base);
    g.floor = std::max(g.floor, 16.0 * std::numeric_limits<double>::epsilon() * o.pmax / o.h);
  }
  return g;
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_TRANSFORMS_HPP
