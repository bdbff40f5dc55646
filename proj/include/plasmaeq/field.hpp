#ifndef PLASMAEQ_FIELD_HPP
#define PLASMAEQ_FIELD_HPP

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>

#include "plasmaeq/errors.hpp"
#include "plasmaeq/vec3.hpp"

namespace plasmaeq {

/// Membership predicate. An empty predicate means all of R^3.
using Domain = std::function<bool(const Point3&)>;

inline bool in_domain(const Domain& d, const Point3& p) { return !d || d(p); }

inline Domain intersect(Domain a, Domain b) {
  if (!a) return b;
  if (!b) return a;
  return [a = std::move(a), b = std::move(b)](const Point3& p) { return a(p) && b(p); };
}

namespace detail {
inline std::string describe(const Point3& p) {
  std::ostringstream os;
  os.precision(17);
  os << p;
  return os.str();
}

[[noreturn]] inline void outside(const Point3& p) {
  throw DomainError("point " + describe(p) + " lies outside the field domain");
}
}  // namespace detail

struct ScalarField {
  std::function<double(const Point3&)> evaluate;
  std::function<Vec3(const Point3&)> analytic_gradient;  // optional
  Domain domain;

  double operator()(const Point3& p) const { return evaluate(p); }

  /// Evaluate with a domain check.
  double at(const Point3& p) const {
    if (!in_domain(domain, p)) detail::outside(p);
    return evaluate(p);
  }

  static ScalarField constant(double c) {
    return {[c](const Point3&) { return c; }, [](const Point3&) { return Vec3{}; }, {}};
  }
};

struct VectorField {
  std::function<Vec3(const Point3&)> evaluate;
  std::function<Mat3(const Point3&)> analytic_jacobian;  // optional, J(i,j) = d_j V_i
  Domain domain;

  Vec3 operator()(const Point3& p) const { return evaluate(p); }

  Vec3 at(const Point3& p) const {
    if (!in_domain(domain, p)) detail::outside(p);
    return evaluate(p);
  }

  static VectorField constant(const Vec3& c) {
    return {[c](const Point3&) { return c; }, [](const Point3&) { return Mat3{}; }, {}};
  }
};

/// Drop analytic derivatives so every operator goes through the stencil.
inline ScalarField fd_only(ScalarField f) {
  f.analytic_gradient = nullptr;
  return f;
}
inline VectorField fd_only(VectorField v) {
  v.analytic_jacobian = nullptr;
  return v;
}

enum class FdOrder { central2, central4 };

struct FdScheme {
  double h = 1e-4;
  FdOrder order = FdOrder::central2;
  bool relative = true;  // step = h * (1 + |p|)

  double step_at(const Point3& p) const {
    if (!(h > 0.0)) throw InvalidParameter("FdScheme: step must be positive");
    return relative ? h * (1.0 + norm(p)) : h;
  }

  static FdScheme absolute(double h, FdOrder order = FdOrder::central2) {
    return {h, order, false};
  }
};

namespace detail {

constexpr std::array<Vec3, 3> kAxes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

/// Central difference along axis k of any callable g, domain-checked.
template <class G>
auto central_diff(const G& g, const Domain& dom, const Point3& p, int k, const FdScheme& s) {
  const double h = s.step_at(p);
  const Vec3 e = kAxes[k] * h;
  auto probe = [&](const Point3& q) {
    if (!in_domain(dom, q)) outside(q);
    return g(q);
  };
  if (s.order == FdOrder::central2) {
    return (probe(p + e) - probe(p - e)) * (0.5 / h);
  }
  const auto f1 = probe(p + e) - probe(p - e);
  const auto f2 = probe(p + 2.0 * e) - probe(p - 2.0 * e);
  return (f1 * 8.0 - f2) * (1.0 / (12.0 * h));
}

}  // namespace detail

inline Vec3 grad(const ScalarField& f, const Point3& p, const FdScheme& s = {}) {
  if (f.analytic_gradient) {
    if (!in_domain(f.domain, p)) detail::outside(p);
    return f.analytic_gradient(p);
  }
  Vec3 g;
  for (int k = 0; k < 3; ++k) g[k] = detail::central_diff(f.evaluate, f.domain, p, k, s);
  return g;
}

inline Mat3 jacobian(const VectorField& v, const Point3& p, const FdScheme& s = {}) {
  if (v.analytic_jacobian) {
    if (!in_domain(v.domain, p)) detail::outside(p);
    return v.analytic_jacobian(p);
  }
  Mat3 J;
  for (int k = 0; k < 3; ++k) {
    const Vec3 col = detail::central_diff(v.evaluate, v.domain, p, k, s);
    for (int i = 0; i < 3; ++i) J(i, k) = col[i];
  }
  return J;
}

inline double div(const VectorField& v, const Point3& p, const FdScheme& s = {}) {
  return jacobian(v, p, s).trace();
}

inline Vec3 curl_from_jacobian(const Mat3& J) {
  return {J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)};
}

inline Vec3 curl(const VectorField& v, const Point3& p, const FdScheme& s = {}) {
  return curl_from_jacobian(jacobian(v, p, s));
}

/// Sum of |d_i V_i|, the natural size against which div V is judged.
inline double div_scale(const Mat3& J) {
  return std::abs(J(0, 0)) + std::abs(J(1, 1)) + std::abs(J(2, 2));
}

/// Field of FD curls. Keeps the source domain.
inline VectorField curl_field(VectorField v, FdScheme s) {
  Domain dom = v.domain;
  return {[v = std::move(v), s](const Point3& p) { return curl(v, p, s); }, nullptr, std::move(dom)};
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_FIELD_HPP
