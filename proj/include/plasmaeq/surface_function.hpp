#ifndef PLASMAEQ_SURFACE_FUNCTION_HPP
#define PLASMAEQ_SURFACE_FUNCTION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "plasmaeq/errors.hpp"

namespace plasmaeq {

/// Real function of a magnetic-surface label, with its derivative.
struct SurfaceFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::string description;

  double operator()(double psi) const { return value(psi); }

  static SurfaceFunction constant(double c) {
    std::ostringstream os;
    os << "constant(" << c << ")";
    return {[c](double) { return c; }, [](double) { return 0.0; }, os.str()};
  }

  /// a + b * psi
  static SurfaceFunction affine(double a, double b) {
    std::ostringstream os;
    os << "affine(" << a << ", " << b << ")";
    return {[a, b](double s) { return a + b * s; }, [b](double) { return b; }, os.str()};
  }

  /// 1 + (psi/psi1) sin(psi/psi2)
  static SurfaceFunction oscillatory(double psi1, double psi2) {
    if (psi1 == 0.0 || psi2 == 0.0) throw InvalidParameter("oscillatory: psi1, psi2 must be nonzero");
    std::ostringstream os;
    os << "1 + (psi/" << psi1 << ") sin(psi/" << psi2 << ")";
    return {[psi1, psi2](double s) { return 1.0 + (s / psi1) * std::sin(s / psi2); },
            [psi1, psi2](double s) {
              return std::sin(s / psi2) / psi1 + (s / psi1) * std::cos(s / psi2) / psi2;
            },
            os.str()};
  }

  static SurfaceFunction tabulated(std::vector<double> x, std::vector<double> y);

  static SurfaceFunction identity() {
    return {[](double s) { return s; }, [](double) { return 1.0; }, "psi"};
  }
};

inline SurfaceFunction product(const SurfaceFunction& a, const SurfaceFunction& b) {
  return {[a, b](double s) { return a(s) * b(s); },
          [a, b](double s) { return a.derivative(s) * b(s) + a(s) * b.derivative(s); },
          "(" + a.description + ") * (" + b.description + ")"};
}

inline SurfaceFunction scaled(const SurfaceFunction& a, double k) {
  return {[a, k](double s) { return k * a(s); }, [a, k](double s) { return k * a.derivative(s); },
          std::to_string(k) + " * (" + a.description + ")"};
}

namespace detail {
/// Monotone piecewise cubic (Fritsch-Carlson slopes).
struct Pchip {
  std::vector<double> x, y, d;

  Pchip(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw InvalidParameter("tabulated: need >= 2 matching (label, value) pairs");
    for (size_t i = 1; i < n; ++i)
      if (!(x[i] > x[i - 1])) throw InvalidParameter("tabulated: labels must be strictly increasing");
    std::vector<double> h(n - 1), delta(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    d.assign(n, 0.0);
    if (n == 2) {
      d[0] = d[1] = delta[0];
      return;
    }
    for (size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (s * d0 <= 0.0) return 0.0;
      if (d0 * d1 <= 0.0 && std::abs(s) > 3 * std::abs(d0)) return 3 * d0;
      return s;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  size_t segment(double s) const {
    if (s < x.front() || s > x.back()) {
      std::ostringstream os;
      os << "tabulated surface function: label " << s << " outside [" << x.front() << ", " << x.back() << "]";
      throw DomainError(os.str());
    }
    auto it = std::upper_bound(x.begin(), x.end(), s);
    size_t i = static_cast<size_t>(it - x.begin());
    return std::min(i == 0 ? 0 : i - 1, x.size() - 2);
  }

  double value(double s) const {
    const size_t i = segment(s);
    const double h = x[i + 1] - x[i], t = (s - x[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * d[i] + (-2 * t3 + 3 * t2) * y[i + 1] +
           (t3 - t2) * h * d[i + 1];
  }

  double slope(double s) const {
    const size_t i = segment(s);
    const double h = x[i + 1] - x[i], t = (s - x[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y[i] + (-6 * t2 + 6 * t) * y[i + 1]) / h + (3 * t2 - 4 * t + 1) * d[i] +
           (3 * t2 - 2 * t) * d[i + 1];
  }
};
}  // namespace detail

inline SurfaceFunction SurfaceFunction::tabulated(std::vector<double> x, std::vector<double> y) {
  auto p = std::make_shared<const detail::Pchip>(std::move(x), std::move(y));
  std::ostringstream os;
  os << "tabulated(" << p->x.size() << " nodes)";
  return {[p](double s) { return p->value(s); }, [p](double s) { return p->slope(s); }, os.str()};
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_SURFACE_FUNCTION_HPP
