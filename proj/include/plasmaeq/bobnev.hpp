#ifndef PLASMAEQ_BOBNEV_HPP
#define PLASMAEQ_BOBNEV_HPP

#include <cmath>
#include <algorithm>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "plasmaeq/errors.hpp"
#include "plasmaeq/states.hpp"

namespace plasmaeq {

namespace detail {
// V0(x) = sum_{k>=1} 3 (-1)^{k+1} 2k x^{2k-2} / (2k+1)!
inline double v0_series(double x) {
  const double x2 = x * x;
  double term = 1.0;  // k = 1
  double sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= -x2 / ((2.0 * k) * (2.0 * k + 3.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// V0'(x) / x = sum_{k>=2} 3 (-1)^{k+1} 2k (2k-2) x^{2k-4} / (2k+1)!
inline double v0_prime_over_x_series(double x) {
  const double x2 = x * x;
  double term = -0.2;  // k = 2
  double sum = term;
  for (int k = 2; k < 30; ++k) {
    term *= -x2 / ((2.0 * k - 2.0) * (2.0 * k + 3.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}
}  // namespace detail

/// V0(x) = 3 (sin x / x^3 - cos x / x^2), even, V0(0) = 1.
inline double v0_profile(double x) {
  if (std::abs(x) < 1.0) return detail::v0_series(x);
  return 3.0 * (std::sin(x) / (x * x * x) - std::cos(x) / (x * x));
}

/// V0'(x) / x, regular at the origin (limit -1/5).
inline double v0_prime_over_x(double x) {
  if (std::abs(x) < 1.0) return detail::v0_prime_over_x_series(x);
  const double x2 = x * x;
  return 3.0 * ((x2 - 3.0) * std::sin(x) + 3.0 * x * std::cos(x)) / (x2 * x2 * x);
}

inline double v0_derivative(double x) { return x * v0_prime_over_x(x); }

/// Left side of the eigenvalue condition in t = R lambda.
inline double bobnev_root_function(double t) {
  return (3.0 - 4.0 * t * t) * std::sin(2.0 * t) - 6.0 * t * std::cos(2.0 * t);
}

inline double bobnev_root_derivative(double t) {
  return 4.0 * t * std::sin(2.0 * t) - 8.0 * t * t * std::cos(2.0 * t);
}

/// Achievable |f(t)| at a root: roundoff in sin(2t), cos(2t) scaled by the coefficients.
inline double bobnev_root_tolerance(double t) {
  return std::max(1e-12, 16.0 * std::numeric_limits<double>::epsilon() * (4.0 * t * t + 6.0 * t + 3.0) *
                             (1.0 + 2.0 * t));
}

/// First n_max positive eigenvalues lambda_n for vortex radius R.
inline std::vector<double> bobnev_roots(double R, int n_max) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidParameter("bobnev_roots: R must be positive");
  if (n_max < 1) throw InvalidParameter("bobnev_roots: n_max must be >= 1");
  const double step = 0.01;
  const double t_limit = 10.0 + 4.0 * n_max;
  std::vector<double> roots;
  double a = 0.5, fa = bobnev_root_function(a);
  while (static_cast<int>(roots.size()) < n_max) {
    const double b = a + step;
    if (b > t_limit) throw RootSearchError("bobnev_roots: bracketing failed below t = " + std::to_string(t_limit));
    const double fb = bobnev_root_function(b);
    if (fa == 0.0 || fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bobnev_root_function(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
      }
      double t = 0.5 * (lo + hi);
      for (int it = 0; it < 3; ++it) {
        const double d = bobnev_root_derivative(t);
        if (d == 0.0) break;
        const double tn = t - bobnev_root_function(t) / d;
        if (tn < a || tn > b) break;
        t = tn;
      }
      if (!(std::abs(bobnev_root_function(t)) <= bobnev_root_tolerance(t)))
        throw RootSearchError("bobnev_roots: polish failed near t = " + std::to_string(t));
      roots.push_back(t / R);
    }
    a = b;
    fa = fb;
  }
  return roots;
}

struct BobnevParams {
  double R = 1.0;
  int n = 1;
  double lambda = 0.0;
  double B0 = 1.0;
  double P0 = 0.0;
  double gamma_const = 0.0;
  double c = 0.0;  // V0(2 lambda R)
};

/// Radial profiles. p carries the sign that balances forces: P = P0 - p sin^2(theta).
struct BobnevProfiles {
  BobnevParams prm;

  double V(double rho) const {
    return prm.B0 * (v0_profile(2.0 * prm.lambda * rho) - prm.c) / (1.0 - prm.c);
  }
  double dV(double rho) const {
    return prm.B0 * 2.0 * prm.lambda * v0_derivative(2.0 * prm.lambda * rho) / (1.0 - prm.c);
  }
  /// -V'/(2 rho), finite at rho = 0.
  double g(double rho) const {
    const double l = prm.lambda;
    return -2.0 * l * l * prm.B0 * v0_prime_over_x(2.0 * l * rho) / (1.0 - prm.c);
  }
  double U(double rho) const { return prm.lambda * rho * V(rho); }
  double W(double rho) const { return -V(rho) - 0.5 * rho * dV(rho); }
  double p(double rho) const { return -prm.gamma_const * rho * rho * V(rho); }
};

inline BobnevParams bobnev_params(double R, int n, double B0, double P0) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidParameter("bobnev: R must be positive");
  if (n < 1) throw InvalidParameter("bobnev: n must be >= 1");
  if (!std::isfinite(B0) || !std::isfinite(P0)) throw InvalidParameter("bobnev: B0, P0 must be finite");
  BobnevParams prm;
  prm.R = R;
  prm.n = n;
  prm.B0 = B0;
  prm.P0 = P0;
  prm.lambda = bobnev_roots(R, n).back();
  prm.c = v0_profile(2.0 * prm.lambda * R);
  if (prm.c == 1.0) throw DegenerateError("bobnev: V0(2 lambda R) = 1");
  prm.gamma_const = prm.lambda * prm.lambda * B0 * prm.c / (1.0 - prm.c);
  return prm;
}

/// Cartesian magnetic field of the vortex. Regular everywhere:
///   B = g z (x, y, z) - W e_z + lambda V (-y, x, 0),  g = -V'/(2 rho).
inline Vec3 bobnev_field(const BobnevProfiles& pr, const Point3& q) {
  const double rho = norm(q);
  const double V = pr.V(rho);
  const double g = pr.g(rho);
  const double W = -V + rho * rho * g;
  const double lV = pr.prm.lambda * V;
  return {q.x * q.z * g - lV * q.y, q.y * q.z * g + lV * q.x, q.z * q.z * g - W};
}

inline double bobnev_pressure(const BobnevProfiles& pr, const Point3& q) {
  const double rho = norm(q);
  return pr.prm.P0 + pr.prm.gamma_const * (q.x * q.x + q.y * q.y) * pr.V(rho);
}

struct BobnevSolution {
  MhdState state;
  BobnevParams params;
  BobnevProfiles profiles;
};

inline BobnevSolution bobnev_state(const BobnevParams& prm) {
  BobnevProfiles pr{prm};
  const double R = prm.R;
  Domain dom = [R](const Point3& p) { return norm2(p) < R * R; };
  VectorField B{[pr](const Point3& p) { return bobnev_field(pr, p); }, nullptr, dom};
  ScalarField P{[pr](const Point3& p) { return bobnev_pressure(pr, p); }, nullptr, dom};
  // Label: pressure deviation P - P0 (same level sets as P).
  ScalarField label{[pr](const Point3& p) { return bobnev_pressure(pr, p) - pr.prm.P0; }, nullptr, dom};
  return {{std::move(B), std::move(P), std::move(label), dom}, prm, pr};
}

inline BobnevSolution bobnev_state(double R, int n, double B0, double P0) {
  return bobnev_state(bobnev_params(R, n, B0, P0));
}

/// Radii in (0, R) where V vanishes. Bisected to machine precision.
inline std::vector<double> separatrix_radii(const BobnevParams& prm) {
  const BobnevProfiles pr{prm};
  std::vector<double> out;
  const int n_scan = 4000;
  const double top = prm.R * (1.0 - 1e-3);
  double a = top / n_scan, fa = pr.V(a);
  for (int i = 2; i <= n_scan; ++i) {
    const double b = top * i / n_scan;
    const double fb = pr.V(b);
    if (fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = pr.V(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
      }
      out.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return out;
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_BOBNEV_HPP
