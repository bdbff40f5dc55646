#ifndef PLASMAEQ_SAMPLING_HPP
#define PLASMAEQ_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "plasmaeq/errors.hpp"
#include "plasmaeq/field.hpp"

namespace plasmaeq {

/// Cell-centred n^3 lattice over the box [lo, hi].
inline std::vector<Point3> box_lattice(const Point3& lo, const Point3& hi, int n) {
  if (n < 1) throw InvalidParameter("box_lattice: n must be >= 1");
  std::vector<Point3> pts;
  pts.reserve(static_cast<size_t>(n) * n * n);
  auto coord = [n](double a, double b, int i) { return a + (b - a) * (i + 0.5) / n; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        pts.push_back({coord(lo.x, hi.x, i), coord(lo.y, hi.y, j), coord(lo.z, hi.z, k)});
  return pts;
}

/// n^3 lattice in the cube inscribed in the ball of radius (1 - guard) * R.
/// Even n keeps every point off the coordinate planes, hence off the axes.
inline std::vector<Point3> ball_lattice(double R, int n = 10, double guard = 0.1,
                                        const Point3& center = {}) {
  const double a = (1.0 - guard) * R / std::sqrt(3.0);
  auto pts = box_lattice(center - Vec3{a, a, a}, center + Vec3{a, a, a}, n);
  return pts;
}

/// Reproducible uniform draw in [0, 1) from the top 53 bits.
inline double unit_double(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Uniform points in the ball of radius R (rejection from the cube).
inline std::vector<Point3> random_ball_points(double R, size_t count, std::uint64_t seed,
                                              const Point3& center = {}) {
  std::mt19937_64 g(seed);
  std::vector<Point3> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    const Vec3 q{2 * unit_double(g) - 1, 2 * unit_double(g) - 1, 2 * unit_double(g) - 1};
    if (norm2(q) < 1.0) pts.push_back(center + R * q);
  }
  return pts;
}

/// Map fn over items with a fixed number of worker threads. Output order
/// matches input order; the first exception thrown by any worker is rethrown.
template <class T, class Fn>
auto parallel_map(const std::vector<T>& items, Fn fn, int threads = 1) {
  using R = decltype(fn(items.front()));
  std::vector<R> out(items.size());
  const size_t n = items.size();
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nt == 1) {
    for (size_t i = 0; i < n; ++i) out[i] = fn(items[i]);
    return out;
  }
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (size_t i = t; i < n; i += nt) out[i] = fn(items[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lk(m);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

struct ResidualReport {
  std::string name;
  double max_norm = 0.0;   // max absolute residual
  double max_scale = 0.0;  // max of the matching force/derivative scale
  double tolerance = 0.0;
  size_t samples = 0;
  Point3 worst{};
  bool passed = false;

  double relative() const { return max_scale > 0.0 ? max_norm / max_scale : max_norm; }
};

/// Reduce (value, scale) pairs to a report; passes when max|value| <= tol * max(scale).
/// A zero scale means the check is absolute.
inline ResidualReport reduce_residuals(std::string name, const std::vector<Point3>& pts,
                                       const std::vector<std::pair<double, double>>& vals,
                                       double tol) {
  ResidualReport r;
  r.name = std::move(name);
  r.samples = vals.size();
  r.tolerance = tol;
  for (size_t i = 0; i < vals.size(); ++i) {
    double v = std::abs(vals[i].first);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    if (i == 0 || v > r.max_norm) {
      r.max_norm = v;
      r.worst = pts[i];
    }
    r.max_scale = std::max(r.max_scale, vals[i].second);
  }
  r.passed = std::isfinite(r.max_norm) && r.relative() <= tol;
  return r;
}

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidParameter("log_log_slope: need at least two matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw DegenerateError("log_log_slope: non-positive sample");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_SAMPLING_HPP
