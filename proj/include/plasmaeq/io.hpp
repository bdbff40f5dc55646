#ifndef PLASMAEQ_IO_HPP
#define PLASMAEQ_IO_HPP

#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "plasmaeq/errors.hpp"
#include "plasmaeq/gs.hpp"
#include "plasmaeq/states.hpp"

namespace plasmaeq {

/// Shortest text that round-trips a double.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Structured sampling box with n = (nx, ny, nz) nodes including the ends.
struct SampleBox {
  Point3 lo{-1, -1, -1}, hi{1, 1, 1};
  int nx = 21, ny = 21, nz = 21;

  Point3 node(int i, int j, int k) const {
    auto c = [](double a, double b, int m, int n) { return n == 1 ? 0.5 * (a + b) : a + (b - a) * m / (n - 1); };
    return {c(lo.x, hi.x, i, nx), c(lo.y, hi.y, j, ny), c(lo.z, hi.z, k, nz)};
  }
  size_t count() const { return static_cast<size_t>(nx) * ny * nz; }
};

struct NamedScalar {
  std::string name;
  std::function<double(const Point3&)> f;
};

struct NamedVector {
  std::string name;
  std::function<Vec3(const Point3&)> f;
};

/// Scalars written for a state: MHD gives P; CGL gives p_perp, p_par, tau.
inline std::vector<NamedScalar> state_scalars(const MhdState& st) {
  return {{"P", [P = st.P](const Point3& p) { return P(p); }}};
}

inline std::vector<NamedScalar> state_scalars(const CglState& st) {
  return {{"p_perp", [f = st.p_perp](const Point3& p) { return f(p); }},
          {"p_par", [st](const Point3& p) { return st.p_parallel(p); }},
          {"tau", [f = st.tau](const Point3& p) { return f(p); }}};
}

/// VTK legacy ASCII structured grid. Points outside `dom` carry zeros and inside = 0.
inline void write_vtk_structured(std::ostream& os, const SampleBox& box, const std::vector<NamedScalar>& scalars,
                                 const std::vector<NamedVector>& vectors, const Domain& dom,
                                 const std::string& title = "plasmaeq field export") {
  const size_t n = box.count();
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_GRID\n";
  os << "DIMENSIONS " << box.nx << ' ' << box.ny << ' ' << box.nz << "\n";
  os << "POINTS " << n << " double\n";
  std::vector<Point3> pts;
  pts.reserve(n);
  // VTK ordering: x fastest, then y, then z.
  for (int k = 0; k < box.nz; ++k)
    for (int j = 0; j < box.ny; ++j)
      for (int i = 0; i < box.nx; ++i) pts.push_back(box.node(i, j, k));
  for (const auto& p : pts) os << fmt_double(p.x) << ' ' << fmt_double(p.y) << ' ' << fmt_double(p.z) << '\n';
  std::vector<char> inside(n);
  for (size_t m = 0; m < n; ++m) inside[m] = in_domain(dom, pts[m]) ? 1 : 0;
  os << "POINT_DATA " << n << "\n";
  os << "SCALARS inside int 1\nLOOKUP_TABLE default\n";
  for (char c : inside) os << int(c) << '\n';
  for (const auto& s : scalars) {
    os << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
    for (size_t m = 0; m < n; ++m) os << fmt_double(inside[m] ? s.f(pts[m]) : 0.0) << '\n';
  }
  for (const auto& v : vectors) {
    os << "VECTORS " << v.name << " double\n";
    for (size_t m = 0; m < n; ++m) {
      const Vec3 b = inside[m] ? v.f(pts[m]) : Vec3{};
      os << fmt_double(b.x) << ' ' << fmt_double(b.y) << ' ' << fmt_double(b.z) << '\n';
    }
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& os, const CsvTable& t) {
  for (size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << t.header[c];
  os << '\n';
  for (const auto& r : t.rows) {
    for (size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << fmt_double(r[c]);
    os << '\n';
  }
}

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("csv: empty input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != t.header.size())
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                        " columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// x, y, z plus B and the state scalars at the given points.
template <class State>
CsvTable sample_state(const State& st, const std::vector<Point3>& pts) {
  const auto scalars = state_scalars(st);
  CsvTable t;
  t.header = {"x", "y", "z", "Bx", "By", "Bz"};
  for (const auto& s : scalars) t.header.push_back(s.name);
  for (const auto& p : pts) {
    const Vec3 b = st.B(p);
    std::vector<double> row{p.x, p.y, p.z, b.x, b.y, b.z};
    for (const auto& s : scalars) row.push_back(s.f(p));
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// (x, z) half-plane slice at y = 0 with x in [x0, x1], z in [z0, z1].
/// Columns: P (or p_perp, p_par, tau), magnetic pressure |B|^2/2, inside flag.
template <class State>
CsvTable slice_xz(const State& st, double x0, double x1, double z0, double z1, int nx, int nz) {
  const auto scalars = state_scalars(st);
  CsvTable t;
  t.header = {"x", "z", "inside", "magnetic_pressure"};
  for (const auto& s : scalars) t.header.push_back(s.name);
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < nz; ++k) {
      const Point3 p{x0 + (x1 - x0) * i / (nx - 1), 0.0, z0 + (z1 - z0) * k / (nz - 1)};
      const bool in = st.contains(p);
      std::vector<double> row{p.x, p.z, in ? 1.0 : 0.0, in ? 0.5 * norm2(st.B(p)) : 0.0};
      for (const auto& s : scalars) row.push_back(in ? s.f(p) : 0.0);
      t.rows.push_back(std::move(row));
    }
  return t;
}

inline CsvTable grid_table(const FluxGrid& g) {
  CsvTable t;
  t.header = {"r", "z", "psi"};
  for (int i = 0; i < g.geom.nr; ++i)
    for (int j = 0; j < g.geom.nz; ++j) t.rows.push_back({g.geom.r(i), g.geom.z(j), g.at(i, j)});
  return t;
}

/// Rebuild a grid from (r, z, psi) rows written by grid_table.
inline FluxGrid grid_from_table(const CsvTable& t) {
  if (t.header.size() != 3 || t.rows.empty()) throw ConfigError("grid csv: expected columns r,z,psi");
  std::vector<double> rs, zs;
  for (const auto& r : t.rows) {
    if (rs.empty() || r[0] != rs.back()) rs.push_back(r[0]);
    if (rs.size() == 1) zs.push_back(r[1]);
  }
  GridGeometry g{rs.front(), rs.back(), zs.front(), zs.back(), static_cast<int>(rs.size()),
                 static_cast<int>(zs.size())};
  if (static_cast<size_t>(g.nr) * g.nz != t.rows.size()) throw ConfigError("grid csv: rows do not form a grid");
  FluxGrid out(g);
  for (size_t m = 0; m < t.rows.size(); ++m) out.psi[m] = t.rows[m][2];
  return out;
}

inline void write_grid_vtk(std::ostream& os, const FluxGrid& g) {
  const int nr = g.geom.nr, nz = g.geom.nz;
  os << "# vtk DataFile Version 3.0\nflux function psi(r, z)\nASCII\nDATASET STRUCTURED_GRID\n";
  os << "DIMENSIONS " << nr << ' ' << nz << " 1\n";
  os << "POINTS " << nr * nz << " double\n";
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) os << fmt_double(g.geom.r(i)) << " 0 " << fmt_double(g.geom.z(j)) << '\n';
  os << "POINT_DATA " << nr * nz << "\nSCALARS psi double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) os << fmt_double(g.at(i, j)) << '\n';
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_IO_HPP
