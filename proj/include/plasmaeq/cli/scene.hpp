#ifndef PLASMAEQ_CLI_SCENE_HPP
#define PLASMAEQ_CLI_SCENE_HPP

// Building a state (plus its sample set and bounding sphere) from a run
// configuration, and applying a transform chain to it.

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plasmaeq/bobnev.hpp"
#include "plasmaeq/config.hpp"
#include "plasmaeq/gs.hpp"
#include "plasmaeq/io.hpp"
#include "plasmaeq/sampling.hpp"
#include "plasmaeq/transforms.hpp"

namespace plasmaeq::cli {

inline const Json& section(const Json& j, const std::string& key) {
  static const Json empty = Json::object();
  if (!j.is_object() || !j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError("config section '" + key + "' must be a table");
  return j.at(key);
}

inline Vec3 get_vec3(const Json& j, const std::string& key, Vec3 def) {
  const auto v = get_or<std::vector<double>>(j, key, {def.x, def.y, def.z});
  if (v.size() != 3) throw ConfigError("config key '" + key + "' needs three numbers");
  return {v[0], v[1], v[2]};
}

inline double get_positive(const Json& j, const std::string& key, double def) {
  const double v = get_or<double>(j, key, def);
  if (!(v > 0.0)) throw ConfigError("config key '" + key + "' must be positive");
  return v;
}

/// Surface function from config: a number, or a table with kind = constant |
/// affine | oscillatory | tabulated | identity | group.
inline SurfaceFunction surface_function_from(const Json& j) {
  if (j.is_number()) return SurfaceFunction::constant(j.get<double>());
  if (!j.is_object()) throw ConfigError("surface function must be a number or a table");
  const auto kind = get_or<std::string>(j, "kind", "");
  if (kind == "constant") return SurfaceFunction::constant(get_or<double>(j, "value", 1.0));
  if (kind == "affine") return SurfaceFunction::affine(get_or<double>(j, "a", 0.0), get_or<double>(j, "b", 0.0));
  if (kind == "identity") return SurfaceFunction::identity();
  if (kind == "oscillatory")
    return SurfaceFunction::oscillatory(get_or<double>(j, "psi1", 200.0), get_or<double>(j, "psi2", 60.0));
  if (kind == "tabulated")
    return SurfaceFunction::tabulated(get_or<std::vector<double>>(j, "x", {}), get_or<std::vector<double>>(j, "y", {}));
  if (kind == "group") {
    GroupElement g(get_or<int>(j, "alpha", 1));
    if (j.contains("terms")) {
      if (!j.at("terms").is_array()) throw ConfigError("group terms must be an array");
      for (const auto& t : j.at("terms")) {
        if (!t.contains("basis")) throw ConfigError("group term needs a basis");
        g.add(get_or<std::string>(t, "name", "h" + std::to_string(g.terms().size())), get_or<double>(t, "coeff", 1.0),
              surface_function_from(t.at("basis")));
      }
    }
    return g.as_function();
  }
  throw ConfigError("unknown surface function kind '" + kind + "'");
}

using AnyState = std::variant<MhdState, CglState>;

/// x' = s A x + a, the accumulated effect of geometric transforms.
struct Placement {
  Mat3 A = Mat3::identity();
  Vec3 a{};
  double s = 1.0;

  Point3 map(const Point3& x) const { return s * (A * x) + a; }
};

struct Scene {
  std::string kind;  // bobnev | solovev | grid
  AnyState state;
  std::optional<BobnevSolution> bobnev;
  std::optional<AxisymmetricEquilibrium> axi;
  std::optional<GridGeometry> box;  // (r, z) box of an axisymmetric state
  std::vector<Point3> samples;
  Point3 center{};
  double radius = 0.0;  // bounding sphere of the domain, 0 if unbounded
  double P0 = 0.0;
  Placement placement;
  std::vector<std::string> chain;

  bool pristine() const { return chain.empty(); }
  bool is_cgl() const { return std::holds_alternative<CglState>(state); }
};

namespace detail {

/// (r, phi, z) lattice inside the (r, z) box, shrunk by `guard` on each side.
inline std::vector<Point3> annulus_samples(const GridGeometry& g, int n, double guard) {
  std::vector<Point3> pts;
  const double dr = g.r1 - g.r0, dz = g.z1 - g.z0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        const double t = (i + 0.5) / n, u = (j + 0.5) / n;
        const double r = g.r0 + dr * (guard + (1 - 2 * guard) * t);
        const double z = g.z0 + dz * (guard + (1 - 2 * guard) * u);
        const double phi = -std::numbers::pi + 2 * std::numbers::pi * (k + 0.5) / n;
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
      }
  return pts;
}

inline GridGeometry box_from(const Json& s, GridGeometry def) {
  def.r0 = get_or<double>(s, "r0", def.r0);
  def.r1 = get_or<double>(s, "r1", def.r1);
  def.z0 = get_or<double>(s, "z0", def.z0);
  def.z1 = get_or<double>(s, "z1", def.z1);
  if (!(def.r0 > 0.0 && def.r1 > def.r0 && def.z1 > def.z0)) throw ConfigError("bad (r, z) box");
  return def;
}

inline ProfilePair solovev_profiles(const Json& s) {
  return ProfilePair::solovev(get_or<double>(s, "I0", 1.0), get_or<double>(s, "a0", 1.0),
                              get_or<double>(s, "P_axis", 1.0), get_or<double>(s, "b0", 1.0));
}

}  // namespace detail

/// Solov'ev flux -(b0/8) r^4 - (a0/2) z^2 + kappa (r^2 z^2 - r^4/4) + D r^2,
/// an exact GS solution for I I' = a0, P' = b0.
struct Solovev {
  double a0 = 1.0, b0 = 1.0, kappa = 0.5, D = 1.0;

  double psi(double r, double z) const {
    const double r2 = r * r;
    return -b0 / 8 * r2 * r2 - a0 / 2 * z * z + kappa * (r2 * z * z - r2 * r2 / 4) + D * r2;
  }
  double psi_r(double r, double z) const {
    return -b0 / 2 * r * r * r + kappa * (2 * r * z * z - r * r * r) + 2 * D * r;
  }
  double psi_z(double r, double z) const { return -a0 * z + 2 * kappa * r * r * z; }

  FluxFunction flux(const GridGeometry& box) const {
    const Solovev s = *this;
    auto F = FluxFunction::analytic([s](double r, double z) { return s.psi(r, z); },
                                    [s](double r, double z) { return s.psi_r(r, z); },
                                    [s](double r, double z) { return s.psi_z(r, z); });
    F.a0 = box.r0;
    F.a1 = box.r1;
    F.b0 = box.z0;
    F.b1 = box.z1;
    return F;
  }

  static Solovev from(const Json& s) {
    Solovev v;
    v.a0 = get_or<double>(s, "a0", v.a0);
    v.b0 = get_or<double>(s, "b0", v.b0);
    v.kappa = get_or<double>(s, "kappa", v.kappa);
    v.D = get_or<double>(s, "D", v.D);
    return v;
  }
};

/// P -> P + eps x / R: breaks force balance on purpose (sensitivity runs).
inline MhdState perturb_pressure(const MhdState& st, double eps, double R) {
  MhdState out = st;
  out.P = {[P = st.P, eps, R](const Point3& p) { return P(p) + eps * p.x / R; }, nullptr, st.P.domain};
  return out;
}

inline Scene build_solution(const Json& cfg, std::uint64_t seed) {
  const Json& s = section(cfg, "solution");
  const Json& v = section(cfg, "verify");
  const int lattice = get_or<int>(v, "lattice", 10);
  const double guard = get_or<double>(v, "guard", 0.1);
  const int n_random = get_or<int>(v, "random_points", 0);
  if (lattice < 1 || guard < 0.0 || guard >= 0.5 || n_random < 0) throw ConfigError("bad sampling parameters");

  Scene sc;
  sc.kind = get_or<std::string>(s, "kind", "bobnev");
  if (sc.kind == "bobnev") {
    const double R = get_positive(s, "R", 1.0);
    const auto prm = bobnev_params(R, get_or<int>(s, "n", 3), get_or<double>(s, "B0", 100.0),
                                   get_or<double>(s, "P0", 4500.0));
    auto sol = bobnev_state(prm);
    const auto label = get_or<std::string>(s, "label", "P-P0");
    if (label == "P") {
      sol.state.surface_label = sol.state.P;
    } else if (label != "P-P0") {
      throw ConfigError("solution.label must be \"P\" or \"P-P0\"");
    }
    MhdState st = sol.state;
    if (const double eps = get_or<double>(s, "perturb_P", 0.0); eps != 0.0) st = perturb_pressure(st, eps, R);
    sc.state = st;
    sc.bobnev = sol;
    sc.radius = R;
    sc.P0 = prm.P0;
    sc.samples = ball_lattice(R, lattice, guard);
    if (n_random > 0) {
      const auto extra = random_ball_points(R * (1 - guard), static_cast<size_t>(n_random), seed);
      sc.samples.insert(sc.samples.end(), extra.begin(), extra.end());
    }
  } else if (sc.kind == "solovev" || sc.kind == "grid") {
    const auto pr = detail::solovev_profiles(s);
    FluxFunction F;
    GridGeometry box;
    if (sc.kind == "solovev") {
      box = detail::box_from(s, GridGeometry{});
      F = Solovev::from(s).flux(box);
    } else {
      const auto path = get_or<std::string>(s, "path", "");
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot read grid file '" + path + "'");
      const FluxGrid g = grid_from_table(read_csv(in));
      box = g.geom;
      F = FluxFunction::from_grid(g);
    }
    auto eq = gs_equilibrium(F, pr);
    MhdState st = eq.state;
    if (const double eps = get_or<double>(s, "perturb_P", 0.0); eps != 0.0) st = perturb_pressure(st, eps, box.r1);
    sc.state = st;
    sc.axi = eq;
    sc.box = box;
    sc.P0 = get_or<double>(s, "P_axis", 1.0);
    sc.samples = detail::annulus_samples(box, lattice, guard);
  } else {
    throw ConfigError("unknown solution kind '" + sc.kind + "'");
  }
  return sc;
}

// ----------------------------------------------------------- transform chain

namespace detail {

inline void move_geometry(Scene& sc, const Placement& step) {
  for (auto& p : sc.samples) p = step.map(p);
  sc.center = step.map(sc.center);
  sc.radius *= std::abs(step.s);
  sc.placement.A = step.A * sc.placement.A;
  sc.placement.a = step.map(sc.placement.a);
  sc.placement.s *= step.s;
}

inline const MhdState& need_mhd(const Scene& sc, const std::string& op) {
  if (const auto* m = std::get_if<MhdState>(&sc.state)) return *m;
  throw ConfigError("transform '" + op + "' needs an isotropic state");
}

inline const CglState& need_cgl(const Scene& sc, const std::string& op) {
  if (const auto* c = std::get_if<CglState>(&sc.state)) return *c;
  throw ConfigError("transform '" + op + "' needs an anisotropic state (apply mhd_to_cgl first)");
}

}  // namespace detail

/// Apply one transform table: op = isometry | scaling | dilation | pressure_shift |
/// mhd_to_cgl | infinite | cgl_to_mhd.
inline void apply_transform(Scene& sc, const Json& t) {
  const auto op = get_or<std::string>(t, "op", "");
  TransformOptions topt;
  topt.samples = sc.samples;
  topt.label_tolerance = get_or<double>(t, "label_tolerance", topt.label_tolerance);
  topt.min_abs_M = get_or<double>(t, "min_abs_M", topt.min_abs_M);

  if (op == "isometry") {
    EuclideanMotion m{get_vec3(t, "a", {}), get_or<double>(t, "phi", 0.0), get_or<double>(t, "theta", 0.0),
                      get_or<double>(t, "psi", 0.0)};
    std::visit([&](const auto& st) { sc.state = apply_isometry(st, m); }, sc.state);
    detail::move_geometry(sc, {m.rotation(), m.a, 1.0});
  } else if (op == "scaling") {
    const double a4 = get_or<double>(t, "a4", 1.0);
    std::visit([&](const auto& st) { sc.state = apply_scaling(st, a4); }, sc.state);
  } else if (op == "dilation") {
    const double a5 = get_or<double>(t, "a5", 1.0);
    std::visit([&](const auto& st) { sc.state = apply_dilation(st, a5); }, sc.state);
    detail::move_geometry(sc, {Mat3::identity(), {}, a5});
  } else if (op == "pressure_shift") {
    const double a6 = get_or<double>(t, "a6", 0.0);
    std::visit([&](const auto& st) { sc.state = apply_pressure_shift(st, a6); }, sc.state);
  } else if (op == "mhd_to_cgl") {
    if (!t.contains("M")) throw ConfigError("mhd_to_cgl needs M");
    sc.state = mhd_to_cgl(detail::need_mhd(sc, op), surface_function_from(t.at("M")), get_or<double>(t, "P1", 0.0),
                          topt);
  } else if (op == "infinite") {
    if (!t.contains("M")) throw ConfigError("infinite needs M");
    sc.state = infinite_transform(detail::need_cgl(sc, op), surface_function_from(t.at("M")), topt);
  } else if (op == "cgl_to_mhd") {
    sc.state = cgl_to_mhd(detail::need_cgl(sc, op));
  } else {
    throw ConfigError("unknown transform op '" + op + "'");
  }
  sc.chain.push_back(op);
}

inline Scene build_scene(const Json& cfg, std::uint64_t seed) {
  Scene sc = build_solution(cfg, seed);
  if (cfg.contains("transform")) {
    const Json& chain = cfg.at("transform");
    if (!chain.is_array()) throw ConfigError("transform must be an array of tables ([[transform]])");
    for (const auto& t : chain) apply_transform(sc, t);
  }
  return sc;
}

}  // namespace plasmaeq::cli

#endif  // PLASMAEQ_CLI_SCENE_HPP
