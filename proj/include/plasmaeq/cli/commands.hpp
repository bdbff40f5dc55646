#ifndef PLASMAEQ_CLI_COMMANDS_HPP
#define PLASMAEQ_CLI_COMMANDS_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "plasmaeq/cli/scene.hpp"
#include "plasmaeq/conservation.hpp"
#include "plasmaeq/report.hpp"

namespace plasmaeq::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

struct Options {
  std::string config_path;
  std::string output_dir;  // overrides [output].dir
  double tolerance_scale = 1.0;
  int threads = 1;
  std::uint64_t seed = 20240607;
  std::vector<std::string> overrides;
  std::optional<double> R;
  std::optional<int> n_max;
};

/// Config file (if any) with --set overrides applied.
inline Json load_run_config(const Options& opt) {
  Json cfg = opt.config_path.empty() ? Json::object() : load_config(opt.config_path);
  for (const auto& s : opt.overrides) apply_override(cfg, s);
  return cfg;
}

/// Output directory, created on demand; empty means "write no files".
inline std::string output_dir(const Json& cfg, const Options& opt) {
  std::string dir = opt.output_dir.empty() ? get_or<std::string>(section(cfg, "output"), "dir", "") : opt.output_dir;
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  }
  return dir;
}

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// ----------------------------------------------------------------- roots

inline RunReport cmd_roots(double R, int n_max, const std::string& dir, std::ostream& out) {
  if (!(R > 0.0) || n_max < 1) throw InvalidParameter("roots needs R > 0 and n_max >= 1");
  RunReport rep;
  rep.command = "roots";
  Stopwatch sw;
  const auto lambdas = bobnev_roots(R, n_max);
  rep.timings.push_back({"roots", sw.seconds()});

  CsvTable t{{"n", "lambda", "lambda_R", "residual"}, {}};
  char line[160];
  std::snprintf(line, sizeof line, "%3s %22s %22s %12s\n", "n", "lambda", "lambda*R", "residual");
  out << line;
  for (size_t k = 0; k < lambdas.size(); ++k) {
    const double lr = lambdas[k] * R;
    const double res = bobnev_root_function(lr);
    t.rows.push_back({double(k + 1), lambdas[k], lr, res});
    std::snprintf(line, sizeof line, "%3zu %22.15f %22.15f %12.3e\n", k + 1, lambdas[k], lr, res);
    out << line;
    rep.add_bound("root_residual[n=" + std::to_string(k + 1) + "]", std::abs(res), bobnev_root_tolerance(lr));
  }
  if (!dir.empty()) {
    auto f = open_output(join_path(dir, "roots.csv"));
    write_csv(f, t);
    rep.outputs.push_back(join_path(dir, "roots.csv"));
  }
  return rep;
}

// ---------------------------------------------------------------- verify

struct VerifySettings {
  FdScheme scheme{};
  double tol = 1e-5;
  std::vector<std::string> checks;
  std::vector<double> radii;  // flux spheres, in units of the bounding radius
  SphereQuadrature quad{};
  double flux_rel_tol = 1e-8;
  SurfaceFunction f = SurfaceFunction::identity();
  int threads = 1;
};

inline std::vector<std::string> default_checks(const Scene& sc) {
  std::vector<std::string> c{"equilibrium"};
  if (sc.is_cgl()) c.push_back("isotropic_image");
  else c.push_back("euler");
  c.push_back("stress_divergence");
  c.push_back("identities");
  if (sc.radius > 0.0) c.push_back("fluxes");
  if (sc.bobnev && sc.pristine()) c.push_back("separatrix");
  if (sc.axi && sc.pristine()) c.push_back("cylindrical");
  return c;
}

inline VerifySettings verify_settings(const Json& cfg, const Scene& sc, const Options& opt) {
  const Json& v = section(cfg, "verify");
  VerifySettings s;
  s.scheme.h = get_positive(v, "h", 1e-4);
  const auto order = get_or<std::string>(v, "order", "central2");
  if (order != "central2" && order != "central4") throw ConfigError("verify.order must be central2 or central4");
  s.scheme.order = order == "central4" ? FdOrder::central4 : FdOrder::central2;
  s.scheme.relative = get_or<bool>(v, "relative_step", true);
  s.tol = get_positive(v, "tolerance", 1e-5) * opt.tolerance_scale;
  s.checks = v.contains("checks") ? get_or<std::vector<std::string>>(v, "checks", {}) : default_checks(sc);
  const Json& fl = section(v, "flux");
  s.radii = get_or<std::vector<double>>(fl, "radii", {0.2, 0.376, 0.5, 0.597, 0.8});
  s.quad.n_theta = get_or<int>(fl, "n_theta", 64);
  s.quad.n_phi = get_or<int>(fl, "n_phi", 128);
  s.flux_rel_tol = get_positive(fl, "rel_tol", 1e-8) * opt.tolerance_scale;
  if (fl.contains("f")) s.f = surface_function_from(fl.at("f"));
  s.threads = std::max(1, opt.threads);
  return s;
}

namespace detail {

inline std::string where(const ResidualReport& r) {
  std::ostringstream os;
  os << "max at " << plasmaeq::detail::describe(r.worst) << ", " << r.samples << " pts";
  return os.str();
}

inline void add_residual(RunReport& rep, const ResidualReport& r) {
  rep.add(r.name, r.relative(), r.tolerance, r.passed, where(r));
}

inline void check_equilibrium(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  const auto& pts = sc.samples;
  if (const auto* m = std::get_if<MhdState>(&sc.state)) {
    const auto rs = parallel_map(pts, [&](const Point3& p) { return mhd_residual(*m, p, s.scheme); }, s.threads);
    std::vector<std::pair<double, double>> mom, sol;
    for (const auto& r : rs) {
      mom.push_back({norm(r.momentum), r.force_scale});
      sol.push_back({r.solenoidal, r.div_scale});
    }
    add_residual(rep, reduce_residuals("equilibrium.momentum", pts, mom, s.tol));
    add_residual(rep, reduce_residuals("equilibrium.divergence", pts, sol, s.tol));
  } else {
    const auto& c = std::get<CglState>(sc.state);
    const auto rs = parallel_map(pts, [&](const Point3& p) { return cgl_residual(c, p, s.scheme); }, s.threads);
    std::vector<std::pair<double, double>> mom, sol, se;
    for (const auto& r : rs) {
      mom.push_back({norm(r.momentum), r.force_scale});
      sol.push_back({r.solenoidal, r.div_scale});
      se.push_back({r.state_eq, r.state_scale});
    }
    add_residual(rep, reduce_residuals("equilibrium.momentum", pts, mom, s.tol));
    add_residual(rep, reduce_residuals("equilibrium.divergence", pts, sol, s.tol));
    add_residual(rep, reduce_residuals("equilibrium.tau_on_surfaces", pts, se, s.tol));
  }
}

inline void check_euler(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  const auto* m = std::get_if<MhdState>(&sc.state);
  if (!m) return;
  const auto e = euler_map(*m, sc.P0);
  const auto& pts = sc.samples;
  const auto rs = parallel_map(pts, [&](const Point3& p) { return euler_residual(e, p, s.scheme); }, s.threads);
  std::vector<std::pair<double, double>> mom, con;
  for (const auto& r : rs) {
    mom.push_back({norm(r.momentum), r.scale});
    con.push_back({r.continuity, r.div_scale});
  }
  add_residual(rep, reduce_residuals("euler.momentum", pts, mom, s.tol));
  add_residual(rep, reduce_residuals("euler.continuity", pts, con, s.tol));
}

inline void check_isotropic_image(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  const auto* c = std::get_if<CglState>(&sc.state);
  if (!c) return;
  const auto& pts = sc.samples;
  const auto rs =
      parallel_map(pts, [&](const Point3& p) { return isotropic_image_residual(*c, p, s.scheme); }, s.threads);
  std::vector<std::pair<double, double>> mom;
  for (const auto& r : rs) mom.push_back({norm(r.momentum), r.force_scale});
  add_residual(rep, reduce_residuals("isotropic_image.momentum", pts, mom, s.tol));
}

inline void check_stress_divergence(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  const auto basis = KillingVector::basis();
  const auto& pts = sc.samples;
  std::vector<std::pair<double, double>> vals;
  std::vector<Point3> at;
  for (const auto& z : basis) {
    const auto rs = parallel_map(pts, [&](const Point3& p) {
      return std::visit([&](const auto& st) { return stress_divergence_residual(st, z, p, s.scheme); }, sc.state);
    }, s.threads);
    for (size_t k = 0; k < rs.size(); ++k) {
      vals.push_back({rs[k].value, rs[k].scale});
      at.push_back(pts[k]);
    }
  }
  add_residual(rep, reduce_residuals("stress_divergence", at, vals, s.tol));
}

inline void check_identities(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  const KillingVector zeta{{0.3, -0.5, 0.8}, {0.6, 0.2, -0.4}};
  const char* names[] = {"identity.stress", "identity.flux", "identity.current"};
  const FluxRow rows[] = {FluxRow::stress, FluxRow::flux, FluxRow::current};
  for (int r = 0; r < 3; ++r) {
    FluxRowSpec spec;
    spec.row = rows[r];
    spec.zeta = zeta;
    spec.f = s.f;
    const auto rs = parallel_map(sc.samples, [&](const Point3& p) {
      return std::visit([&](const auto& st) { return multiplier_identity_check(st, spec, p, s.scheme); }, sc.state);
    }, s.threads);
    std::vector<std::pair<double, double>> vals;
    for (const auto& c : rs) vals.push_back({c.lhs - c.rhs, c.scale});
    add_residual(rep, reduce_residuals(names[r], sc.samples, vals, s.tol));
  }
}

inline std::string fmt_short(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

inline VectorField row_flux(const Scene& sc, const FluxRowSpec& spec) {
  if (sc.is_cgl()) return cgl_conserved_flux(std::get<CglState>(sc.state), spec);
  return mhd_conserved_flux(std::get<MhdState>(sc.state), spec);
}

inline void check_fluxes(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  if (!(sc.radius > 0.0)) return;
  const auto basis = KillingVector::basis();
  const char* kname[] = {"e_x", "e_y", "e_z", "rot_x", "rot_y", "rot_z"};
  for (double rr : s.radii) {
    if (!(rr > 0.0 && rr < 1.0)) throw ConfigError("flux radii are fractions of the domain radius in (0, 1)");
    SphereQuadrature q = s.quad;
    q.center = sc.center;
    q.radius = rr * sc.radius;
    const std::string tag = "@r=" + fmt_short(rr);
    auto record = [&](const std::string& name, const FluxReport& f) {
      rep.add(name + tag, std::abs(f.value), f.tolerance, f.passed,
              "scale " + fmt_short(f.scale) + ", quad err " + fmt_short(f.error));
    };
    for (size_t k = 0; k < basis.size(); ++k) {
      FluxRowSpec spec;
      spec.zeta = basis[k];
      const VectorField V = row_flux(sc, spec);
      record(std::string("flux.stress[") + kname[k] + "]",
             sphere_integral(q, [&](const SphereNode& nd) { return dot(V.at(nd.x), nd.n); }, s.threads,
                             s.flux_rel_tol));
    }
    for (FluxRow row : {FluxRow::flux, FluxRow::current}) {
      FluxRowSpec spec;
      spec.row = row;
      spec.f = s.f;
      const VectorField V = row_flux(sc, spec);
      record(row == FluxRow::flux ? "flux.magnetic" : "flux.current",
             sphere_integral(q, [&](const SphereNode& nd) { return dot(V.at(nd.x), nd.n); }, s.threads,
                             s.flux_rel_tol));
    }
  }
}

/// Closed-form integrands on the separatrix spheres: magnetic and current rows
/// vanish identically, the stress row reduces to a_rho[-P0 - rho^2 V'^2 sin^2/8].
inline void check_separatrix(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  if (!sc.bobnev || !sc.pristine()) return;
  const auto& pr = sc.bobnev->profiles;
  const SurfaceFunction f = scaled(s.f, 1.0 / pr.prm.P0);  // O(1) near P0
  const KillingVector zeta{{0.3, -0.5, 0.8}, {0.6, 0.2, -0.4}};
  for (double rho : separatrix_radii(pr.prm)) {
    double mag = 0.0, cur = 0.0, red = 0.0, scale = 0.0;
    const int nt = 33, np = 64;
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < np; ++j) {
        const double th = std::numbers::pi * (i + 0.5) / nt, ph = 2 * std::numbers::pi * j / np;
        const auto g = bobnev_flux_integrands(pr, zeta, f, rho, th, ph);
        const double sr = separatrix_stress_integrand(pr, zeta, rho, th, ph);
        mag = std::max(mag, std::abs(g.magnetic));
        cur = std::max(cur, std::abs(g.current));
        red = std::max(red, std::abs(g.stress - sr));
        scale = std::max(scale, std::abs(sr));
      }
    const std::string tag = "@rho=" + fmt_short(rho);
    rep.add_bound("separatrix.magnetic" + tag, mag, 1e-12);
    rep.add_bound("separatrix.current" + tag, cur, 1e-12);
    rep.add_bound("separatrix.stress_reduction" + tag, red / scale, 1e-10);
  }
}

inline void check_cylindrical(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  if (!sc.axi || !sc.pristine()) return;
  const FdScheme cs = FdScheme::absolute(s.scheme.h, s.scheme.order);
  for (int law = 1; law <= 6; ++law) {
    std::vector<std::pair<double, double>> vals;
    for (const auto& p : sc.samples) {
      const auto c = cylindrical_cl_residual(*sc.axi, law, to_cylindrical(p), cs);
      vals.push_back({c.value, c.scale});
    }
    add_residual(rep, reduce_residuals("cylindrical_law[" + std::to_string(law) + "]", sc.samples, vals, s.tol));
  }
}

}  // namespace detail

inline void run_checks(RunReport& rep, const Scene& sc, const VerifySettings& s) {
  for (const auto& c : s.checks) {
    Stopwatch sw;
    if (c == "equilibrium") detail::check_equilibrium(rep, sc, s);
    else if (c == "euler") detail::check_euler(rep, sc, s);
    else if (c == "isotropic_image") detail::check_isotropic_image(rep, sc, s);
    else if (c == "stress_divergence") detail::check_stress_divergence(rep, sc, s);
    else if (c == "identities") detail::check_identities(rep, sc, s);
    else if (c == "fluxes") detail::check_fluxes(rep, sc, s);
    else if (c == "separatrix") detail::check_separatrix(rep, sc, s);
    else if (c == "cylindrical") detail::check_cylindrical(rep, sc, s);
    else throw ConfigError("unknown verification check '" + c + "'");
    rep.timings.push_back({c, sw.seconds()});
  }
}

inline void write_report_files(RunReport& rep, const std::string& dir) {
  if (dir.empty()) return;
  rep.outputs.push_back(join_path(dir, "report.json"));
  rep.outputs.push_back(join_path(dir, "report.csv"));
  auto j = open_output(join_path(dir, "report.json"));
  j << rep.to_json().dump(2) << '\n';
  auto c = open_output(join_path(dir, "report.csv"));
  rep.write_csv(c);
}

inline RunReport cmd_verify(const Json& cfg, const Options& opt) {
  RunReport rep;
  rep.command = "verify";
  rep.config_hash = config_hash(cfg);
  Stopwatch sw;
  const Scene sc = build_scene(cfg, opt.seed);
  rep.timings.push_back({"setup", sw.seconds()});
  run_checks(rep, sc, verify_settings(cfg, sc, opt));
  write_report_files(rep, output_dir(cfg, opt));
  return rep;
}

// ---------------------------------------------------------------- export

struct ExportSettings {
  std::vector<std::string> formats{"vtk", "csv", "slice"};
  int n = 21;
  int slice_n = 101;
  std::string prefix = "state";
};

inline ExportSettings export_settings(const Json& cfg) {
  const Json& o = section(cfg, "output");
  ExportSettings e;
  e.formats = get_or<std::vector<std::string>>(o, "formats", e.formats);
  e.n = get_or<int>(o, "n", e.n);
  e.slice_n = get_or<int>(o, "slice_n", e.slice_n);
  e.prefix = get_or<std::string>(o, "prefix", e.prefix);
  if (e.n < 2 || e.slice_n < 2) throw ConfigError("output sampling needs at least 2 nodes per axis");
  return e;
}

/// Axis-aligned box around the state's domain.
inline SampleBox export_box(const Scene& sc, int n) {
  SampleBox b;
  b.nx = b.ny = b.nz = n;
  if (sc.radius > 0.0) {
    const double r = sc.radius;
    b.lo = sc.center - Vec3{r, r, r};
    b.hi = sc.center + Vec3{r, r, r};
  } else if (sc.box) {
    b.lo = {-sc.box->r1, -sc.box->r1, sc.box->z0};
    b.hi = {sc.box->r1, sc.box->r1, sc.box->z1};
    b.lo = sc.placement.map(b.lo);
    b.hi = sc.placement.map(b.hi);
  }
  return b;
}

inline void export_scene(RunReport& rep, const Scene& sc, const ExportSettings& e, const std::string& dir) {
  if (dir.empty()) return;
  const auto path = [&](const std::string& suffix) { return join_path(dir, e.prefix + suffix); };
  std::visit([&](const auto& st) {
    for (const auto& fmt : e.formats) {
      if (fmt == "vtk") {
        auto f = open_output(path(".vtk"));
        write_vtk_structured(f, export_box(sc, e.n), state_scalars(st), {{"B", [B = st.B](const Point3& p) {
                                                                             return B(p);
                                                                           }}},
                             st.domain);
        rep.outputs.push_back(path(".vtk"));
      } else if (fmt == "csv") {
        const CsvTable t = sample_state(st, sc.samples);
        {
          auto f = open_output(path("_samples.csv"));
          write_csv(f, t);
        }
        std::ifstream in(path("_samples.csv"));
        const CsvTable back = read_csv(in);
        size_t mismatches = back.rows.size() == t.rows.size() ? 0 : t.rows.size();
        for (size_t i = 0; i < std::min(back.rows.size(), t.rows.size()); ++i)
          if (back.rows[i] != t.rows[i]) ++mismatches;
        rep.add("export.csv_roundtrip", double(mismatches), 0.0, mismatches == 0, "rows differing after re-read");
        rep.outputs.push_back(path("_samples.csv"));
      } else if (fmt == "slice") {
        const double r = sc.radius > 0.0 ? sc.radius : (sc.box ? sc.box->r1 : 1.0);
        const double z0 = sc.radius > 0.0 ? -r : (sc.box ? sc.box->z0 : -1.0);
        const double z1 = sc.radius > 0.0 ? r : (sc.box ? sc.box->z1 : 1.0);
        auto f = open_output(path("_slice_xz.csv"));
        write_csv(f, slice_xz(st, sc.center.x, sc.center.x + r, sc.center.z + z0, sc.center.z + z1, e.slice_n,
                              e.slice_n));
        rep.outputs.push_back(path("_slice_xz.csv"));
      } else {
        throw ConfigError("unknown output format '" + fmt + "'");
      }
    }
  }, sc.state);
}

inline RunReport cmd_export(const Json& cfg, const Options& opt) {
  RunReport rep;
  rep.command = "export";
  rep.config_hash = config_hash(cfg);
  const std::string dir = output_dir(cfg, opt);
  if (dir.empty()) throw ConfigError("export needs --output or [output].dir");
  Stopwatch sw;
  const Scene sc = build_scene(cfg, opt.seed);
  export_scene(rep, sc, export_settings(cfg), dir);
  rep.timings.push_back({"export", sw.seconds()});
  write_report_files(rep, dir);
  return rep;
}

// ------------------------------------------------------------- transform

inline RunReport cmd_transform(const Json& cfg, const Options& opt) {
  RunReport rep;
  rep.command = "transform";
  rep.config_hash = config_hash(cfg);
  Stopwatch sw;
  const Scene sc = build_scene(cfg, opt.seed);
  rep.timings.push_back({"transform", sw.seconds()});
  std::string chain;
  for (const auto& op : sc.chain) chain += (chain.empty() ? "" : " -> ") + op;
  rep.add("transform.chain_length", double(sc.chain.size()), 0.0, true, chain.empty() ? "identity" : chain);
  run_checks(rep, sc, verify_settings(cfg, sc, opt));
  const std::string dir = output_dir(cfg, opt);
  export_scene(rep, sc, export_settings(cfg), dir);
  write_report_files(rep, dir);
  return rep;
}

// -------------------------------------------------------------- solve-gs

inline RunReport cmd_solve_gs(const Json& cfg, const Options& opt, std::ostream& out) {
  RunReport rep;
  rep.command = "solve-gs";
  rep.config_hash = config_hash(cfg);
  const Json& g = section(cfg, "gs");
  const auto kase = get_or<std::string>(g, "case", "manufactured");
  if (kase != "manufactured" && kase != "zero") throw ConfigError("gs.case must be manufactured or zero");
  const auto sizes = get_or<std::vector<int>>(g, "refinements", {33, 65, 129});
  if (sizes.empty()) throw ConfigError("gs.refinements is empty");
  const GridGeometry box = detail::box_from(g, GridGeometry{});
  const Solovev sol = kase == "zero" ? Solovev{0, 0, 0, 0} : Solovev::from(g);
  SolverConfig sc;
  sc.tolerance = get_positive(g, "tolerance", 1e-10);
  sc.max_iterations = get_or<int>(g, "max_iterations", sc.max_iterations);
  sc.omega = get_or<double>(g, "omega", 0.0);
  sc.source = AffineSource{sol.a0, 0.0, sol.b0, 0.0};
  const double order_tol = get_or<double>(g, "order_tolerance", 0.2);

  CsvTable table{{"n", "h", "max_error", "rms_error", "iterations", "final_update", "residual", "order"}, {}};
  std::vector<double> hs, errs;
  std::optional<FluxGrid> finest;
  char line[200];
  std::snprintf(line, sizeof line, "%6s %10s %12s %12s %6s %8s\n", "n", "h", "max_err", "rms_err", "iters", "order");
  out << line;
  for (int n : sizes) {
    GridGeometry geo = box;
    geo.nr = geo.nz = n;
    FluxGrid b = FluxGrid::sample(geo, [&](double r, double z) { return sol.psi(r, z); });
    for (int i = 1; i < n - 1; ++i)
      for (int j = 1; j < n - 1; ++j) b.at(i, j) = 0.0;
    Stopwatch sw;
    FluxGrid x = solve_gs(b, sc);
    rep.timings.push_back({"solve n=" + std::to_string(n), sw.seconds()});
    double emax = 0.0, esum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double e = x.at(i, j) - sol.psi(geo.r(i), geo.z(j));
        emax = std::max(emax, std::abs(e));
        esum += e * e;
      }
    const double rms = std::sqrt(esum / (double(n) * n));
    const double h = geo.dr();
    double order = std::nan("");
    if (!errs.empty() && errs.back() > 0.0 && emax > 0.0) order = std::log(errs.back() / emax) / std::log(hs.back() / h);
    hs.push_back(h);
    errs.push_back(emax);
    table.rows.push_back({double(n), h, emax, rms, double(x.info.iterations), x.info.final_update,
                          x.info.residual_norm, order});
    std::snprintf(line, sizeof line, "%6d %10.3e %12.4e %12.4e %6d %8.3f\n", n, h, emax, rms, x.info.iterations,
                  order);
    out << line;
    rep.add_bound("solver_residual[n=" + std::to_string(n) + "]", x.info.residual_norm, 10.0 * sc.tolerance,
                  std::to_string(x.info.iterations) + " sweeps");
    finest = std::move(x);
  }
  if (kase == "zero") {
    rep.add_bound("zero_solution.max_abs", errs.back(), 0.0);
  } else if (hs.size() >= 2) {
    const double slope = log_log_slope(hs, errs);
    rep.add("convergence_order", slope, order_tol, std::abs(slope - 2.0) <= order_tol, "expected 2");
  }
  const std::string dir = output_dir(cfg, opt);
  if (!dir.empty()) {
    {
      auto f = open_output(join_path(dir, "convergence.csv"));
      write_csv(f, table);
    }
    {
      auto f = open_output(join_path(dir, "psi.csv"));
      write_csv(f, grid_table(*finest));
    }
    {
      auto f = open_output(join_path(dir, "psi.vtk"));
      write_grid_vtk(f, *finest);
    }
    for (const char* n : {"convergence.csv", "psi.csv", "psi.vtk"}) rep.outputs.push_back(join_path(dir, n));
  }
  write_report_files(rep, dir);
  return rep;
}

// ---------------------------------------------------------------- driver

/// Run a subcommand and map failures onto exit codes.
inline int run_command(const std::string& cmd, const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    const Json cfg = load_run_config(opt);
    RunReport rep;
    if (cmd == "roots") {
      const Json& r = section(cfg, "roots");
      const double R = opt.R.value_or(get_or<double>(r, "R", 1.0));
      const int n = opt.n_max.value_or(get_or<int>(r, "n_max", 3));
      rep = cmd_roots(R, n, output_dir(cfg, opt), out);
      rep.config_hash = config_hash(cfg);
    } else if (cmd == "verify") {
      rep = cmd_verify(cfg, opt);
    } else if (cmd == "transform") {
      rep = cmd_transform(cfg, opt);
    } else if (cmd == "solve-gs") {
      rep = cmd_solve_gs(cfg, opt, out);
    } else if (cmd == "export") {
      rep = cmd_export(cfg, opt);
    } else {
      err << "unknown command '" << cmd << "'\n";
      return kUsage;
    }
    rep.write_text(out);
    return rep.passed() ? kPass : kCheckFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidParameter& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    const auto& h = e.history();
    err << "  update history (" << h.size() << " sweeps):";
    const size_t step = std::max<size_t>(1, h.size() / 8);
    for (size_t i = 0; i < h.size(); i += step) err << ' ' << '[' << i + 1 << "] " << h[i];
    if (!h.empty()) err << " ... [" << h.size() << "] " << h.back();
    err << '\n';
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace plasmaeq::cli

#endif  // PLASMAEQ_CLI_COMMANDS_HPP
