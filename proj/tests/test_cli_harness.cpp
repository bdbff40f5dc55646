#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "plasmaeq/cli/commands.hpp"

using namespace plasmaeq;
using namespace plasmaeq::cli;
namespace fs = std::filesystem;

namespace {

std::string config(const std::string& name) { return std::string(PLASMAEQ_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("plasmaeq_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::string& cmd, Options opt) {
  std::ostringstream out, err;
  const int code = run_command(cmd, opt, out, err);
  return {code, out.str(), err.str()};
}

Options with_config(const std::string& name) {
  Options o;
  o.config_path = config(name);
  return o;
}

}  // namespace

// ------------------------------------------------------------------ config

TEST(Config, ParsesTablesArraysAndScalars) {
  const Json j = parse_config(R"(
# comment
title = "vortex"   # trailing
[solution]
kind = 'bobnev'
R = 1_000.5
n = 3
on = true
big = inf
list = [1, 2,
        3]
inline = { kind = "affine", a = 1.0, b = -2e-3 }
[a.b]
c.d = 4
[[transform]]
op = "scaling"
[[transform]]
op = "dilation"
)");
  EXPECT_EQ(j["title"], "vortex");
  EXPECT_EQ(j["solution"]["kind"], "bobnev");
  EXPECT_DOUBLE_EQ(j["solution"]["R"].get<double>(), 1000.5);
  EXPECT_EQ(j["solution"]["n"].get<int>(), 3);
  EXPECT_TRUE(j["solution"]["on"].get<bool>());
  EXPECT_TRUE(std::isinf(j["solution"]["big"].get<double>()));
  EXPECT_EQ(j["solution"]["list"].size(), 3u);
  EXPECT_DOUBLE_EQ(j["solution"]["inline"]["b"].get<double>(), -2e-3);
  EXPECT_EQ(j["a"]["b"]["c"]["d"].get<int>(), 4);
  ASSERT_EQ(j["transform"].size(), 2u);
  EXPECT_EQ(j["transform"][1]["op"], "dilation");
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("a = 1\nb = \n").find("line 2"), std::string::npos);
  EXPECT_NE(message("a = 1\n\na = 2\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("[x\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("s = \"open\n").find("line 1"), std::string::npos);
}

TEST(Config, OverridesAndTypedLookup) {
  Json j = parse_config("[verify]\ntolerance = 1e-5\n");
  apply_override(j, "verify.tolerance=2e-5");
  apply_override(j, "solution.kind=bobnev");
  apply_override(j, "verify.checks=[\"euler\"]");
  EXPECT_DOUBLE_EQ(get_or<double>(j["verify"], "tolerance", 0.0), 2e-5);
  EXPECT_EQ(get_or<std::string>(j["solution"], "kind", ""), "bobnev");
  EXPECT_EQ(j["verify"]["checks"][0], "euler");
  EXPECT_EQ(get_or<int>(j["verify"], "missing", 7), 7);
  EXPECT_THROW(get_or<double>(j["solution"], "kind", 0.0), ConfigError);
  EXPECT_THROW(apply_override(j, "novalue"), ConfigError);
  EXPECT_THROW(apply_override(j, "verify.tolerance.x=1"), ConfigError);
}

// ---------------------------------------------------------------------- io

TEST(Io, CsvRoundTripIsExact) {
  const CsvTable t{{"x", "y"}, {{0.1, 1.0 / 3.0}, {-1e-300, 6.02214076e23}, {std::nextafter(1.0, 2.0), 0.0}}};
  std::stringstream ss;
  write_csv(ss, t);
  const CsvTable back = read_csv(ss);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Io, VtkHeaderAndCounts) {
  const auto sol = bobnev_state(1.0, 1, 1.0, 0.0);
  SampleBox box;
  box.nx = 3;
  box.ny = 4;
  box.nz = 5;
  std::stringstream ss;
  write_vtk_structured(ss, box, state_scalars(sol.state), {{"B", [B = sol.state.B](const Point3& p) { return B(p); }}},
                       sol.state.domain);
  const std::string s = ss.str();
  EXPECT_EQ(s.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(s.find("DIMENSIONS 3 4 5"), std::string::npos);
  EXPECT_NE(s.find("POINT_DATA 60"), std::string::npos);
  EXPECT_NE(s.find("SCALARS P"), std::string::npos);
  EXPECT_NE(s.find("VECTORS B"), std::string::npos);
}

TEST(Io, GridTableRoundTrip) {
  GridGeometry g;
  g.nr = 5;
  g.nz = 4;
  const auto grid = FluxGrid::sample(g, [](double r, double z) { return r * r - z / 3; });
  const auto back = grid_from_table(grid_table(grid));
  EXPECT_EQ(back.geom.nr, 5);
  EXPECT_EQ(back.geom.nz, 4);
  EXPECT_EQ(back.psi, grid.psi);
}

// ------------------------------------------------------------------ report

TEST(Report, VerdictIsConjunction) {
  RunReport r;
  EXPECT_TRUE(r.passed());
  r.add_bound("a", 1.0, 2.0);
  EXPECT_TRUE(r.passed());
  r.add_bound("nan", std::nan(""), 1.0);
  EXPECT_FALSE(r.passed());
  std::ostringstream os;
  r.write_text(os);
  EXPECT_NE(os.str().find("FAIL"), std::string::npos);
  EXPECT_NE(os.str().find("FAILED (2 checks)"), std::string::npos);
}

TEST(Report, ConfigHashIsStable) {
  const Json a = parse_config("x = 1\ny = \"b\"\n");
  const Json b = parse_config("y = \"b\"\nx = 1\n");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash(parse_config("x = 2\ny = \"b\"\n")));
}

// ---------------------------------------------------------------- commands

TEST(Commands, RootsPrintsTableAndPasses) {
  Options o;
  o.R = 1.0;
  o.n_max = 3;
  const auto r = run("roots", o);
  EXPECT_EQ(r.code, kPass);
  EXPECT_NE(r.out.find("2.88"), std::string::npos);
  EXPECT_NE(r.out.find("6.16"), std::string::npos);
}

TEST(Commands, EmptyCheckListPasses) {
  Options o = with_config("bobnev_verify.toml");
  o.overrides = {"verify.checks=[]"};
  const auto r = run("verify", o);
  EXPECT_EQ(r.code, kPass) << r.err;
  EXPECT_NE(r.out.find("PASSED (0 checks)"), std::string::npos);
}

TEST(Commands, ReferenceVortexPasses) {
  Options o = with_config("bobnev_verify.toml");
  o.overrides = {"verify.lattice=5", "verify.random_points=20", "verify.flux.n_theta=32", "verify.flux.n_phi=64"};
  const auto r = run("verify", o);
  EXPECT_EQ(r.code, kPass) << r.out << r.err;
}

TEST(Commands, PerturbedPressureFails) {
  const auto r = run("verify", with_config("bobnev_perturbed.toml"));
  EXPECT_EQ(r.code, kCheckFailed);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Commands, VanishingMIsNumericalFailure) {
  const auto r = run("transform", with_config("transform_degenerate.toml"));
  EXPECT_EQ(r.code, kNumerical);
  EXPECT_NE(r.err.find("changes sign"), std::string::npos);
}

TEST(Commands, PathologicalRelaxationReportsHistory) {
  const auto r = run("solve-gs", with_config("gs_pathological.toml"));
  EXPECT_EQ(r.code, kNumerical);
  EXPECT_NE(r.err.find("update history"), std::string::npos);
}

TEST(Commands, ManufacturedGsConverges) {
  Options o = with_config("gs_manufactured.toml");
  o.overrides = {"gs.refinements=[17, 33, 65]"};
  const auto r = run("solve-gs", o);
  EXPECT_EQ(r.code, kPass) << r.out << r.err;
  EXPECT_NE(r.out.find("convergence_order"), std::string::npos);
}

TEST(Commands, BadInputIsUsageError) {
  EXPECT_EQ(run("verify", with_config("does_not_exist.toml")).code, kUsage);
  Options o;
  o.overrides = {"solution.kind=\"nope\""};
  EXPECT_EQ(run("verify", o).code, kUsage);
  o.overrides = {"solution.kind=\"bobnev\"", "solution.R=-1"};
  EXPECT_EQ(run("verify", o).code, kUsage);
  o.overrides = {"solution.kind=\"bobnev\"", "transform=[{op=\"dilation\", a5=0}]"};
  EXPECT_EQ(run("transform", o).code, kUsage);
  EXPECT_EQ(run("frobnicate", Options{}).code, kUsage);
}

TEST(Commands, IdentityChainLeavesSamplesUnchanged) {
  const fs::path a = scratch("plain"), b = scratch("identity");
  Options o;
  o.overrides = {"solution.kind=\"bobnev\"", "solution.n=3", "output.formats=[\"csv\"]", "verify.checks=[]",
                 "verify.lattice=4"};
  o.output_dir = a.string();
  ASSERT_EQ(run("transform", o).code, kPass);
  o.overrides.push_back(
      "transform=[{op=\"isometry\", a=[0,0,0], phi=0, theta=0, psi=0}, {op=\"scaling\", a4=1}, {op=\"dilation\", "
      "a5=1}, {op=\"pressure_shift\", a6=0}]");
  o.output_dir = b.string();
  const auto r = run("transform", o);
  ASSERT_EQ(r.code, kPass) << r.err;
  const std::string sa = slurp(a / "state_samples.csv"), sb = slurp(b / "state_samples.csv");
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, sb);
}

TEST(Commands, TransformWritesAllFormats) {
  const fs::path d = scratch("cgl");
  Options o = with_config("transform_cgl.toml");
  o.output_dir = d.string();
  o.overrides = {"verify.lattice=4", "verify.random_points=10", "verify.flux.n_theta=24", "verify.flux.n_phi=48"};
  const auto r = run("transform", o);
  EXPECT_EQ(r.code, kPass) << r.out << r.err;
  for (const char* f : {"cgl.vtk", "cgl_samples.csv", "cgl_slice_xz.csv", "report.json", "report.csv"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
  const Json rep = Json::parse(slurp(d / "report.json"));
  EXPECT_TRUE(rep["passed"].get<bool>());
  EXPECT_EQ(rep["command"], "transform");
}

TEST(Commands, RepeatedRunsAreIdenticalApartFromTimings) {
  Options o = with_config("bobnev_verify.toml");
  o.overrides = {"verify.lattice=4", "verify.random_points=30", "verify.checks=[\"equilibrium\", \"euler\"]"};
  o.seed = 99;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  o.output_dir = a.string();
  run("verify", o);
  o.output_dir = b.string();
  run("verify", o);
  Json ja = Json::parse(slurp(a / "report.json")), jb = Json::parse(slurp(b / "report.json"));
  ja.erase("timings");
  jb.erase("timings");
  ja.erase("outputs");
  jb.erase("outputs");
  EXPECT_EQ(ja, jb);
  EXPECT_EQ(slurp(a / "report.csv"), slurp(b / "report.csv"));
}

TEST(Binary, ExitCodesMatchLibrary) {
  auto status = [](const std::string& args) {
    const std::string cmd = std::string(PLASMAEQ_CLI) + " " + args + " >/dev/null 2>&1";
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("roots --R 1 --n-max 3"), 0);
  EXPECT_EQ(status("verify --config " + config("bobnev_perturbed.toml")), 1);
  EXPECT_EQ(status("--bogus-flag"), 2);
  EXPECT_EQ(status("transform --config " + config("transform_degenerate.toml")), 3);
}
