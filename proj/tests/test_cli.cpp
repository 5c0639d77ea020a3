#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisurf/commands.hpp"
#include "anisurf/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace anisurf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("anisurf_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

ScenarioConfig config(const std::string& text, const fs::path& out) {
  ScenarioConfig c = parse_config_text(text);
  c.output_dir = out.string();
  return c;
}

int run_tool(const std::string& args) {
  const int status = std::system((std::string(ANISURF_TOOL) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("defaults") {
  const ScenarioConfig c = parse_config_text("");
  CHECK(c.gamma.family == "isotropic");
  CHECK(c.surface.family == "sphere");
  CHECK(c.numerics.quadrature == 32);
  CHECK(c.checks.empty());
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_AS(parse_config_text("[gamma]\nfamliy = lens\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[gama]\nfamily = lens\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("family = lens\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[gamma]\nfamily = cubic\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[gamma]\nbeta = two\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[gamma]\nq = 1 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[numerics]\nquadrature = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[numerics]\nseed = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[checks]\nrun = rep, nonsense\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[surface]\nfamily = mesh\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[delaunay]\nclass = nodoid\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[gamma]\nfamily = lens\nfamily = lens\n"), ConfigError);
}

TEST_CASE("echo round trip") {
  const ScenarioConfig c = parse_config_text(
      "[gamma]\nfamily = product\nprofile = lens 2\ncross = trig 3 0.2\n"
      "[surface]\nfamily = delaunay\n[delaunay]\nclass = unduloid\nlambda = -2\nneck = 0.5\n"
      "[checks]\nrun = rep, degree\n[numerics]\nseed = 9\ntolerance_scale = 2.5\n");
  const std::string echo = c.echo_ini();
  const ScenarioConfig d = parse_config_text(echo);
  CHECK(d.echo_ini() == echo);
  CHECK(d.checks == std::vector<std::string>{"degree", "rep"});
  CHECK(d.numerics.seed == 9);
  CHECK(d.delaunay.lambda == -2.0);
}

TEST_CASE("planar support specs") {
  CHECK(parse_planar_support("circle 2")(0.3) == doctest::Approx(2.0));
  CHECK(parse_planar_support("lens 2")(0.0) == doctest::Approx(3.0));
  CHECK(parse_planar_support("trig 3 0.2")(0.0) == doctest::Approx(1.2));
  CHECK(parse_planar_support("ellipse 2 1")(0.0) == doctest::Approx(2.0));
  CHECK(parse_planar_support("fourier 1 0 0.1 | 0.05")(0.0) == doctest::Approx(1.1));
  CHECK_THROWS_AS(parse_planar_support("square 1"), ConfigError);
  CHECK_THROWS_AS(parse_planar_support("trig 3"), ConfigError);
}

TEST_CASE("sampled gamma from a table") {
  const fs::path dir = scratch("table");
  const auto q = AnisotropyFunction::quadratic(Vec3(1, 1, 4).asDiagonal());
  {
    std::ofstream t(dir / "gamma.csv");
    t << "nx,ny,nz,gamma\n";
    for (const Vec3& n : fibonacci_sphere(400)) {
      // gamma^2 is a quadratic polynomial, so fit sqrt(quadratic) at degree 8.
      t << n.x() << "," << n.y() << "," << n.z() << "," << q.eval(n) << "\n";
    }
  }
  GammaSpec g;
  g.family = "sampled";
  g.table = (dir / "gamma.csv").string();
  g.degree = 8;
  const AnisotropyFunction s = make_gamma(g);
  for (const Vec3& n : fibonacci_sphere(37)) CHECK(s.eval(n) == doctest::Approx(q.eval(n)).epsilon(1e-3));
  g.table = (dir / "missing.csv").string();
  CHECK_THROWS_AS(make_gamma(g), ConfigError);
}

TEST_CASE("wulff command") {
  const fs::path out = scratch("wulff_iso");
  std::ostringstream log;
  REQUIRE(cmd_wulff(config("[numerics]\nwulff_samples = 2000\n", out), log) == exit_pass);
  const Json s = read_json(out / "summary.json");
  CHECK(s["energy"].get<double>() == doctest::Approx(4 * kPi).epsilon(1e-6));
  CHECK(fs::exists(out / "wulff.obj"));
  CHECK(fs::exists(out / "config.ini"));

  const fs::path lens = scratch("wulff_lens");
  REQUIRE(cmd_wulff(config("[gamma]\nfamily = lens\nbeta = 2\n[numerics]\nwulff_samples = 3000\n", lens), log) ==
          exit_pass);
  CHECK_FALSE(read_json(lens / "wulff_edges.json")["edges"].empty());

  const fs::path quad = scratch("wulff_quad");
  REQUIRE(cmd_wulff(config("[gamma]\nfamily = quadratic\nq = 1 1 4\n", quad), log) == exit_pass);
  CHECK(read_json(quad / "summary.json")["volume"].get<double>() == doctest::Approx(8 * kPi / 3).epsilon(1e-6));
  CHECK(read_json(quad / "summary.json")["hausdorff"].get<double>() < 1e-2);
}

TEST_CASE("verify command exit codes") {
  std::ostringstream log;
  const fs::path a = scratch("verify_sphere");
  CHECK(cmd_verify(config("[numerics]\nsamples = 50\n", a), log) == exit_pass);
  CHECK(fs::exists(a / "report.json"));
  CHECK(fs::exists(a / "report.txt"));
  CHECK(fs::exists(a / "residuals.csv"));

  const fs::path b = scratch("verify_ellipsoid");
  CHECK(cmd_verify(config("[surface]\nfamily = ellipsoid\naxes = 1 1 2\n[numerics]\nsamples = 50\n", b), log) ==
        exit_check_failure);
  const Json r = read_json(b / "report.json");
  bool closed_pass = false, eq_fail = false;
  for (const Json& c : r["checks"]) {
    if (c["name"] == "closed_integrals") closed_pass = c["status"] == "pass";
    if (c["name"] == "equilibrium") eq_fail = c["status"] == "fail";
  }
  CHECK(closed_pass);
  CHECK(eq_fail);
}

TEST_CASE("verify on a mesh runs the mesh-level checks") {
  const fs::path w = scratch("mesh_src");
  std::ostringstream log;
  REQUIRE(cmd_wulff(config("[numerics]\nwulff_samples = 3000\n", w), log) == exit_pass);
  const fs::path out = scratch("mesh_verify");
  const int code = cmd_verify(
      config("[surface]\nfamily = mesh\npath = " + (w / "wulff.obj").string() + "\n", out), log);
  CHECK(code == exit_pass);
  const Json r = read_json(out / "report.json");
  int applicable = 0;
  for (const Json& c : r["checks"]) applicable += c["status"] != "not_applicable";
  CHECK(applicable == 2);
}

TEST_CASE("delaunay command") {
  std::ostringstream log;
  const fs::path out = scratch("delaunay_cat");
  REQUIRE(cmd_delaunay(config("[gamma]\nfamily = product\nprofile = circle\ncross = circle\n"
                              "[delaunay]\nclass = catenoid\n",
                              out),
                       log) == exit_pass);
  const Json s = read_json(out / "summary.json");
  CHECK(s["lambda_max_residual"].get<double>() <= 1e-6);
  CHECK(s["checks"]["verdict"] == "pass");
  for (const char* f : {"surface.obj", "profile.csv", "edges.json", "config.ini"}) CHECK(fs::exists(out / f));

  const fs::path bad = scratch("delaunay_bad");
  CHECK(cmd_delaunay(config("[gamma]\nfamily = product\n[delaunay]\nclass = unduloid\nlambda = -2\nneck = 5\n", bad),
                     log) == exit_numeric_failure);
  CHECK(log.str().find("bracket") != std::string::npos);
  CHECK(cmd_delaunay(config("[gamma]\nfamily = quadratic\n", bad), log) == exit_config_error);
}

TEST_CASE("tool binary: flags, exit codes and determinism") {
  const fs::path dir = scratch("tool");
  {
    std::ofstream c(dir / "v.ini");
    c << "[gamma]\nfamily = quadratic\nq = 1 1 4\n[surface]\nfamily = ellipsoid\naxes = 1 1.5 2\n"
         "[numerics]\nsamples = 40\n";
  }
  {
    std::ofstream c(dir / "bad.ini");
    c << "[gamma]\nunknown_key = 1\n";
  }
  const std::string cfg = (dir / "v.ini").string();
  // The output directory is part of the echoed config, so both runs share it.
  const int a = run_tool("verify --config " + cfg + " --out " + (dir / "a").string() + " --seed 4");
  const std::string json_a = slurp(dir / "a" / "report.json");
  const std::string csv_a = slurp(dir / "a" / "residuals.csv");
  const int b = run_tool("verify --config " + cfg + " --out " + (dir / "a").string() + " --seed 4");
  CHECK(a == b);
  CHECK(json_a == slurp(dir / "a" / "report.json"));
  CHECK(csv_a == slurp(dir / "a" / "residuals.csv"));
  CHECK(read_json(dir / "a" / "report.json")["meta"]["seed"] == 4);
  CHECK(run_tool("verify --config " + (dir / "bad.ini").string()) == exit_config_error);
  CHECK(run_tool("verify --config " + (dir / "missing.ini").string()) == exit_config_error);
  CHECK(run_tool("frobnicate") == exit_config_error);
  CHECK(run_tool("verify --config " + cfg + " --out " + (dir / "q").string() + " --quadrature 1") ==
        exit_config_error);
  CHECK(run_tool("verify --config " + cfg + " --out " + (dir / "b").string() + " --seed 9") == a);
  CHECK(run_tool("report-merge " + (dir / "a" / "report.json").string() + " " +
                 (dir / "b" / "report.json").string() + " --out " + (dir / "m").string()) == a);
  CHECK(read_json(dir / "m" / "merged.json")["checks"].size() == 2 * read_json(dir / "a" / "report.json")["checks"].size());
}
