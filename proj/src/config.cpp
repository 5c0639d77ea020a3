#include "anisurf/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace anisurf {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"gamma", {"family", "q", "beta", "profile", "cross", "table", "degree"}},
      {"surface", {"family", "radius", "center", "axes", "major", "minor", "scale", "path"}},
      {"delaunay",
       {"class", "lambda", "neck", "z_extent", "periods", "tolerance", "csv_rows", "mesh_resolution",
        "summary_samples"}},
      {"checks", {"run"}},
      {"numerics", {"quadrature", "samples", "seed", "tolerance_scale", "stencil", "wulff_samples"}},
      {"output", {"dir"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s, const std::string& seps = " \t,") {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& v, const std::string& where) {
  double out = 0.0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e || !std::isfinite(out)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", where, v));
  }
  return out;
}

long long to_int(const std::string& v, const std::string& where) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", where, v));
  }
  return out;
}

std::vector<double> to_doubles(const std::string& v, const std::string& where) {
  std::vector<double> out;
  for (const std::string& t : tokens(v)) out.push_back(to_double(t, where));
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt::format("{}", v[i]);
  return s;
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

PlanarSupport parse_planar_support(const std::string& spec) {
  const std::string where = fmt::format("planar support '{}'", spec);
  std::string head = spec;
  std::string tail;
  if (auto bar = spec.find('|'); bar != std::string::npos) {
    head = spec.substr(0, bar);
    tail = spec.substr(bar + 1);
  }
  const std::vector<std::string> t = tokens(head);
  require(!t.empty(), "empty planar support spec");
  auto arg = [&](std::size_t i) {
    require(i < t.size(), where + ": missing parameter");
    return to_double(t[i], where);
  };
  auto arity = [&](std::size_t lo, std::size_t hi) {
    require(t.size() >= lo + 1 && t.size() <= hi + 1, where + ": wrong number of parameters");
  };
  try {
    if (t[0] == "circle") {
      arity(0, 1);
      return PlanarSupport::circle(t.size() > 1 ? arg(1) : 1.0);
    }
    if (t[0] == "ellipse") {
      arity(2, 2);
      return PlanarSupport::ellipse(arg(1), arg(2));
    }
    if (t[0] == "lens") {
      arity(1, 1);
      return PlanarSupport::lens(arg(1));
    }
    if (t[0] == "trig") {
      arity(2, 2);
      return PlanarSupport::trig(static_cast<int>(to_int(t[1], where)), arg(2));
    }
    if (t[0] == "fourier") {
      require(t.size() >= 2, where + ": fourier needs c0");
      std::vector<double> a;
      for (std::size_t i = 2; i < t.size(); ++i) a.push_back(arg(i));
      return PlanarSupport::fourier(arg(1), a, to_doubles(tail, where));
    }
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const ConstructionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown curve '" + t[0] + "' (circle, ellipse, lens, trig, fourier)");
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& source) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.message() + " (line " + std::to_string(e.line()) + ")"));
  }

  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) {
      require(!body.empty(), fmt::format("{}: key '{}' outside a section", source, section));
      throw ConfigError(fmt::format("{}: unknown section [{}]", source, section));
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        throw ConfigError(fmt::format("{}: unknown key '{}' in [{}]", source, key, section));
      }
    }
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  ScenarioConfig c;
  c.source = source;

  if (auto v = get("gamma.family")) c.gamma.family = *v;
  if (auto v = get("gamma.q")) c.gamma.q = to_doubles(*v, "gamma.q");
  if (auto v = get("gamma.beta")) c.gamma.beta = to_double(*v, "gamma.beta");
  if (auto v = get("gamma.profile")) c.gamma.profile = *v;
  if (auto v = get("gamma.cross")) c.gamma.cross = *v;
  if (auto v = get("gamma.table")) c.gamma.table = *v;
  if (auto v = get("gamma.degree")) c.gamma.degree = static_cast<int>(to_int(*v, "gamma.degree"));
  {
    static const std::set<std::string> fam = {"isotropic", "quadratic", "lens", "product", "sampled"};
    require(fam.count(c.gamma.family) > 0,
            "gamma.family: '" + c.gamma.family + "' (isotropic, quadratic, lens, product, sampled)");
    require(c.gamma.family != "sampled" || !c.gamma.table.empty(), "gamma.table: required for family sampled");
    require(c.gamma.degree >= 0 && c.gamma.degree <= 12, "gamma.degree: 0..12");
    require(c.gamma.q.size() == 3 || c.gamma.q.size() == 9, "gamma.q: 3 diagonal or 9 row-major values");
    require(c.gamma.beta >= 0.0, "gamma.beta: must be >= 0");
  }

  if (auto v = get("surface.family")) c.surface.family = *v;
  if (auto v = get("surface.radius")) c.surface.radius = to_double(*v, "surface.radius");
  if (auto v = get("surface.center")) c.surface.center = to_doubles(*v, "surface.center");
  if (auto v = get("surface.axes")) c.surface.axes = to_doubles(*v, "surface.axes");
  if (auto v = get("surface.major")) c.surface.major = to_double(*v, "surface.major");
  if (auto v = get("surface.minor")) c.surface.minor = to_double(*v, "surface.minor");
  if (auto v = get("surface.scale")) c.surface.scale = to_double(*v, "surface.scale");
  if (auto v = get("surface.path")) c.surface.path = *v;
  {
    static const std::set<std::string> fam = {"sphere", "ellipsoid", "torus", "wulff", "delaunay", "mesh"};
    require(fam.count(c.surface.family) > 0,
            "surface.family: '" + c.surface.family + "' (sphere, ellipsoid, torus, wulff, delaunay, mesh)");
    require(c.surface.radius > 0.0, "surface.radius: must be > 0");
    require(c.surface.center.size() == 3, "surface.center: three values");
    require(c.surface.axes.size() == 3 &&
                std::all_of(c.surface.axes.begin(), c.surface.axes.end(), [](double a) { return a > 0.0; }),
            "surface.axes: three positive values");
    require(c.surface.minor > 0.0 && c.surface.major > c.surface.minor, "surface: need major > minor > 0");
    require(c.surface.scale > 0.0, "surface.scale: must be > 0");
    require(c.surface.family != "mesh" || !c.surface.path.empty(), "surface.path: required for family mesh");
  }

  if (auto v = get("delaunay.class")) c.delaunay.profile_class = *v;
  if (auto v = get("delaunay.lambda")) c.delaunay.lambda = to_double(*v, "delaunay.lambda");
  if (auto v = get("delaunay.neck")) c.delaunay.neck = to_double(*v, "delaunay.neck");
  if (auto v = get("delaunay.z_extent")) c.delaunay.z_extent = to_double(*v, "delaunay.z_extent");
  if (auto v = get("delaunay.periods")) c.delaunay.periods = static_cast<int>(to_int(*v, "delaunay.periods"));
  if (auto v = get("delaunay.tolerance")) c.delaunay.tolerance = to_double(*v, "delaunay.tolerance");
  if (auto v = get("delaunay.csv_rows")) c.delaunay.csv_rows = static_cast<int>(to_int(*v, "delaunay.csv_rows"));
  if (auto v = get("delaunay.mesh_resolution")) {
    c.delaunay.mesh_resolution = static_cast<int>(to_int(*v, "delaunay.mesh_resolution"));
  }
  if (auto v = get("delaunay.summary_samples")) {
    c.delaunay.summary_samples = static_cast<int>(to_int(*v, "delaunay.summary_samples"));
  }
  {
    try {
      (void)profile_class_from_string(c.delaunay.profile_class);
    } catch (const std::exception&) {
      throw ConfigError("delaunay.class: '" + c.delaunay.profile_class +
                        "' (wulff, sphere, cylinder, catenoid, unduloid)");
    }
    require(c.delaunay.neck > 0.0, "delaunay.neck: must be > 0");
    require(c.delaunay.z_extent > 0.0, "delaunay.z_extent: must be > 0");
    require(c.delaunay.periods >= 1 && c.delaunay.periods <= 50, "delaunay.periods: 1..50");
    require(c.delaunay.tolerance > 0.0 && c.delaunay.tolerance < 1e-3, "delaunay.tolerance: in (0, 1e-3)");
    require(c.delaunay.csv_rows >= 2, "delaunay.csv_rows: >= 2");
    require(c.delaunay.mesh_resolution >= 2 && c.delaunay.mesh_resolution <= 2000,
            "delaunay.mesh_resolution: 2..2000");
    require(c.delaunay.summary_samples >= 1, "delaunay.summary_samples: >= 1");
  }

  if (auto v = get("checks.run")) {
    const auto list = tokens(*v);
    if (!(list.size() == 1 && list[0] == "all")) {
      for (const std::string& n : list) {
        require(std::find(check_names().begin(), check_names().end(), n) != check_names().end(),
                "checks.run: unknown check '" + n + "'");
        c.checks.push_back(n);
      }
      std::sort(c.checks.begin(), c.checks.end());
      c.checks.erase(std::unique(c.checks.begin(), c.checks.end()), c.checks.end());
      require(!c.checks.empty(), "checks.run: empty list");
    }
  }

  if (auto v = get("numerics.quadrature")) c.numerics.quadrature = static_cast<int>(to_int(*v, "numerics.quadrature"));
  if (auto v = get("numerics.samples")) c.numerics.samples = static_cast<int>(to_int(*v, "numerics.samples"));
  if (auto v = get("numerics.seed")) {
    const long long s = to_int(*v, "numerics.seed");
    require(s >= 0, "numerics.seed: must be >= 0");
    c.numerics.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("numerics.tolerance_scale")) {
    c.numerics.tolerance_scale = to_double(*v, "numerics.tolerance_scale");
  }
  if (auto v = get("numerics.stencil")) c.numerics.stencil = to_double(*v, "numerics.stencil");
  if (auto v = get("numerics.wulff_samples")) {
    c.numerics.wulff_samples = static_cast<int>(to_int(*v, "numerics.wulff_samples"));
  }
  require(c.numerics.quadrature >= 2 && c.numerics.quadrature <= 128, "numerics.quadrature: 2..128");
  require(c.numerics.samples >= 1 && c.numerics.samples <= 100000, "numerics.samples: 1..100000");
  require(c.numerics.tolerance_scale > 0.0, "numerics.tolerance_scale: must be > 0");
  require(c.numerics.stencil > 0.0 && c.numerics.stencil < 0.05, "numerics.stencil: in (0, 0.05)");
  require(c.numerics.wulff_samples >= 20 && c.numerics.wulff_samples <= 200000,
          "numerics.wulff_samples: 20..200000");

  if (auto v = get("output.dir")) c.output_dir = *v;
  require(!c.output_dir.empty(), "output.dir: empty");
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string ScenarioConfig::echo_ini() const {
  std::ostringstream os;
  os << "[gamma]\n"
     << "family = " << gamma.family << "\n"
     << "q = " << join(gamma.q) << "\n"
     << "beta = " << num(gamma.beta) << "\n"
     << "profile = " << gamma.profile << "\n"
     << "cross = " << gamma.cross << "\n"
     << "table = " << gamma.table << "\n"
     << "degree = " << gamma.degree << "\n\n";
  os << "[surface]\n"
     << "family = " << surface.family << "\n"
     << "radius = " << num(surface.radius) << "\n"
     << "center = " << join(surface.center) << "\n"
     << "axes = " << join(surface.axes) << "\n"
     << "major = " << num(surface.major) << "\n"
     << "minor = " << num(surface.minor) << "\n"
     << "scale = " << num(surface.scale) << "\n"
     << "path = " << surface.path << "\n\n";
  os << "[delaunay]\n"
     << "class = " << delaunay.profile_class << "\n"
     << "lambda = " << num(delaunay.lambda) << "\n"
     << "neck = " << num(delaunay.neck) << "\n"
     << "z_extent = " << num(delaunay.z_extent) << "\n"
     << "periods = " << delaunay.periods << "\n"
     << "tolerance = " << num(delaunay.tolerance) << "\n"
     << "csv_rows = " << delaunay.csv_rows << "\n"
     << "mesh_resolution = " << delaunay.mesh_resolution << "\n"
     << "summary_samples = " << delaunay.summary_samples << "\n\n";
  os << "[checks]\nrun = ";
  if (checks.empty()) {
    os << "all";
  } else {
    for (std::size_t i = 0; i < checks.size(); ++i) os << (i ? ", " : "") << checks[i];
  }
  os << "\n\n[numerics]\n"
     << "quadrature = " << numerics.quadrature << "\n"
     << "samples = " << numerics.samples << "\n"
     << "seed = " << numerics.seed << "\n"
     << "tolerance_scale = " << num(numerics.tolerance_scale) << "\n"
     << "stencil = " << num(numerics.stencil) << "\n"
     << "wulff_samples = " << numerics.wulff_samples << "\n\n";
  os << "[output]\ndir = " << output_dir << "\n";
  return os.str();
}

Json ScenarioConfig::echo_json() const {
  Json j;
  j["gamma"] = {{"family", gamma.family}, {"q", gamma.q}, {"beta", gamma.beta},
                {"profile", gamma.profile}, {"cross", gamma.cross},
                {"table", gamma.table},     {"degree", gamma.degree}};
  j["surface"] = {{"family", surface.family}, {"radius", surface.radius}, {"center", surface.center},
                  {"axes", surface.axes},     {"major", surface.major},   {"minor", surface.minor},
                  {"scale", surface.scale},   {"path", surface.path}};
  j["delaunay"] = {{"class", delaunay.profile_class},
                   {"lambda", delaunay.lambda},
                   {"neck", delaunay.neck},
                   {"z_extent", delaunay.z_extent},
                   {"periods", delaunay.periods},
                   {"tolerance", delaunay.tolerance},
                   {"csv_rows", delaunay.csv_rows},
                   {"mesh_resolution", delaunay.mesh_resolution},
                   {"summary_samples", delaunay.summary_samples}};
  j["checks"] = checks.empty() ? Json("all") : Json(checks);
  j["numerics"] = {{"quadrature", numerics.quadrature},
                   {"samples", numerics.samples},
                   {"seed", numerics.seed},
                   {"tolerance_scale", numerics.tolerance_scale},
                   {"stencil", numerics.stencil},
                   {"wulff_samples", numerics.wulff_samples}};
  j["output"] = {{"dir", output_dir}};
  return j;
}

std::vector<std::array<double, 4>> read_gamma_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("gamma.table: cannot read " + path);
  std::vector<std::array<double, 4>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto t = tokens(line);
    // A non-numeric first row is a header.
    double probe = 0.0;
    if (rows.empty() && lineno == 1 && !t.empty() &&
        std::from_chars(t[0].data(), t[0].data() + t[0].size(), probe).ec != std::errc()) {
      continue;
    }
    const std::string where = fmt::format("{}:{}", path, lineno);
    require(t.size() == 4, where + ": expected nx, ny, nz, gamma");
    std::array<double, 4> r{};
    for (std::size_t i = 0; i < 4; ++i) r[i] = to_double(t[i], where);
    const double len = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    require(len > 1e-12, where + ": zero direction");
    for (std::size_t i = 0; i < 3; ++i) r[i] /= len;
    require(r[3] > 0.0, where + ": gamma must be positive");
    rows.push_back(r);
  }
  return rows;
}

SampledFit fit_sampled_gamma(const std::vector<std::array<double, 4>>& rows, int degree) {
  std::vector<std::array<int, 3>> powers;
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; a + b <= degree; ++b) {
      for (int c = 0; a + b + c <= degree; ++c) powers.push_back({a, b, c});
    }
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(powers.size());
  require(n >= m / 2 + 1, fmt::format("gamma.table: {} samples are too few for degree {}", n, degree));
  auto basis = [powers](const Vec3& y, Eigen::Index k) {
    const auto& p = powers[static_cast<std::size_t>(k)];
    return std::pow(y.x(), p[0]) * std::pow(y.y(), p[1]) * std::pow(y.z(), p[2]);
  };
  Eigen::MatrixXd a(n, m);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    const Vec3 y(r[0], r[1], r[2]);
    for (Eigen::Index k = 0; k < m; ++k) a(i, k) = basis(y, k);
    rhs(i) = r[3];
  }
  // Minimum-norm least squares: monomials are dependent on the sphere.
  const Eigen::VectorXd coeff = a.completeOrthogonalDecomposition().solve(rhs);
  SampledFit fit;
  fit.max_residual = (a * coeff - rhs).cwiseAbs().maxCoeff();
  fit.samples = static_cast<int>(n);
  fit.eval = [coeff, basis, m](const Vec3& y) {
    const Vec3 u = y.normalized();
    double v = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) v += coeff(k) * basis(u, k);
    return v;
  };
  return fit;
}

AnisotropyFunction make_gamma(const GammaSpec& g) {
  try {
    if (g.family == "sampled") {
      const SampledFit fit = fit_sampled_gamma(read_gamma_table(g.table), g.degree);
      return AnisotropyFunction::from_values(
          fit.eval, fmt::format("{}, degree {}, {} samples", g.table, g.degree, fit.samples));
    }
    if (g.family == "isotropic") return AnisotropyFunction::isotropic();
    if (g.family == "quadratic") {
      Mat3 q = Mat3::Zero();
      if (g.q.size() == 3) {
        q = Vec3(g.q[0], g.q[1], g.q[2]).asDiagonal();
      } else {
        for (int i = 0; i < 9; ++i) q(i / 3, i % 3) = g.q[static_cast<std::size_t>(i)];
      }
      return AnisotropyFunction::quadratic(q);
    }
    if (g.family == "lens") return AnisotropyFunction::lens(g.beta);
    if (g.family == "product") {
      return AnisotropyFunction::product(parse_planar_support(g.profile), parse_planar_support(g.cross));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("gamma: ") + e.what());
  } catch (const ConstructionError& e) {
    throw ConfigError(std::string("gamma: ") + e.what());
  }
  throw ConfigError("gamma.family: unknown '" + g.family + "'");
}

ProfileRequest make_profile_request(const DelaunaySpec& d) {
  ProfileRequest r;
  r.cls = profile_class_from_string(d.profile_class);
  r.lambda = d.lambda;
  r.neck = d.neck;
  r.z_extent = d.z_extent;
  r.periods = d.periods;
  r.tolerance = d.tolerance;
  return r;
}

PiecewiseSurface make_surface(const ScenarioConfig& c, const AnisotropyFunction& gamma) {
  const SurfaceSpec& s = c.surface;
  PiecewiseSurface out;
  if (s.family == "sphere") {
    out = make_sphere(s.radius, Vec3(s.center[0], s.center[1], s.center[2]));
  } else if (s.family == "ellipsoid") {
    out = make_ellipsoid(Vec3(s.axes[0], s.axes[1], s.axes[2]));
  } else if (s.family == "torus") {
    out = make_torus(s.major, s.minor);
  } else if (s.family == "wulff") {
    return wulff_surface(gamma, s.scale);
  } else if (s.family == "delaunay") {
    const GammaKind& k = gamma.kind();
    require(k.profile.has_value(),
            "surface.family = delaunay needs a product gamma (family product or lens)");
    const PlanarSupport cross = k.cross.value_or(PlanarSupport::circle());
    const ProductWulff w = ProductWulff::make(*k.profile, cross);
    const ProfileCurve p = solve_profile(w, make_profile_request(c.delaunay));
    out = build_surface(p, cross);
  } else {
    throw ConfigError("surface.family = " + s.family + " is not a parametric surface");
  }
  if (s.scale != 1.0) out = scaled(out, s.scale);
  return out;
}

VerifyOptions make_verify_options(const ScenarioConfig& c) {
  VerifyOptions o;
  o.quadrature = c.numerics.quadrature;
  o.samples = c.numerics.samples;
  o.seed = c.numerics.seed;
  o.tolerance_scale = c.numerics.tolerance_scale;
  o.stencil = c.numerics.stencil;
  o.checks = std::set<std::string>(c.checks.begin(), c.checks.end());
  return o;
}

}  // namespace anisurf
