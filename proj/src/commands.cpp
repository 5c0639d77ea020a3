#include "anisurf/commands.hpp"

#include "anisurf/delaunay.hpp"
#include "anisurf/identities.hpp"
#include "anisurf/mesh.hpp"
#include "anisurf/report.hpp"
#include "anisurf/wulff.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace anisurf {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

fs::path prepare(const ScenarioConfig& c) {
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_text(dir / "config.ini", c.echo_ini());
  return dir;
}

/// Maps exceptions onto exit codes around a command body.
template <class F>
int guarded(std::ostream& log, const char* what, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << what << ": config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const DomainError& e) {
    log << what << ": " << e.what() << "\n";
    return exit_numeric_failure;
  } catch (const ConstructionError& e) {
    log << what << ": construction failed: " << e.what() << "\n";
    return exit_numeric_failure;
  } catch (const NumericError& e) {
    log << what << ": numeric failure: " << e.what() << "\n";
    return exit_numeric_failure;
  } catch (const std::exception& e) {
    log << what << ": " << e.what() << "\n";
    return exit_numeric_failure;
  }
}

/// Checks that make sense on a triangle mesh; the rest need charts.
VerificationReport verify_mesh(const ScenarioConfig& c, const AnisotropyFunction& gamma) {
  const TriangleMesh mesh = read_obj_file(c.surface.path);
  VerificationReport rep;
  rep.gamma = gamma.describe();
  rep.gamma_family = to_string(gamma.kind().family);
  rep.surface = "mesh(" + c.surface.path + ")";
  rep.quadrature = c.numerics.quadrature;
  rep.samples = c.numerics.samples;
  rep.seed = c.numerics.seed;
  rep.tolerance_scale = c.numerics.tolerance_scale;
  const Tolerances tol;
  const double ts = c.numerics.tolerance_scale;
  const bool closed = mesh.closed();
  for (const std::string& name : check_names()) {
    if (!c.checks.empty() && std::find(c.checks.begin(), c.checks.end(), name) == c.checks.end()) continue;
    CheckRecord r;
    r.name = name;
    r.sample_count = static_cast<int>(mesh.triangles.size());
    try {
      if (name == "degree" && closed) {
        r.identity = "total angle defect / 4 pi, deg <= 1";
        const double d = mesh.gauss_map_degree();
        r.integral_residual = std::abs(d - std::round(d));
        r.tolerance = tol.degree * ts;
        r.details["raw"] = d;
        r.status = *r.integral_residual <= r.tolerance && std::round(d) <= 1.0 ? CheckStatus::pass
                                                                              : CheckStatus::fail;
      } else if (name == "isoperimetric" && closed) {
        r.identity = "F^3 / (9 V^2) >= F[W]";
        const double f = mesh.energy(gamma);
        const double v = mesh.volume();
        if (!(v > 0.0)) throw DomainError("mesh volume is not positive; check the orientation");
        const double fw = wulff_energy(gamma, 48);
        const double ratio = f * f * f / (9.0 * v * v);
        r.integral_residual = (ratio - fw) / fw;
        r.tolerance = tol.isoperimetric * ts;
        r.details["ratio"] = ratio;
        r.details["wulff_energy"] = fw;
        r.details["energy"] = f;
        r.details["volume"] = v;
        r.status = *r.integral_residual >= -r.tolerance ? CheckStatus::pass : CheckStatus::fail;
      } else {
        r.sample_count = 0;
        r.status = CheckStatus::not_applicable;
        r.message = closed ? "needs a parametric surface" : "mesh is not closed";
      }
    } catch (const std::exception& e) {
      r.status = CheckStatus::error;
      r.message = e.what();
    }
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace

int cmd_wulff(const ScenarioConfig& c, std::ostream& log) {
  return guarded(log, "wulff", [&] {
    const AnisotropyFunction gamma = make_gamma(c.gamma);
    const fs::path dir = prepare(c);
    const WulffShape w = wulff_construct(gamma, c.numerics.wulff_samples);
    write_wulff(w, (dir / "wulff.obj").string(), (dir / "wulff_edges.json").string());
    Json s;
    s["report"] = "wulff";
    s["gamma"] = w.gamma;
    s["sample_count"] = w.sample_count;
    s["energy"] = w.energy;
    s["volume"] = w.volume;
    s["isoperimetric_ratio"] = w.energy * w.energy * w.energy / (9.0 * w.volume * w.volume);
    s["integrals"] = w.parametric_integrals ? "parametric" : "polytope";
    s["mesh_energy"] = w.mesh_energy;
    s["mesh_volume"] = w.mesh_volume;
    s["edge_count"] = w.edges.size();
    s["face_region_count"] = w.faces.size();
    s["support_excess"] = support_excess(w, gamma);
    try {
      s["hausdorff"] = hausdorff_to_wulff(w, gamma);
    } catch (const DomainError&) {
      s["hausdorff"] = nullptr;
    }
    s["config"] = c.echo_json();
    write_json_file((dir / "summary.json").string(), s);
    log << fmt::format("wulff: F[W] = {:.12g}, V[W] = {:.12g}, {} edges -> {}\n", w.energy, w.volume,
                       w.edges.size(), dir.string());
    return static_cast<int>(exit_pass);
  });
}

int cmd_verify(const ScenarioConfig& c, std::ostream& log) {
  return guarded(log, "verify", [&] {
    const AnisotropyFunction gamma = make_gamma(c.gamma);
    VerificationReport rep;
    if (c.surface.family == "mesh") {
      rep = verify_mesh(c, gamma);
    } else {
      const PiecewiseSurface surf = make_surface(c, gamma);
      rep = run_verification(surf, gamma, make_verify_options(c));
    }
    const fs::path dir = prepare(c);
    Json j = rep.to_json();
    j["config"] = c.echo_json();
    write_json_file((dir / "report.json").string(), j);
    write_text(dir / "report.txt", rep.table());
    write_text(dir / "residuals.csv", rep.residual_csv());
    log << rep.table();
    return static_cast<int>(rep.passed() ? exit_pass : exit_check_failure);
  });
}

Json delaunay_verdict(const Json& s, const DelaunayTolerances& tol, bool* pass) {
  Json v;
  bool ok = true;
  auto item = [&](const char* name, const char* key, double limit) {
    if (!s.contains(key)) return;
    const double x = s[key].get<double>();
    const bool good = x <= limit;
    v[name] = {{"value", x}, {"tolerance", limit}, {"pass", good}};
    ok = ok && good;
  };
  item("lambda", "lambda_max_residual", tol.lambda);
  item("xi_continuity", "edge_max_xi_jump", tol.xi_jump);
  item("edge_force_balance", "edge_max_force_jump", tol.force_jump);
  item("tangency", "tangency_max_residual", tol.tangency);
  item("catenoid_oracle", "catenoid_oracle_residual", tol.catenoid);
  item("periodicity", "periodicity_residual", tol.periodicity);
  if (s.contains("cross_section_independence")) {
    const double x = s["cross_section_independence"]["max_discrepancy"].get<double>();
    const bool good = x <= tol.independence;
    v["cross_section_independence"] = {{"value", x}, {"tolerance", tol.independence}, {"pass", good}};
    ok = ok && good;
  }
  v["verdict"] = ok ? "pass" : "fail";
  if (pass) *pass = ok;
  return v;
}

int cmd_delaunay(const ScenarioConfig& c, std::ostream& log) {
  return guarded(log, "delaunay", [&] {
    const AnisotropyFunction gamma = make_gamma(c.gamma);
    const GammaKind& k = gamma.kind();
    if (!k.profile) throw ConfigError("delaunay needs a product gamma (gamma.family = product or lens)");
    const PlanarSupport cross = k.cross.value_or(PlanarSupport::circle());
    const ProductWulff w = ProductWulff::make(*k.profile, cross);
    const ProfileCurve profile = solve_profile(w, make_profile_request(c.delaunay));
    const PiecewiseSurface surf = build_surface(profile, cross);
    const DelaunaySummary sum =
        summarize_delaunay(w, profile, surf, c.delaunay.summary_samples, c.numerics.seed);
    const fs::path dir = prepare(c);

    write_obj_file((dir / "surface.obj").string(), surface_mesh(surf, c.delaunay.mesh_resolution),
                   fmt::format("{} profile, gamma {}", to_string(profile.cls), gamma.describe()));
    write_text(dir / "profile.csv", profile_csv(profile, surf, w.gamma, c.delaunay.csv_rows));
    Json edges;
    edges["surface"] = surf.name;
    edges["edges"] = edge_polylines(surf, 65);
    write_json_file((dir / "edges.json").string(), edges);

    Json s;
    s["report"] = "delaunay";
    s["gamma"] = gamma.describe();
    const Json body = delaunay_summary_json(sum, profile);
    for (auto it = body.begin(); it != body.end(); ++it) s[it.key()] = it.value();
    bool ok = false;
    s["checks"] = delaunay_verdict(body, DelaunayTolerances{}, &ok);
    s["config"] = c.echo_json();
    write_json_file((dir / "summary.json").string(), s);
    log << fmt::format(
        "delaunay: {} profile, {} patches, {} edges, Lambda residual {:.3e}, xi jump {:.3e}: {} -> {}\n",
        to_string(profile.cls), sum.patches, sum.geometric_edges, sum.lambda_max_residual,
        sum.edge_max_xi_jump, ok ? "pass" : "fail", dir.string());
    return static_cast<int>(ok ? exit_pass : exit_check_failure);
  });
}

int cmd_report_merge(const std::vector<std::string>& inputs, const std::string& out_dir, std::ostream& log) {
  return guarded(log, "report-merge", [&] {
    if (inputs.empty()) throw ConfigError("report-merge needs at least one report");
    std::vector<std::pair<std::string, Json>> reports;
    for (const std::string& in : inputs) {
      std::ifstream f(in);
      if (!f) throw ConfigError("cannot read report " + in);
      Json j;
      try {
        j = Json::parse(f);
      } catch (const Json::parse_error& e) {
        throw ConfigError("report " + in + " is not JSON: " + e.what());
      }
      reports.emplace_back(in, std::move(j));
    }
    Json merged;
    try {
      merged = merge_reports(reports);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir);
    write_json_file((fs::path(out_dir) / "merged.json").string(), merged);
    const bool fail = merged["summary"]["verdict"] == "fail";
    log << fmt::format("report-merge: {} reports, {} checks, verdict {}\n", inputs.size(),
                       merged["checks"].size(), fail ? "fail" : "pass");
    return static_cast<int>(fail ? exit_check_failure : exit_pass);
  });
}

}  // namespace anisurf
