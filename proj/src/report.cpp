#include "anisurf/report.hpp"

#include "anisurf/fields.hpp"
#include "anisurf/identities.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

namespace anisurf {

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "not_applicable";
    case CheckStatus::error: return "error";
  }
  return "?";
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "closed_integrals",   "degree",
      "delta_lambda",       "div1",
      "div2",               "equilibrium",
      "expansion_fit",      "first_variation_dilation",
      "first_variation_translation", "frame_invariance",
      "isoperimetric",      "jacobi_gamma",
      "jacobi_gamma_general", "lambda_two_ways",
      "rep",                "rigidity_consistency",
      "second_variation",   "trace_discriminant"};
  return names;
}

bool VerificationReport::has_failures() const {
  return std::any_of(checks.begin(), checks.end(), [](const CheckRecord& c) {
    return c.status == CheckStatus::fail || c.status == CheckStatus::error;
  });
}

bool VerificationReport::passed() const { return !has_failures(); }

namespace {

Json opt_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json record_json(const CheckRecord& c) {
  Json j;
  j["name"] = c.name;
  j["identity"] = c.identity;
  j["status"] = to_string(c.status);
  j["max_pointwise_residual"] = opt_number(c.max_pointwise);
  j["integral_residual"] = opt_number(c.integral_residual);
  j["sample_count"] = c.sample_count;
  j["tolerance"] = c.tolerance;
  j["message"] = c.message;
  j["details"] = c.details;
  return j;
}

Json counts_json(const std::map<std::string, int>& counts, bool fail) {
  Json s;
  s["verdict"] = fail ? "fail" : "pass";
  for (const char* k : {"pass", "fail", "not_applicable", "error"}) {
    auto it = counts.find(k);
    s[k] = it == counts.end() ? 0 : it->second;
  }
  return s;
}

}  // namespace

Json VerificationReport::to_json() const {
  Json j;
  j["report"] = "verification";
  Json meta;
  meta["gamma"] = gamma;
  meta["gamma_family"] = gamma_family;
  meta["surface"] = surface;
  meta["quadrature"] = quadrature;
  meta["samples"] = samples;
  meta["seed"] = seed;
  meta["tolerance_scale"] = tolerance_scale;
  j["meta"] = meta;
  std::map<std::string, int> counts;
  for (const CheckRecord& c : checks) ++counts[to_string(c.status)];
  j["summary"] = counts_json(counts, has_failures());
  Json arr = Json::array();
  for (const CheckRecord& c : checks) arr.push_back(record_json(c));
  j["checks"] = arr;
  return j;
}

std::string VerificationReport::table() const {
  std::ostringstream os;
  auto num = [](const std::optional<double>& v) { return v ? fmt::format("{:.3e}", *v) : std::string("-"); };
  os << fmt::format("gamma    {}\nsurface  {}\nquadrature {}  samples {}  seed {}  tolerance scale {}\n\n",
                    gamma, surface, quadrature, samples, seed, tolerance_scale);
  os << fmt::format("{:<30} {:<15} {:>11} {:>11} {:>10} {:>7}\n", "check", "status", "pointwise",
                    "integral", "tolerance", "samples");
  for (const CheckRecord& c : checks) {
    os << fmt::format("{:<30} {:<15} {:>11} {:>11} {:>10.1e} {:>7}\n", c.name, to_string(c.status),
                      num(c.max_pointwise), num(c.integral_residual), c.tolerance, c.sample_count);
  }
  for (const CheckRecord& c : checks) {
    if (!c.message.empty()) os << fmt::format("\n{}: {}", c.name, c.message);
  }
  os << fmt::format("\n\nverdict: {}\n", has_failures() ? "fail" : "pass");
  return os.str();
}

std::string VerificationReport::residual_csv() const {
  std::ostringstream os;
  os << "check,patch,s,t,residual\r\n";
  for (const ResidualDump& d : dump) {
    os << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\r\n", d.check, d.patch, d.s, d.t, d.residual);
  }
  return os.str();
}

namespace {

void set_verdict(CheckRecord& r, bool ok) { r.status = ok ? CheckStatus::pass : CheckStatus::fail; }

void not_applicable(CheckRecord& r, const std::string& why) {
  r.status = CheckStatus::not_applicable;
  r.message = why;
}

void dump_residuals(VerificationReport& rep, const std::string& name, const PointwiseResiduals& pr) {
  for (std::size_t i = 0; i < pr.values.size(); ++i) {
    rep.dump.push_back({name, pr.at[i].patch, pr.at[i].s, pr.at[i].t, pr.values[i]});
  }
}

bool convex_everywhere(const std::vector<FieldSample>& fs) {
  for (const FieldSample& f : fs) {
    if (f.flagged) continue;
    if (!(f.a.determinant() > 1e-12 && f.a.trace() > 0.0)) return false;
  }
  return true;
}

}  // namespace

VerificationReport run_verification(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                    const VerifyOptions& opt) {
  VerificationReport rep;
  rep.gamma = gamma.describe();
  rep.gamma_family = to_string(gamma.kind().family);
  rep.surface = surf.name;
  rep.quadrature = opt.quadrature;
  rep.samples = opt.samples;
  rep.seed = opt.seed;
  rep.tolerance_scale = opt.tolerance_scale;

  const double ts = opt.tolerance_scale;
  const Tolerances& tol = opt.tol;
  const int order = opt.quadrature;
  auto selected = [&](const std::string& n) { return opt.checks.empty() || opt.checks.count(n) > 0; };

  // Shared state, computed lazily.
  const std::vector<SamplePoint> samples = interior_samples(surf, opt.samples, opt.seed);
  std::optional<GeometryFields> sample_fields;
  auto sfields = [&]() -> const GeometryFields& {
    if (!sample_fields) sample_fields = fields_at(surf, gamma, samples);
    return *sample_fields;
  };
  std::optional<GeometryFields> quad_fields;
  auto qfields = [&]() -> const GeometryFields& {
    if (!quad_fields) {
      FieldOptions fo;
      fo.lambda_alt = false;
      quad_fields = fields_at(surf, gamma, quadrature_samples(surf, order), fo);
    }
    return *quad_fields;
  };
  std::optional<double> energy_value;
  auto energy_f = [&]() {
    if (!energy_value) energy_value = energy(surf, gamma, order);
    return *energy_value;
  };
  std::optional<EquilibriumReport> eq_report;
  auto eq = [&]() -> const EquilibriumReport& {
    if (!eq_report) {
      EquilibriumOptions eo;
      eo.order = order;
      eo.lambda_rel *= ts;
      eo.lambda_abs *= ts;
      eo.edge_tol *= ts;
      eq_report = equilibrium_check(surf, gamma, eo);
    }
    return *eq_report;
  };
  std::optional<double> wulff_e;
  auto wulff_f = [&]() {
    if (!wulff_e) wulff_e = wulff_energy(gamma, 48);
    return *wulff_e;
  };
  std::optional<DegreeResult> degree_value;
  auto degree = [&]() -> const DegreeResult& {
    if (!degree_value) degree_value = degree_of_gauss_map(surf, order);
    return *degree_value;
  };
  std::optional<ClosedIntegrals> closed_value;
  auto closed_ints = [&]() -> const ClosedIntegrals& {
    if (!closed_value) closed_value = check_closed_integrals(surf, gamma, order);
    return *closed_value;
  };
  std::optional<JacobiGammaResult> jacobi_value;
  auto jacobi = [&]() -> const JacobiGammaResult& {
    if (!jacobi_value) {
      JacobiGammaOptions jo;
      jo.step = opt.stencil;
      jacobi_value = check_jacobi_gamma(surf, gamma, samples, jo);
    }
    return *jacobi_value;
  };

  using Runner = std::function<void(CheckRecord&)>;
  std::vector<std::pair<std::string, std::pair<std::string, Runner>>> table;
  auto add = [&](std::string name, std::string identity, Runner fn) {
    table.push_back({std::move(name), {std::move(identity), std::move(fn)}});
  };

  add("closed_integrals", "int 2 gamma + Lambda q = 0 and int 2 q K/K_W + Lambda gamma = 0 (closed, xi continuous)",
      [&](CheckRecord& r) {
        if (!surf.closed) return not_applicable(r, "surface is not closed");
        const ClosedIntegrals& c = closed_ints();
        const double f = energy_f();
        r.integral_residual = std::max(std::abs(c.i1), std::abs(c.i2)) / f;
        r.tolerance = tol.closed_integral * ts;
        r.sample_count = order * order * static_cast<int>(surf.patches.size());
        r.details["i1"] = c.i1;
        r.details["i2"] = c.i2;
        r.details["energy"] = f;
        r.details["max_xi_jump"] = c.max_xi_jump;
        r.details["hypothesis_xi_continuous"] = c.hypothesis_ok;
        if (!c.hypothesis_ok) return not_applicable(r, "hypothesis violated: xi jumps across an edge");
        set_verdict(r, *r.integral_residual <= r.tolerance);
      });

  add("degree", "(1/4 pi) int K dSigma over faces and edges, deg <= 1", [&](CheckRecord& r) {
    if (!surf.closed) return not_applicable(r, "surface is not closed");
    const DegreeResult& d = degree();
    r.integral_residual = std::abs(d.raw - static_cast<double>(d.rounded));
    r.tolerance = tol.degree * ts;
    r.details["raw"] = d.raw;
    r.details["rounded"] = d.rounded;
    r.details["face_part"] = d.face_part;
    r.details["edge_part"] = d.edge_part;
    bool ok = *r.integral_residual <= r.tolerance && d.rounded <= 1;
    if (surf.genus_hint) {
      r.details["genus_hint"] = *surf.genus_hint;
      ok = ok && d.rounded == 1 - *surf.genus_hint;
    }
    set_verdict(r, ok);
  });

  add("delta_lambda", "d/deps Lambda(X + eps xi) = L[gamma] + grad Lambda . D gamma", [&](CheckRecord& r) {
    const JacobiGammaResult& j = jacobi();
    r.max_pointwise = j.delta_lambda.max;
    r.sample_count = static_cast<int>(j.delta_lambda.values.size());
    r.tolerance = tol.pointwise * ts;
    r.details["excluded"] = j.delta_lambda.excluded;
    r.details["mean"] = j.delta_lambda.mean;
    dump_residuals(rep, r.name, j.delta_lambda);
    set_verdict(r, *r.max_pointwise <= r.tolerance);
  });

  for (DivIdentity which : {DivIdentity::div1, DivIdentity::div2}) {
    const std::string name = to_string(which);
    add(name,
        which == DivIdentity::div1 ? "div J(X x xi)^T = 2 gamma + Lambda q"
                                   : "div (dxi + Lambda I) J(X x xi)^T = 2 q K/K_W + Lambda gamma",
        [&, which, name](CheckRecord& r) {
          const DivResult d = check_div(surf, gamma, which, samples, opt.stencil, order);
          const double f = energy_f();
          r.max_pointwise = d.pointwise.max;
          r.integral_residual = d.max_face_flux_residual / std::max(f, d.scale);
          r.sample_count = static_cast<int>(d.pointwise.values.size());
          r.tolerance = tol.pointwise * ts;
          r.details["face_integral"] = d.face_integral;
          r.details["boundary_flux"] = d.boundary_flux;
          r.details["integral_tolerance"] = tol.integral * ts;
          r.details["excluded"] = d.pointwise.excluded;
          // Stencil decay on a few samples at coarse steps, above round-off.
          std::vector<SamplePoint> few(samples.begin(),
                                       samples.begin() + std::min<std::ptrdiff_t>(20, std::ssize(samples)));
          const double coarse = check_div(surf, gamma, which, few, 4e-3, 2).pointwise.max;
          const double fine = check_div(surf, gamma, which, few, 2e-3, 2).pointwise.max;
          r.details["stencil_residual_h4e-3"] = coarse;
          r.details["stencil_residual_h2e-3"] = fine;
          r.details["stencil_decay_ratio"] = fine > 0.0 ? coarse / fine : 0.0;
          dump_residuals(rep, name, d.pointwise);
          set_verdict(r, *r.max_pointwise <= r.tolerance && *r.integral_residual <= tol.integral * ts);
        });
  }

  add("equilibrium", "Lambda constant on all faces; (xi_1 - xi_2) x Gamma' = 0 on edges", [&](CheckRecord& r) {
    const EquilibriumReport& e = eq();
    r.max_pointwise = e.lambda_max_deviation;
    r.integral_residual = e.edge_max_force_jump;
    r.tolerance = EquilibriumOptions{}.lambda_rel * ts;
    r.sample_count = order * order * static_cast<int>(surf.patches.size());
    r.details["lambda_mean"] = e.lambda_mean;
    r.details["lambda_constant"] = e.lambda_constant;
    r.details["edges_balanced"] = e.edges_balanced;
    r.details["edge_max_xi_jump"] = e.edge_max_xi_jump;
    r.details["edge_tolerance"] = EquilibriumOptions{}.edge_tol * ts;
    Json faces = Json::array();
    for (const FaceLambda& f : e.faces) {
      Json fj;
      fj["name"] = f.name;
      fj["lambda_mean"] = f.mean;
      fj["max_deviation"] = f.max_deviation;
      faces.push_back(fj);
    }
    r.details["faces"] = faces;
    Json edges = Json::array();
    for (const EdgeBalance& b : e.edges) {
      Json ej;
      ej["name"] = b.name;
      ej["max_force_jump"] = b.max_force_jump;
      ej["max_xi_jump"] = b.max_xi_jump;
      edges.push_back(ej);
    }
    r.details["edges"] = edges;
    if (!e.pass()) r.message = e.lambda_constant ? "edge force balance fails" : "Lambda is not constant";
    set_verdict(r, e.pass());
  });

  add("expansion_fit",
      "V(X + eps xi) = sum v_k eps^k, F(X + eps xi) = sum f_k eps^k against integrated densities",
      [&](CheckRecord& r) {
        if (!surf.closed) return not_applicable(r, "surface is not closed");
        const ExpansionFit e = expansion_fit(surf, gamma, {-0.1, -0.05, -0.025, 0.0, 0.025, 0.05, 0.1}, order);
        double coeff = 0.0;
        for (int k = 0; k < 4; ++k) {
          coeff = std::max(coeff, std::abs(e.v[static_cast<std::size_t>(k)] - e.v_target[static_cast<std::size_t>(k)]) /
                                      std::abs(e.v[0]));
        }
        for (int k = 0; k < 3; ++k) {
          coeff = std::max(coeff, std::abs(e.f[static_cast<std::size_t>(k)] - e.f_target[static_cast<std::size_t>(k)]) /
                                      std::abs(e.f[0]));
        }
        r.integral_residual = coeff;
        r.tolerance = tol.expansion * ts;
        r.sample_count = static_cast<int>(e.grid.size());
        r.details["grid"] = e.grid;
        r.details["v"] = std::vector<double>(e.v.begin(), e.v.end());
        r.details["v_target"] = std::vector<double>(e.v_target.begin(), e.v_target.end());
        r.details["f"] = std::vector<double>(e.f.begin(), e.f.end());
        r.details["f_target"] = std::vector<double>(e.f_target.begin(), e.f_target.end());
        r.details["fit_residual_v"] = e.fit_residual_v;
        r.details["fit_residual_f"] = e.fit_residual_f;
        r.details["ratio_v1_v0"] = e.ratio1;
        r.details["ratio_v2_v0"] = e.ratio2;
        r.details["s1"] = e.s1;
        r.details["s2"] = e.s2;
        r.details["lambda_mean"] = e.lambda_mean;
        r.details["lambda_constant"] = e.lambda_constant;
        bool ok = coeff <= r.tolerance && e.fit_residual_v <= tol.expansion_fit * ts &&
                  e.fit_residual_f <= tol.expansion_fit * ts;
        if (e.lambda_constant) {
          const double l = e.lambda_mean;
          const double d1 = std::abs(e.ratio1 + 1.5 * l);
          const double d2 = std::abs(e.ratio2 - 0.75 * l * l);
          const double d3 = std::abs(e.normalized_second - e.normalized_second_target) / std::abs(e.f[0]);
          r.details["ratio_v1_target"] = -1.5 * l;
          r.details["ratio_v2_target"] = 0.75 * l * l;
          r.details["normalized_second"] = e.normalized_second;
          r.details["normalized_second_target"] = e.normalized_second_target;
          r.max_pointwise = std::max({d1, d2, d3});
          ok = ok && d1 <= r.tolerance && d2 <= r.tolerance && d3 <= r.tolerance;
        } else {
          r.details["ratios"] = "not_applicable: Lambda is not constant";
        }
        set_verdict(r, ok);
      });

  add("first_variation_dilation", "dF = -sum (int Lambda dX . nu - oint (xi x dX) . dX), dX = X",
      [&](CheckRecord& r) {
        const VariationField dil = [](const Chart& c, double s, double t) { return c.position(s, t); };
        const FirstVariation v = check_first_variation(surf, gamma, dil, 1e-5, order);
        const double f = energy_f();
        r.integral_residual = v.residual / std::max(std::abs(v.numeric), f);
        r.max_pointwise = std::abs(v.numeric - 2.0 * f) / f;
        r.tolerance = tol.first_variation * ts;
        r.details["numeric"] = v.numeric;
        r.details["formula"] = v.formula;
        r.details["interior"] = v.interior;
        r.details["boundary"] = v.boundary;
        r.details["homogeneity_2F"] = 2.0 * f;
        set_verdict(r, *r.integral_residual <= r.tolerance && *r.max_pointwise <= r.tolerance);
      });

  add("first_variation_translation", "dF = -sum (int Lambda dX . nu - oint (xi x dX) . dX), dX = const",
      [&](CheckRecord& r) {
        const Vec3 e = Vec3(0.3, -0.5, 0.8).normalized();
        const VariationField tr = [e](const Chart&, double, double) { return e; };
        const FirstVariation v = check_first_variation(surf, gamma, tr, 1e-5, order);
        const double f = energy_f();
        r.integral_residual = v.residual / f;
        r.tolerance = tol.first_variation * ts;
        r.details["direction"] = std::vector<double>{e.x(), e.y(), e.z()};
        r.details["numeric"] = v.numeric;
        r.details["formula"] = v.formula;
        r.details["interior"] = v.interior;
        r.details["boundary"] = v.boundary;
        bool ok = *r.integral_residual <= r.tolerance;
        if (surf.closed) {
          r.max_pointwise = std::abs(v.numeric) / f;
          ok = ok && *r.max_pointwise <= r.tolerance;
        }
        set_verdict(r, ok);
      });

  add("frame_invariance", "Lambda, det dxi unchanged by frame rotation; det dxi = K/K_W", [&](CheckRecord& r) {
    FieldOptions fo;
    fo.lambda_alt = false;
    fo.frame_rotation = 0.7;
    const GeometryFields rot = fields_at(surf, gamma, samples, fo);
    const GeometryFields& base = sfields();
    double worst = 0.0, kw_rel = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < base.samples.size(); ++i) {
      const FieldSample& a = base.samples[i];
      const FieldSample& b = rot.samples[i];
      if (a.flagged) continue;
      ++n;
      worst = std::max({worst, std::abs(a.lambda - b.lambda) / (1.0 + std::abs(a.lambda)),
                        std::abs(a.det_dxi - b.det_dxi) / (1.0 + std::abs(a.det_dxi)),
                        (a.dnu - a.dnu.transpose()).norm()});
      if (!a.kw_singular) {
        kw_rel = std::max(kw_rel, std::abs(a.det_dxi - a.k_sigma / a.kw) / std::max(1.0, std::abs(a.det_dxi)));
      }
    }
    r.max_pointwise = std::max(worst, kw_rel);
    r.sample_count = n;
    r.tolerance = 1e-8 * ts;
    r.details["rotation_residual"] = worst;
    r.details["det_dxi_vs_k_over_kw"] = kw_rel;
    set_verdict(r, *r.max_pointwise <= r.tolerance);
  });

  add("isoperimetric", "F^3 / (9 V^2) >= F[W]", [&](CheckRecord& r) {
    if (!surf.closed) return not_applicable(r, "surface is not closed");
    const Isoperimetric iso = isoperimetric_ratio(surf, gamma, wulff_f(), order);
    r.integral_residual = iso.gap / iso.wulff_energy;
    r.tolerance = tol.isoperimetric * ts;
    r.details["ratio"] = iso.ratio;
    r.details["wulff_energy"] = iso.wulff_energy;
    r.details["gap"] = iso.gap;
    r.details["energy"] = iso.energy;
    r.details["volume"] = iso.volume;
    set_verdict(r, *r.integral_residual >= -r.tolerance);
  });

  add("jacobi_gamma", "L[gamma] = Lambda^2 - 2 K/K_W (where grad Lambda . D gamma = 0)", [&](CheckRecord& r) {
    const JacobiGammaResult& j = jacobi();
    r.max_pointwise = j.lemma.max;
    r.sample_count = static_cast<int>(j.lemma.values.size());
    r.tolerance = tol.pointwise * ts;
    r.details["max_transport"] = j.max_transport;
    r.details["excluded"] = j.lemma.excluded;
    if (j.max_transport > r.tolerance) {
      return not_applicable(
          r, fmt::format("grad Lambda . D gamma reaches {:.3e}; the relation holds with that term "
                         "added (see jacobi_gamma_general)",
                         j.max_transport));
    }
    set_verdict(r, *r.max_pointwise <= r.tolerance);
  });

  add("jacobi_gamma_general", "L[gamma] + grad Lambda . D gamma = Lambda^2 - 2 K/K_W", [&](CheckRecord& r) {
    const JacobiGammaResult& j = jacobi();
    r.max_pointwise = j.general.max;
    r.sample_count = static_cast<int>(j.general.values.size());
    r.tolerance = tol.pointwise * ts;
    r.details["mean"] = j.general.mean;
    r.details["excluded"] = j.general.excluded;
    dump_residuals(rep, r.name, j.general);
    set_verdict(r, *r.max_pointwise <= r.tolerance);
  });

  add("lambda_two_ways", "-tr(A dnu) = -g^ij X_i . xi_j", [&](CheckRecord& r) {
    double worst = 0.0;
    int n = 0;
    for (const FieldSample& f : sfields().samples) {
      if (f.flagged) continue;
      ++n;
      worst = std::max(worst, std::abs(f.lambda - f.lambda_alt) / std::max(1.0, std::abs(f.lambda)));
    }
    r.max_pointwise = worst;
    r.sample_count = n;
    r.tolerance = tol.lambda_two_ways * ts;
    set_verdict(r, worst <= r.tolerance);
  });

  add("rep", "J dxi + dxi^T J = -Lambda J", [&](CheckRecord& r) {
    const PointwiseResiduals p = check_rep(surf, gamma, samples);
    r.max_pointwise = p.max;
    r.sample_count = static_cast<int>(p.values.size());
    r.tolerance = tol.rep * ts;
    dump_residuals(rep, r.name, p);
    set_verdict(r, p.max <= r.tolerance);
  });

  add("rigidity_consistency", "int gamma K/K_W dSigma = deg(xi) F[W]", [&](CheckRecord& r) {
    if (!surf.closed) return not_applicable(r, "surface is not closed");
    if (!closed_ints().hypothesis_ok) return not_applicable(r, "xi is not continuous across edges");
    if (!convex_everywhere(qfields().samples)) {
      return not_applicable(r, "surface normals reach directions where A is not positive definite");
    }
    const double image = gauss_image_energy(surf, gamma, order);
    const DegreeResult& d = degree();
    const double fw = wulff_f();
    r.integral_residual = std::abs(image - static_cast<double>(d.rounded) * fw) / fw;
    r.tolerance = tol.rigidity * ts;
    r.details["gauss_image_energy"] = image;
    r.details["degree"] = d.rounded;
    r.details["wulff_energy"] = fw;
    bool ok = *r.integral_residual <= r.tolerance;
    // Degree one and vanishing second variation force equality in the
    // isoperimetric ratio.
    if (d.rounded == 1 && eq().pass()) {
      const SecondVariation sv = second_variation(surf, gamma, order);
      const Isoperimetric iso = isoperimetric_ratio(surf, gamma, fw, order);
      const bool flat = std::abs(sv.delta2) <= tol.second_variation * ts * sv.energy;
      r.details["second_variation_vanishes"] = flat;
      r.details["isoperimetric_gap"] = iso.gap / fw;
      if (flat) ok = ok && std::abs(iso.gap) <= tol.isoperimetric * ts * fw;
    }
    set_verdict(r, ok);
  });

  add("second_variation", "d2F = int gamma (K/K_W - Lambda^2/4) <= 0, Lambda^2/4 - K/K_W >= 0",
      [&](CheckRecord& r) {
        if (!surf.closed) return not_applicable(r, "surface is not closed");
        if (!eq().pass()) return not_applicable(r, "surface is not in equilibrium");
        const SecondVariation sv = second_variation(surf, gamma, order);
        r.integral_residual = sv.delta2 / sv.energy;
        r.max_pointwise = std::max(0.0, -sv.pointwise_min);
        r.tolerance = tol.second_variation * ts;
        r.details["delta2"] = sv.delta2;
        r.details["pointwise_min"] = sv.pointwise_min;
        r.details["energy"] = sv.energy;
        set_verdict(r, sv.pointwise_min >= -tol.pointwise_sign * ts &&
                           *r.integral_residual <= r.tolerance);
      });

  add("trace_discriminant", "Lambda^2 - 4 det dxi >= 0", [&](CheckRecord& r) {
    double lowest = std::numeric_limits<double>::infinity();
    int n = 0;
    for (const FieldSample& f : sfields().samples) {
      if (f.flagged) continue;
      ++n;
      lowest = std::min(lowest, f.lambda * f.lambda - 4.0 * f.det_dxi);
    }
    r.max_pointwise = std::max(0.0, -lowest);
    r.sample_count = n;
    r.tolerance = tol.pointwise_sign * ts;
    r.details["min_discriminant"] = lowest;
    set_verdict(r, lowest >= -r.tolerance);
  });

  const int quad_points = order * order * static_cast<int>(surf.patches.size());
  std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [name, entry] : table) {
    if (!selected(name)) continue;
    CheckRecord r;
    r.name = name;
    r.identity = entry.first;
    try {
      entry.second(r);
    } catch (const std::exception& e) {
      r.status = CheckStatus::error;
      r.message = e.what();
    }
    if (r.sample_count == 0 && r.status != CheckStatus::not_applicable) r.sample_count = quad_points;
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

Json merge_reports(const std::vector<std::pair<std::string, Json>>& reports) {
  Json out;
  out["report"] = "merged";
  Json sources = Json::array();
  std::vector<std::pair<std::string, Json>> rows;
  for (const auto& [src, j] : reports) {
    Json s;
    s["source"] = src;
    s["meta"] = j.value("meta", Json::object());
    s["summary"] = j.value("summary", Json::object());
    sources.push_back(s);
    if (!j.contains("checks") || !j["checks"].is_array()) {
      throw DomainError("report " + src + " has no checks array");
    }
    for (const Json& c : j["checks"]) {
      Json row;
      row["source"] = src;
      for (auto it = c.begin(); it != c.end(); ++it) row[it.key()] = it.value();
      rows.emplace_back(c.value("name", std::string()), row);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second["source"].template get<std::string>() < b.second["source"].template get<std::string>();
  });
  std::map<std::string, int> counts;
  bool fail = false;
  Json checks = Json::array();
  for (const auto& [name, row] : rows) {
    const std::string st = row.value("status", std::string("error"));
    ++counts[st];
    fail = fail || st == "fail" || st == "error";
    checks.push_back(row);
  }
  out["sources"] = sources;
  out["summary"] = counts_json(counts, fail);
  out["checks"] = checks;
  return out;
}

}  // namespace anisurf
