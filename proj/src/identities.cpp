#include "anisurf/identities.hpp"

#include "anisurf/quadrature.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace anisurf {

void PointwiseResiduals::add(const SamplePoint& p, double v) {
  at.push_back(p);
  values.push_back(v);
}

void PointwiseResiduals::finish() {
  max = 0.0;
  mean = 0.0;
  for (double v : values) {
    max = std::max(max, v);
    mean += v;
  }
  if (!values.empty()) mean /= static_cast<double>(values.size());
}

double rep_residual(const Mat2& dxi, double lambda) {
  const Mat2 j = rotation_j();
  return (j * dxi + dxi.transpose() * j + lambda * j).norm();
}

double rep_residual(const Mat2& a, const Mat2& dnu) {
  const Mat2 dxi = a * dnu;
  return rep_residual(dxi, -dxi.trace());
}

PointwiseResiduals check_rep(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                             const std::vector<SamplePoint>& samples) {
  PointwiseResiduals r;
  FieldOptions fo;
  fo.lambda_alt = false;
  for (const SamplePoint& p : samples) {
    const FieldSample f = field_at(surf, gamma, p, fo);
    if (f.flagged) {
      ++r.excluded;
      continue;
    }
    r.add(p, rep_residual(f.dxi, f.lambda));
  }
  r.finish();
  return r;
}

namespace {

PiecewiseSurface single_patch(const PiecewiseSurface& surf, int patch, ChartPtr chart) {
  PiecewiseSurface out;
  ParametricPatch p = surf.patches.at(static_cast<std::size_t>(patch));
  p.chart = std::move(chart);
  out.patches.push_back(p);
  out.name = surf.name;
  return out;
}

double lambda_at(const PiecewiseSurface& surf, const AnisotropyFunction& gamma, int patch, double s,
                 double t) {
  FieldOptions fo;
  fo.lambda_alt = false;
  return field_at(surf, gamma, {patch, s, t, 1.0}, fo).lambda;
}

PiecewiseSurface displaced(const PiecewiseSurface& surf, const AnisotropyFunction& gamma, double eps) {
  PiecewiseSurface out = surf;
  for (ParametricPatch& p : out.patches) {
    p.chart = std::make_shared<DisplacedChart>(p.chart, gamma, p.orientation, eps);
  }
  return out;
}

}  // namespace

JacobiGammaResult check_jacobi_gamma(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                     const std::vector<SamplePoint>& samples,
                                     const JacobiGammaOptions& opt) {
  JacobiGammaResult r;
  FieldOptions fo;
  fo.lambda_alt = false;
  JacobiOptions jo;
  jo.step = opt.step;
  const double h = opt.step;
  for (const SamplePoint& p : samples) {
    const FieldSample f = field_at(surf, gamma, p, fo);
    if (f.flagged || f.kw_singular) {
      ++r.lemma.excluded;
      ++r.general.excluded;
      ++r.delta_lambda.excluded;
      continue;
    }
    const ParametricPatch& patch = surf.patches[static_cast<std::size_t>(p.patch)];
    const double lg = jacobi_apply(surf, gamma, gamma_of_normal(patch, gamma), p, jo);
    const double target = f.lambda * f.lambda - 2.0 * f.det_dxi;

    const double ls = (lambda_at(surf, gamma, p.patch, p.s + h, p.t) -
                       lambda_at(surf, gamma, p.patch, p.s - h, p.t)) / (2.0 * h);
    const double lt = (lambda_at(surf, gamma, p.patch, p.s, p.t + h) -
                       lambda_at(surf, gamma, p.patch, p.s, p.t - h)) / (2.0 * h);
    Mat2 g;
    g << f.xs.dot(f.xs), f.xs.dot(f.xt), f.xt.dot(f.xs), f.xt.dot(f.xt);
    const Vec2 c = g.inverse() * Vec2(ls, lt);
    const Vec3 grad_lambda = c.x() * f.xs + c.y() * f.xt;
    const Vec3 dgamma = f.xi - f.gamma * f.nu;
    const double transport = grad_lambda.dot(dgamma);
    r.max_transport = std::max(r.max_transport, std::abs(transport));

    r.lemma.add(p, std::abs(lg - target));
    r.general.add(p, std::abs(lg + transport - target));

    if (opt.delta_lambda) {
      auto dl = [&](double e) {
        const auto plus = single_patch(
            surf, p.patch, std::make_shared<DisplacedChart>(patch.chart, gamma, patch.orientation, e));
        const auto minus = single_patch(
            surf, p.patch, std::make_shared<DisplacedChart>(patch.chart, gamma, patch.orientation, -e));
        return (lambda_at(plus, gamma, 0, p.s, p.t) - lambda_at(minus, gamma, 0, p.s, p.t)) / (2.0 * e);
      };
      const double d = (4.0 * dl(0.5 * opt.eps) - dl(opt.eps)) / 3.0;
      r.delta_lambda.add(p, std::abs(d - (lg + transport)));
    }
  }
  r.lemma.finish();
  r.general.finish();
  r.delta_lambda.finish();
  return r;
}

std::string to_string(DivIdentity d) { return d == DivIdentity::div1 ? "div1" : "div2"; }

Vec3 div_field(const ParametricPatch& patch, const AnisotropyFunction& gamma, DivIdentity which,
               double s, double t, double* rhs) {
  const Chart& chart = *patch.chart;
  const NormalJet nj = normal_jet(chart, s, t, patch.orientation);
  const ChartFirst d = chart.first(s, t);
  const Vec3 x = chart.position(s, t);
  const ExtensionJet jet = gamma.extension(nj.nu);
  const double q = x.dot(nj.nu);
  const Vec3 v1 = jet.value * x - q * jet.gradient;
  Mat2 g;
  g << d.xs.dot(d.xs), d.xs.dot(d.xt), d.xt.dot(d.xs), d.xt.dot(d.xt);
  const Mat2 ginv = g.inverse();
  const Vec3 hs = jet.hessian * nj.nu_s;
  const Vec3 ht = jet.hessian * nj.nu_t;
  Mat2 m;
  m << d.xs.dot(hs), d.xs.dot(ht), d.xt.dot(hs), d.xt.dot(ht);
  const Mat2 cm = ginv * m;  // dxi in the basis (X_s, X_t)
  const double lambda = -cm.trace();
  if (which == DivIdentity::div1) {
    if (rhs) *rhs = 2.0 * jet.value + lambda * q;
    return v1;
  }
  if (rhs) *rhs = 2.0 * q * cm.determinant() + lambda * jet.value;
  const Vec2 c = ginv * Vec2(d.xs.dot(v1), d.xt.dot(v1));
  return c.x() * hs + c.y() * ht + lambda * v1;
}

DivResult check_div(const PiecewiseSurface& surf, const AnisotropyFunction& gamma, DivIdentity which,
                    const std::vector<SamplePoint>& samples, double h, int order) {
  DivResult r;
  for (const SamplePoint& p : samples) {
    const ParametricPatch& patch = surf.patches.at(static_cast<std::size_t>(p.patch));
    if (!patch.inside(p.s, p.t, h)) {
      ++r.pointwise.excluded;
      continue;
    }
    double rhs = 0.0;
    div_field(patch, gamma, which, p.s, p.t, &rhs);
    const TangentField v = [&](double s, double t) { return div_field(patch, gamma, which, s, t); };
    r.pointwise.add(p, std::abs(surface_divergence(patch, v, p.s, p.t, h) - rhs));
  }
  r.pointwise.finish();

  const GaussRule side_rule = gauss_legendre(order, 0.0, 1.0);
  for (std::size_t i = 0; i < surf.patches.size(); ++i) {
    const ParametricPatch& patch = surf.patches[i];
    const TangentField v = [&](double s, double t) { return div_field(patch, gamma, which, s, t); };
    double inside = 0.0;
    const GaussRule gs = gauss_legendre(order, patch.s0, patch.s1);
    const GaussRule gt = gauss_legendre(order, patch.t0, patch.t1);
    for (std::size_t a = 0; a < gs.nodes.size(); ++a) {
      for (std::size_t b = 0; b < gt.nodes.size(); ++b) {
        const double s = gs.nodes[a], t = gt.nodes[b];
        const ChartFirst d = patch.chart->first(s, t);
        const double w = gs.weights[a] * gt.weights[b] * d.xs.cross(d.xt).norm();
        double rhs = 0.0;
        div_field(patch, gamma, which, s, t, &rhs);
        inside += w * surface_divergence(patch, v, s, t, h);
        r.scale += w * std::abs(rhs);
      }
    }
    double flux = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (patch.collapsed[static_cast<std::size_t>(k)]) continue;
      const Side side = static_cast<Side>(k);
      const bool along_s = side == Side::t_lo || side == Side::t_hi;
      for (std::size_t j = 0; j < side_rule.nodes.size(); ++j) {
        const Vec2 st = patch.side_param(side, side_rule.nodes[j]);
        const ChartFirst d = patch.chart->first(st.x(), st.y());
        const Vec3 tan = along_s ? Vec3(d.xs * (patch.s1 - patch.s0)) : Vec3(d.xt * (patch.t1 - patch.t0));
        const double len = tan.norm();
        if (!(len > 1e-14)) continue;
        const Vec3 nu = (patch.orientation * d.xs.cross(d.xt)).normalized();
        const Vec3 conormal = (patch.side_direction(side) * tan / len).cross(nu);
        flux += side_rule.weights[j] * len * v(st.x(), st.y()).dot(conormal);
      }
    }
    r.face_integral += inside;
    r.boundary_flux += flux;
    r.max_face_flux_residual = std::max(r.max_face_flux_residual, std::abs(inside - flux));
  }
  return r;
}

ClosedIntegrals check_closed_integrals(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                       int order) {
  if (!surf.closed) throw DomainError("closed-surface integrals need a closed surface");
  ClosedIntegrals c;
  FieldOptions fo;
  fo.lambda_alt = false;
  for (const FieldSample& f : fields_at(surf, gamma, quadrature_samples(surf, order), fo).samples) {
    if (f.flagged) continue;
    c.i1 += f.area * (2.0 * f.gamma + f.lambda * f.q);
    c.i2 += f.area * (2.0 * f.q * f.det_dxi + f.lambda * f.gamma);
    c.energy += f.area * f.gamma;
  }
  for (const Edge& e : surf.edges) {
    if (e.seam) continue;
    for (int k = 0; k < 64; ++k) {
      const EdgePoint ep = surf.edge_point(e, (k + 0.5) / 64.0, gamma);
      c.max_xi_jump = std::max(c.max_xi_jump, (ep.xi_a - ep.xi_b).norm());
    }
  }
  c.hypothesis_ok = c.max_xi_jump <= 1e-6;
  return c;
}

FirstVariation check_first_variation(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                     const VariationField& field, double eps, int order) {
  FirstVariation r;
  PiecewiseSurface plus = surf, minus = surf;
  for (std::size_t i = 0; i < surf.patches.size(); ++i) {
    plus.patches[i].chart = std::make_shared<PerturbedChart>(surf.patches[i].chart, field, eps);
    minus.patches[i].chart = std::make_shared<PerturbedChart>(surf.patches[i].chart, field, -eps);
  }
  r.numeric = (energy(plus, gamma, order) - energy(minus, gamma, order)) / (2.0 * eps);

  FieldOptions fo;
  fo.lambda_alt = false;
  for (const FieldSample& f : fields_at(surf, gamma, quadrature_samples(surf, order), fo).samples) {
    if (f.flagged) continue;
    const Chart& chart = *surf.patches[static_cast<std::size_t>(f.at.patch)].chart;
    r.interior += f.area * f.lambda * field(chart, f.at.s, f.at.t).dot(f.nu);
  }
  const GaussRule rule = gauss_legendre(order, 0.0, 1.0);
  for (const ParametricPatch& patch : surf.patches) {
    for (int k = 0; k < 4; ++k) {
      if (patch.collapsed[static_cast<std::size_t>(k)]) continue;
      const Side side = static_cast<Side>(k);
      const bool along_s = side == Side::t_lo || side == Side::t_hi;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const Vec2 st = patch.side_param(side, rule.nodes[j]);
        const ChartFirst d = patch.chart->first(st.x(), st.y());
        const Vec3 c = d.xs.cross(d.xt);
        if (!(c.norm() > 1e-14)) continue;
        const Vec3 nu = patch.orientation * c.normalized();
        const Vec3 xi = gamma.extension(nu).gradient;
        const Vec3 tan = along_s ? Vec3(d.xs * (patch.s1 - patch.s0)) : Vec3(d.xt * (patch.t1 - patch.t0));
        // Clockwise traversal: opposite to the positively oriented boundary.
        const Vec3 dx = -patch.side_direction(side) * tan;
        r.boundary += rule.weights[j] * xi.cross(dx).dot(field(*patch.chart, st.x(), st.y()));
      }
    }
  }
  r.formula = -(r.interior - r.boundary);
  r.residual = std::abs(r.numeric - r.formula);
  return r;
}

ExpansionFit expansion_fit(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                           const std::vector<double>& grid, int order) {
  if (!surf.closed) throw DomainError("expansion fit needs a closed surface");
  if (grid.size() < 4) throw DomainError("expansion fit needs at least four grid points");
  ExpansionFit e;
  e.grid = grid;
  for (double eps : grid) {
    const PiecewiseSurface d = displaced(surf, gamma, eps);
    e.volumes.push_back(volume(d, order));
    e.energies.push_back(energy(d, gamma, order));
  }
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd vv(m, 4), vf(m, 3);
  Eigen::VectorXd yv(m), yf(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = grid[static_cast<std::size_t>(i)];
    vv.row(i) << 1.0, x, x * x, x * x * x;
    vf.row(i) << 1.0, x, x * x;
    yv(i) = e.volumes[static_cast<std::size_t>(i)];
    yf(i) = e.energies[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd cv = vv.colPivHouseholderQr().solve(yv);
  const Eigen::VectorXd cf = vf.colPivHouseholderQr().solve(yf);
  for (int k = 0; k < 4; ++k) e.v[static_cast<std::size_t>(k)] = cv(k);
  for (int k = 0; k < 3; ++k) e.f[static_cast<std::size_t>(k)] = cf(k);
  e.fit_residual_v = (vv * cv - yv).cwiseAbs().maxCoeff() / std::abs(cv(0));
  e.fit_residual_f = (vf * cf - yf).cwiseAbs().maxCoeff() / std::abs(cf(0));

  FieldOptions fo;
  fo.lambda_alt = false;
  const GeometryFields gf = fields_at(surf, gamma, quadrature_samples(surf, order), fo);
  double area_total = 0.0, lambda_sum = 0.0;
  for (const FieldSample& f : gf.samples) {
    if (f.flagged) continue;
    e.v_target[0] += f.area * f.q / 3.0;
    e.v_target[1] += f.area * (f.gamma - f.lambda * f.q) / 3.0;
    e.v_target[2] += f.area * (f.q * f.det_dxi - f.lambda * f.gamma) / 3.0;
    e.v_target[3] += f.area * f.gamma * f.det_dxi / 3.0;
    e.f_target[0] += f.area * f.gamma;
    e.f_target[1] -= f.area * f.gamma * f.lambda;
    e.f_target[2] += f.area * f.gamma * f.det_dxi;
    e.normalized_second_target += f.area * f.gamma * (f.det_dxi - 0.25 * f.lambda * f.lambda);
    area_total += f.area;
    lambda_sum += f.area * f.lambda;
  }
  e.lambda_mean = lambda_sum / area_total;
  double dev = 0.0;
  for (const FieldSample& f : gf.samples) {
    if (!f.flagged) dev = std::max(dev, std::abs(f.lambda - e.lambda_mean));
  }
  e.lambda_constant = dev <= 1e-6 * std::abs(e.lambda_mean) + 1e-9;
  e.ratio1 = e.v[1] / e.v[0];
  e.ratio2 = e.v[2] / e.v[0];
  e.s1 = -e.ratio1 / 3.0;
  e.s2 = (2.0 / 9.0) * e.ratio1 * e.ratio1 - e.ratio2 / 3.0;
  e.normalized_second = e.f[2] + 2.0 * e.s1 * e.f[1] + (e.s1 * e.s1 + 2.0 * e.s2) * e.f[0];
  return e;
}

SecondVariation second_variation(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                 int order, const EquilibriumOptions& eq) {
  const EquilibriumReport rep = equilibrium_check(surf, gamma, eq);
  if (!rep.pass()) {
    throw DomainError(fmt::format(
        "second variation formula needs an equilibrium surface (Lambda deviation {}, edge force jump {})",
        rep.lambda_max_deviation, rep.edge_max_force_jump));
  }
  SecondVariation r;
  r.pointwise_min = std::numeric_limits<double>::infinity();
  FieldOptions fo;
  fo.lambda_alt = false;
  for (const FieldSample& f : fields_at(surf, gamma, quadrature_samples(surf, order), fo).samples) {
    if (f.flagged) continue;
    const double quarter = 0.25 * f.lambda * f.lambda - f.det_dxi;
    r.pointwise_min = std::min(r.pointwise_min, quarter);
    r.delta2 -= f.area * f.gamma * quarter;
    r.energy += f.area * f.gamma;
  }
  return r;
}

Isoperimetric isoperimetric_ratio(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                  double wulff_e, int order) {
  Isoperimetric r;
  r.volume = volume(surf, order);
  if (!(r.volume > 0.0)) throw DomainError("isoperimetric ratio needs positive enclosed volume");
  r.energy = energy(surf, gamma, order);
  r.ratio = r.energy * r.energy * r.energy / (9.0 * r.volume * r.volume);
  r.wulff_energy = wulff_e;
  r.gap = r.ratio - wulff_e;
  return r;
}

double wulff_energy(const AnisotropyFunction& gamma, int order) {
  return energy(wulff_surface(gamma, 1.0), gamma, order);
}

double gauss_image_energy(const PiecewiseSurface& surf, const AnisotropyFunction& gamma, int order) {
  FieldOptions fo;
  fo.lambda_alt = false;
  double total = 0.0;
  for (const FieldSample& f : fields_at(surf, gamma, quadrature_samples(surf, order), fo).samples) {
    if (!f.flagged) total += f.area * f.gamma * f.det_dxi;
  }
  return total;
}

}  // namespace anisurf
