#include "anisurf/fields.hpp"

#include "anisurf/quadrature.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <random>

namespace anisurf {

std::vector<SamplePoint> quadrature_samples(const PiecewiseSurface& surf, int order) {
  std::vector<SamplePoint> out;
  for (std::size_t i = 0; i < surf.patches.size(); ++i) {
    const ParametricPatch& p = surf.patches[i];
    const GaussRule gs = gauss_legendre(order, p.s0, p.s1);
    const GaussRule gt = gauss_legendre(order, p.t0, p.t1);
    for (std::size_t a = 0; a < gs.nodes.size(); ++a) {
      for (std::size_t b = 0; b < gt.nodes.size(); ++b) {
        out.push_back({static_cast<int>(i), gs.nodes[a], gt.nodes[b], gs.weights[a] * gt.weights[b]});
      }
    }
  }
  return out;
}

std::vector<SamplePoint> interior_samples(const PiecewiseSurface& surf, int count,
                                          std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed);
  std::vector<double> cumulative;
  double total = 0.0;
  for (const ParametricPatch& p : surf.patches) {
    total += (p.s1 - p.s0) * (p.t1 - p.t0);
    cumulative.push_back(total);
  }
  // Draws are mapped through 53-bit integers so the stream is identical
  // across standard library implementations.
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<SamplePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double pick = uniform() * total;
    std::size_t i = 0;
    while (i + 1 < cumulative.size() && pick > cumulative[i]) ++i;
    const ParametricPatch& p = surf.patches[i];
    const double ms = margin * (p.s1 - p.s0);
    const double mt = margin * (p.t1 - p.t0);
    const double s = p.s0 + ms + uniform() * (p.s1 - p.s0 - 2.0 * ms);
    const double t = p.t0 + mt + uniform() * (p.t1 - p.t0 - 2.0 * mt);
    out.push_back({static_cast<int>(i), s, t, 1.0});
  }
  return out;
}

FieldSample field_at(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                     const SamplePoint& p, const FieldOptions& opt) {
  const ParametricPatch& patch = surf.patches.at(static_cast<std::size_t>(p.patch));
  const Chart& chart = *patch.chart;
  FieldSample f;
  f.at = p;
  f.lambda_alt = std::numeric_limits<double>::quiet_NaN();
  f.x = chart.position(p.s, p.t);
  const ChartFirst d1 = chart.first(p.s, p.t);
  f.xs = d1.xs;
  f.xt = d1.xt;
  const Vec3 c = d1.xs.cross(d1.xt);
  const double jac = c.norm();
  if (!(jac > 1e-10 * d1.xs.norm() * d1.xt.norm()) || !(jac > 0.0)) {
    f.flagged = true;
    f.note = "immersion failure";
    return f;
  }
  const ChartSecond d2 = chart.second(p.s, p.t);
  f.nu = patch.orientation * c / jac;
  Mat2 g, b;
  g << d1.xs.dot(d1.xs), d1.xs.dot(d1.xt), d1.xt.dot(d1.xs), d1.xt.dot(d1.xt);
  b << d2.xss.dot(f.nu), d2.xst.dot(f.nu), d2.xst.dot(f.nu), d2.xtt.dot(f.nu);
  const Mat2 ginv = g.inverse();
  const Mat2 m = -ginv * b;
  f.nu_s = m(0, 0) * d1.xs + m(1, 0) * d1.xt;
  f.nu_t = m(0, 1) * d1.xs + m(1, 1) * d1.xt;

  Vec3 e1 = d1.xs.normalized();
  Vec3 e2 = f.nu.cross(e1);
  if (opt.frame_rotation != 0.0) {
    const double cr = std::cos(opt.frame_rotation), sr = std::sin(opt.frame_rotation);
    const Vec3 r1 = cr * e1 + sr * e2;
    const Vec3 r2 = -sr * e1 + cr * e2;
    e1 = r1;
    e2 = r2;
  }
  f.e1 = e1;
  f.e2 = e2;
  Mat2 e;
  e << e1.dot(d1.xs), e1.dot(d1.xt), e2.dot(d1.xs), e2.dot(d1.xt);
  f.dnu = e * m * e.inverse();

  const ExtensionJet jet = gamma.extension(f.nu);
  f.gamma = jet.value;
  f.xi = jet.gradient;
  f.hessian = jet.hessian;
  f.a = a_matrix(jet, e1, e2);
  f.dxi = f.a * f.dnu;
  f.lambda = -f.dxi.trace();
  f.k_sigma = f.dnu.determinant();
  const double det_a = f.a.determinant();
  f.kw_singular = std::abs(det_a) < 1e-12;
  f.kw = f.kw_singular ? std::numeric_limits<double>::infinity() : 1.0 / det_a;
  f.det_dxi = f.dxi.determinant();
  f.q = f.x.dot(f.nu);
  f.area = p.weight * jac;

  if (opt.lambda_alt) {
    const double h = opt.lambda_alt_step;
    auto xi_at = [&](double s, double t) {
      return Vec3(gamma.extension(unit_normal(chart, s, t, patch.orientation)).gradient);
    };
    const Vec3 xi_s = (8.0 * (xi_at(p.s + h, p.t) - xi_at(p.s - h, p.t)) -
                       (xi_at(p.s + 2 * h, p.t) - xi_at(p.s - 2 * h, p.t))) / (12.0 * h);
    const Vec3 xi_t = (8.0 * (xi_at(p.s, p.t + h) - xi_at(p.s, p.t - h)) -
                       (xi_at(p.s, p.t + 2 * h) - xi_at(p.s, p.t - 2 * h))) / (12.0 * h);
    Mat2 xx;
    xx << d1.xs.dot(xi_s), d1.xs.dot(xi_t), d1.xt.dot(xi_s), d1.xt.dot(xi_t);
    f.lambda_alt = -(ginv.cwiseProduct(xx)).sum();
  }
  return f;
}

GeometryFields fields_at(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                         const std::vector<SamplePoint>& samples, const FieldOptions& opt) {
  GeometryFields gf;
  gf.samples.reserve(samples.size());
  for (const SamplePoint& p : samples) {
    FieldSample f = field_at(surf, gamma, p, opt);
    if (f.flagged) {
      ++gf.flagged;
      gf.warnings.push_back(
          fmt::format("patch {} ({:.6g}, {:.6g}): {}; excluded", p.patch, p.s, p.t, f.note));
    }
    gf.samples.push_back(std::move(f));
  }
  return gf;
}

namespace {

template <class F>
double integrate(const PiecewiseSurface& surf, int order, const F& integrand) {
  double total = 0.0;
  for (const SamplePoint& p : quadrature_samples(surf, order)) {
    const ParametricPatch& patch = surf.patches[static_cast<std::size_t>(p.patch)];
    const ChartFirst d = patch.chart->first(p.s, p.t);
    const Vec3 c = d.xs.cross(d.xt);
    const double jac = c.norm();
    if (!(jac > 0.0)) continue;
    const Vec3 nu = patch.orientation * c / jac;
    total += p.weight * jac * integrand(patch, p, nu);
  }
  return total;
}

}  // namespace

double energy(const PiecewiseSurface& surf, const AnisotropyFunction& gamma, int order) {
  return integrate(surf, order, [&](const ParametricPatch&, const SamplePoint&, const Vec3& nu) {
    return gamma(nu);
  });
}

double area(const PiecewiseSurface& surf, int order) {
  return integrate(surf, order,
                   [](const ParametricPatch&, const SamplePoint&, const Vec3&) { return 1.0; });
}

double volume(const PiecewiseSurface& surf, int order) {
  if (!surf.closed) throw DomainError("volume needs a closed surface");
  return integrate(surf, order,
                   [](const ParametricPatch& patch, const SamplePoint& p, const Vec3& nu) {
                     return patch.chart->position(p.s, p.t).dot(nu) / 3.0;
                   });
}

double surface_divergence(const ParametricPatch& patch, const TangentField& v, double s, double t,
                          double h) {
  const ChartFirst d = patch.chart->first(s, t);
  Mat2 g;
  g << d.xs.dot(d.xs), d.xs.dot(d.xt), d.xt.dot(d.xs), d.xt.dot(d.xt);
  const Mat2 ginv = g.inverse();
  const Vec3 vs = (v(s + h, t) - v(s - h, t)) / (2.0 * h);
  const Vec3 vt = (v(s, t + h) - v(s, t - h)) / (2.0 * h);
  return ginv(0, 0) * vs.dot(d.xs) + ginv(0, 1) * vs.dot(d.xt) + ginv(1, 0) * vt.dot(d.xs) +
         ginv(1, 1) * vt.dot(d.xt);
}

ScalarField gamma_of_normal(const ParametricPatch& patch, const AnisotropyFunction& gamma) {
  ScalarField f;
  const ChartPtr chart = patch.chart;
  const int orient = patch.orientation;
  f.value = [chart, orient, gamma](double s, double t) {
    return gamma(unit_normal(*chart, s, t, orient));
  };
  f.gradient = [chart, orient, gamma](double s, double t) {
    const NormalJet nj = normal_jet(*chart, s, t, orient);
    const Vec3 xi = gamma.extension(nj.nu).gradient;
    return Vec2(xi.dot(nj.nu_s), xi.dot(nj.nu_t));
  };
  return f;
}

double jacobi_apply(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                    const ScalarField& psi, const SamplePoint& p, const JacobiOptions& opt) {
  const ParametricPatch& patch = surf.patches.at(static_cast<std::size_t>(p.patch));
  constexpr double inner = 1e-3;
  const double margin = opt.step + (psi.gradient ? 0.0 : 2.0 * inner);
  if (!patch.inside(p.s, p.t, margin)) {
    throw DomainError(fmt::format(
        "Jacobi stencil leaves patch {} at ({}, {}); required margin {}", p.patch, p.s, p.t, margin));
  }
  auto param_grad = [&](double s, double t) -> Vec2 {
    if (psi.gradient) return psi.gradient(s, t);
    const double gs = (8.0 * (psi.value(s + inner, t) - psi.value(s - inner, t)) -
                       (psi.value(s + 2 * inner, t) - psi.value(s - 2 * inner, t))) / (12.0 * inner);
    const double gt = (8.0 * (psi.value(s, t + inner) - psi.value(s, t - inner)) -
                       (psi.value(s, t + 2 * inner) - psi.value(s, t - 2 * inner))) / (12.0 * inner);
    return {gs, gt};
  };
  const TangentField flux = [&](double s, double t) -> Vec3 {
    const ChartFirst d = patch.chart->first(s, t);
    Mat2 g;
    g << d.xs.dot(d.xs), d.xs.dot(d.xt), d.xt.dot(d.xs), d.xt.dot(d.xt);
    const Vec2 c = g.inverse() * param_grad(s, t);
    const Vec3 grad = c.x() * d.xs + c.y() * d.xt;
    const Vec3 nu = (patch.orientation * d.xs.cross(d.xt)).normalized();
    const Mat3 proj = Mat3::Identity() - nu * nu.transpose();
    return proj * (gamma.extension(nu).hessian * grad);
  };
  FieldOptions fo;
  fo.lambda_alt = false;
  const FieldSample f = field_at(surf, gamma, {p.patch, p.s, p.t, 1.0}, fo);
  const double pairing = (f.dxi.transpose() * f.dnu).trace();
  return surface_divergence(patch, flux, p.s, p.t, opt.step) + pairing * psi.value(p.s, p.t);
}

EquilibriumReport equilibrium_check(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                    const EquilibriumOptions& opt) {
  EquilibriumReport r;
  FieldOptions fo;
  fo.lambda_alt = false;
  const GeometryFields gf = fields_at(surf, gamma, quadrature_samples(surf, opt.order), fo);
  std::vector<double> face_area(surf.patches.size(), 0.0);
  std::vector<double> face_sum(surf.patches.size(), 0.0);
  double total_area = 0.0, total = 0.0;
  for (const FieldSample& f : gf.samples) {
    if (f.flagged) continue;
    const auto i = static_cast<std::size_t>(f.at.patch);
    face_area[i] += f.area;
    face_sum[i] += f.area * f.lambda;
    total_area += f.area;
    total += f.area * f.lambda;
  }
  r.lambda_mean = total / total_area;
  for (std::size_t i = 0; i < surf.patches.size(); ++i) {
    r.faces.push_back({surf.patches[i].name, face_sum[i] / face_area[i], 0.0});
  }
  for (const FieldSample& f : gf.samples) {
    if (f.flagged) continue;
    auto& face = r.faces[static_cast<std::size_t>(f.at.patch)];
    face.max_deviation = std::max(face.max_deviation, std::abs(f.lambda - face.mean));
    r.lambda_max_deviation = std::max(r.lambda_max_deviation, std::abs(f.lambda - r.lambda_mean));
  }
  r.lambda_constant =
      r.lambda_max_deviation <= opt.lambda_rel * std::abs(r.lambda_mean) + opt.lambda_abs;
  for (const Edge& e : surf.edges) {
    if (e.seam) continue;
    EdgeBalance eb;
    eb.name = e.name;
    for (int k = 0; k < opt.edge_samples; ++k) {
      const double lambda = (k + 0.5) / opt.edge_samples;
      const EdgePoint ep = surf.edge_point(e, lambda, gamma);
      const Vec3 jump = ep.xi_a - ep.xi_b;
      eb.max_xi_jump = std::max(eb.max_xi_jump, jump.norm());
      eb.max_force_jump = std::max(eb.max_force_jump, jump.cross(ep.tangent).norm());
    }
    r.edge_max_force_jump = std::max(r.edge_max_force_jump, eb.max_force_jump);
    r.edge_max_xi_jump = std::max(r.edge_max_xi_jump, eb.max_xi_jump);
    r.edges.push_back(eb);
  }
  r.edges_balanced = r.edge_max_force_jump <= opt.edge_tol;
  return r;
}

namespace {

Vec3 slerp(const Vec3& a, const Vec3& b, double mu) {
  const double w = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
  if (w < 1e-12) return ((1.0 - mu) * a + mu * b).normalized();
  return (std::sin((1.0 - mu) * w) * a + std::sin(mu * w) * b) / std::sin(w);
}

}  // namespace

DegreeResult degree_of_gauss_map(const PiecewiseSurface& surf, int order) {
  if (!surf.closed) throw DomainError("degree of the Gauss map needs a closed surface");
  FieldOptions fo;
  fo.lambda_alt = false;
  const AnisotropyFunction iso = AnisotropyFunction::isotropic();
  double faces = 0.0;
  for (const FieldSample& f :
       fields_at(surf, iso, quadrature_samples(surf, order), fo).samples) {
    if (!f.flagged) faces += f.k_sigma * f.area;
  }
  // Edge ribbons: N(lambda, mu) runs along the great circle from nu_a to nu_b.
  double edges = 0.0;
  const GaussRule gl = gauss_legendre(order, 0.0, 1.0);
  constexpr double h = 1e-5;
  for (const Edge& e : surf.edges) {
    if (e.seam) continue;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double lam = gl.nodes[i];
      const EdgePoint ep = surf.edge_point(e, lam, iso);
      const EdgePoint ep_p = surf.edge_point(e, std::min(lam + h, 1.0), iso);
      const EdgePoint ep_m = surf.edge_point(e, std::max(lam - h, 0.0), iso);
      const double dl = std::min(lam + h, 1.0) - std::max(lam - h, 0.0);
      const double sigma = ep.tangent.cross(ep.conormal_a).dot(ep.nu_a) > 0.0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
        const double mu = gl.nodes[j];
        const Vec3 n = slerp(ep.nu_a, ep.nu_b, mu);
        const Vec3 n_l = (slerp(ep_p.nu_a, ep_p.nu_b, mu) - slerp(ep_m.nu_a, ep_m.nu_b, mu)) / dl;
        const double dm = 1e-6;
        const Vec3 n_m = (slerp(ep.nu_a, ep.nu_b, std::min(mu + dm, 1.0)) -
                          slerp(ep.nu_a, ep.nu_b, std::max(mu - dm, 0.0))) /
                         (std::min(mu + dm, 1.0) - std::max(mu - dm, 0.0));
        edges += sigma * gl.weights[i] * gl.weights[j] * n.dot(n_l.cross(n_m));
      }
    }
  }
  DegreeResult d;
  d.face_part = faces / (4.0 * kPi);
  d.edge_part = edges / (4.0 * kPi);
  d.raw = d.face_part + d.edge_part;
  d.rounded = std::lround(d.raw);
  return d;
}

}  // namespace anisurf
