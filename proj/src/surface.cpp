#include "anisurf/surface.hpp"

#include <fmt/format.h>

#include <cmath>

namespace anisurf {

std::string to_string(Side s) {
  switch (s) {
    case Side::s_lo: return "s_lo";
    case Side::s_hi: return "s_hi";
    case Side::t_lo: return "t_lo";
    case Side::t_hi: return "t_hi";
  }
  return "?";
}

Vec2 ParametricPatch::side_param(Side side, double lambda) const {
  switch (side) {
    case Side::s_lo: return {s0, t0 + lambda * (t1 - t0)};
    case Side::s_hi: return {s1, t0 + lambda * (t1 - t0)};
    case Side::t_lo: return {s0 + lambda * (s1 - s0), t0};
    case Side::t_hi: return {s0 + lambda * (s1 - s0), t1};
  }
  return {s0, t0};
}

int ParametricPatch::side_direction(Side side) const {
  const int ccw = (side == Side::t_lo || side == Side::s_hi) ? 1 : -1;
  return ccw * orientation;
}

bool ParametricPatch::inside(double s, double t, double margin) const {
  return s - margin >= s0 && s + margin <= s1 && t - margin >= t0 && t + margin <= t1;
}

Vec3 PiecewiseSurface::position(int patch, double s, double t) const {
  return patches.at(static_cast<std::size_t>(patch)).chart->position(s, t);
}

Vec3 PiecewiseSurface::normal(int patch, double s, double t) const {
  const ParametricPatch& p = patches.at(static_cast<std::size_t>(patch));
  return unit_normal(*p.chart, s, t, p.orientation);
}

namespace {

struct SideTrace {
  Vec3 x, tangent, nu, conormal;
};

SideTrace trace(const ParametricPatch& p, const BoundaryRef& r, double lambda) {
  const double l = r.reversed ? 1.0 - lambda : lambda;
  const Vec2 st = p.side_param(r.side, l);
  const ChartFirst d = p.chart->first(st.x(), st.y());
  const bool along_s = r.side == Side::t_lo || r.side == Side::t_hi;
  Vec3 tan = along_s ? Vec3(d.xs * (p.s1 - p.s0)) : Vec3(d.xt * (p.t1 - p.t0));
  if (r.reversed) tan = -tan;
  SideTrace tr;
  tr.x = p.chart->position(st.x(), st.y());
  tr.tangent = tan.normalized();
  const Vec3 c = d.xs.cross(d.xt);
  tr.nu = p.orientation * c.normalized();
  const int sigma = p.side_direction(r.side) * (r.reversed ? -1 : 1);
  tr.conormal = (sigma * tr.tangent).cross(tr.nu);
  return tr;
}

}  // namespace

EdgePoint PiecewiseSurface::edge_point(const Edge& e, double lambda,
                                       const AnisotropyFunction& gamma) const {
  const SideTrace a = trace(patches.at(static_cast<std::size_t>(e.a.patch)), e.a, lambda);
  const SideTrace b = trace(patches.at(static_cast<std::size_t>(e.b.patch)), e.b, lambda);
  EdgePoint ep;
  ep.point = a.x;
  ep.tangent = a.tangent;
  ep.nu_a = a.nu;
  ep.nu_b = b.nu;
  ep.xi_a = gamma.extension(a.nu).gradient;
  ep.xi_b = gamma.extension(b.nu).gradient;
  ep.conormal_a = a.conormal;
  ep.conormal_b = b.conormal;
  ep.gap = (a.x - b.x).norm();
  return ep;
}

std::size_t PiecewiseSurface::geometric_edge_count() const {
  std::size_t n = 0;
  for (const Edge& e : edges) n += e.seam ? 0 : 1;
  return n;
}

void PiecewiseSurface::validate() const {
  if (patches.empty()) throw ConstructionError("surface has no patches");
  const std::size_t np = patches.size();
  std::vector<std::array<int, 4>> uses(np, {0, 0, 0, 0});
  for (std::size_t i = 0; i < np; ++i) {
    const ParametricPatch& p = patches[i];
    if (!p.chart) throw ConstructionError(fmt::format("patch {} has no chart", i));
    if (!(p.s1 > p.s0 && p.t1 > p.t0)) {
      throw ConstructionError(fmt::format("patch {} has an empty parameter domain", i));
    }
    if (p.orientation != 1 && p.orientation != -1) {
      throw ConstructionError(fmt::format("patch {} orientation must be +1 or -1", i));
    }
    for (int a = 1; a < 8; ++a) {
      for (int b = 1; b < 8; ++b) {
        const double s = p.s0 + (p.s1 - p.s0) * a / 8.0;
        const double t = p.t0 + (p.t1 - p.t0) * b / 8.0;
        const ChartFirst d = p.chart->first(s, t);
        if (!(d.xs.cross(d.xt).norm() > 1e-10)) {
          throw ConstructionError(fmt::format("patch {} is not immersed at ({}, {})", i, s, t));
        }
      }
    }
    for (int k = 0; k < 4; ++k) {
      if (!p.collapsed[static_cast<std::size_t>(k)]) continue;
      const Vec2 a = p.side_param(static_cast<Side>(k), 0.0);
      double diam = 0.0;
      const Vec3 x0 = p.chart->position(a.x(), a.y());
      for (int j = 1; j <= 8; ++j) {
        const Vec2 b = p.side_param(static_cast<Side>(k), j / 8.0);
        diam = std::max(diam, (p.chart->position(b.x(), b.y()) - x0).norm());
      }
      if (diam > 1e-8) {
        throw ConstructionError(
            fmt::format("patch {} side {} is marked collapsed but has extent {}", i,
                        to_string(static_cast<Side>(k)), diam));
      }
    }
  }
  for (const Edge& e : edges) {
    for (const BoundaryRef* r : {&e.a, &e.b}) {
      if (r->patch < 0 || static_cast<std::size_t>(r->patch) >= np) {
        throw ConstructionError("edge references a missing patch");
      }
      ++uses[static_cast<std::size_t>(r->patch)][static_cast<std::size_t>(r->side)];
    }
    const ParametricPatch& pa = patches[static_cast<std::size_t>(e.a.patch)];
    const ParametricPatch& pb = patches[static_cast<std::size_t>(e.b.patch)];
    for (int j = 0; j <= 8; ++j) {
      const double lambda = (j + 0.5) / 9.0;
      const SideTrace a = trace(pa, e.a, lambda);
      const SideTrace b = trace(pb, e.b, lambda);
      if ((a.x - b.x).norm() > 1e-8 * (1.0 + a.x.norm())) {
        throw ConstructionError(fmt::format("edge {} sides do not coincide (gap {})", e.name,
                                            (a.x - b.x).norm()));
      }
      const int sa = pa.side_direction(e.a.side) * (e.a.reversed ? -1 : 1);
      const int sb = pb.side_direction(e.b.side) * (e.b.reversed ? -1 : 1);
      if (sa * a.tangent.dot(sb * b.tangent) > 0.0) {
        throw ConstructionError(
            fmt::format("edge {} is traversed in the same direction by both faces", e.name));
      }
    }
  }
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      const int u = uses[i][k];
      if (u > 1 || (patches[i].collapsed[k] && u > 0)) {
        throw ConstructionError(fmt::format("patch {} side {} is matched more than once", i,
                                            to_string(static_cast<Side>(k))));
      }
      if (closed && u == 0 && !patches[i].collapsed[k]) {
        throw ConstructionError(fmt::format("closed surface: patch {} side {} is unmatched", i,
                                            to_string(static_cast<Side>(k))));
      }
    }
  }
}

PiecewiseSurface scaled(const PiecewiseSurface& s, double factor) {
  PiecewiseSurface out = s;
  for (ParametricPatch& p : out.patches) p.chart = std::make_shared<ScaledChart>(p.chart, factor);
  out.name = fmt::format("{:.17g}*{}", factor, s.name);
  return out;
}

PiecewiseSurface make_spherical(ChartPtr chart, const std::string& name) {
  PiecewiseSurface surf;
  ParametricPatch p;
  p.chart = std::move(chart);
  p.s0 = 0.0;
  p.s1 = kPi;
  p.t0 = 0.0;
  p.t1 = 2.0 * kPi;
  p.collapsed[static_cast<std::size_t>(Side::s_lo)] = true;
  p.collapsed[static_cast<std::size_t>(Side::s_hi)] = true;
  p.name = "main";
  surf.patches.push_back(p);
  surf.edges.push_back({{0, Side::t_lo, false}, {0, Side::t_hi, false}, true, "seam"});
  surf.closed = true;
  surf.genus_hint = 0;
  surf.name = name;
  return surf;
}

PiecewiseSurface make_sphere(double radius, const Vec3& center) {
  if (!(radius > 0.0)) throw ConstructionError("sphere radius must be positive");
  return make_spherical(EllipsoidChart::sphere(radius, center),
                        fmt::format("sphere(r={:.17g})", radius));
}

PiecewiseSurface make_ellipsoid(const Vec3& a) {
  if (!(a.minCoeff() > 0.0)) throw ConstructionError("ellipsoid semi-axes must be positive");
  return make_spherical(EllipsoidChart::axes(a),
                        fmt::format("ellipsoid({:.17g},{:.17g},{:.17g})", a.x(), a.y(), a.z()));
}

PiecewiseSurface make_linear_ellipsoid(const Mat3& m, const std::string& name) {
  return make_spherical(std::make_shared<EllipsoidChart>(m), name);
}

PiecewiseSurface make_torus(double major, double minor) {
  PiecewiseSurface surf;
  ParametricPatch p;
  p.chart = std::make_shared<TorusChart>(major, minor);
  p.s0 = 0.0;
  p.s1 = 2.0 * kPi;
  p.t0 = 0.0;
  p.t1 = 2.0 * kPi;
  p.name = "main";
  surf.patches.push_back(p);
  surf.edges.push_back({{0, Side::t_lo, false}, {0, Side::t_hi, false}, true, "seam_s"});
  surf.edges.push_back({{0, Side::s_lo, false}, {0, Side::s_hi, false}, true, "seam_t"});
  surf.closed = true;
  surf.genus_hint = 1;
  surf.name = fmt::format("torus(R={:.17g},r={:.17g})", major, minor);
  return surf;
}

PiecewiseSurface product_wulff_surface(const PlanarSupport& profile, const PlanarSupport& cross,
                                       double scale) {
  const PlanarWulff cw = PlanarWulff::build(cross);
  const PlanarWulff pw = PlanarWulff::build(profile);
  std::vector<NormalArc> carcs = cw.smooth() ? std::vector<NormalArc>{{0.0, 2.0 * kPi}} : cw.arcs();
  std::vector<NormalArc> parcs = pw.arcs_within(-0.5 * kPi, 0.5 * kPi);
  if (parcs.empty() || std::abs(parcs.front().lo + 0.5 * kPi) > 1e-12 ||
      std::abs(parcs.back().hi - 0.5 * kPi) > 1e-12) {
    throw ConstructionError("product Wulff shape has a conical point on the axis");
  }
  const auto chart = std::make_shared<ProductWulffChart>(profile, cross, scale);
  PiecewiseSurface surf;
  const std::size_t nc = carcs.size();
  const std::size_t npf = parcs.size();
  auto index = [npf](std::size_t i, std::size_t j) { return static_cast<int>(i * npf + j); };
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < npf; ++j) {
      ParametricPatch p;
      p.chart = chart;
      p.s0 = carcs[i].lo;
      p.s1 = carcs[i].hi;
      p.t0 = parcs[j].lo;
      p.t1 = parcs[j].hi;
      p.collapsed[static_cast<std::size_t>(Side::t_lo)] = j == 0;
      p.collapsed[static_cast<std::size_t>(Side::t_hi)] = j + 1 == npf;
      p.name = fmt::format("c{}p{}", i, j);
      surf.patches.push_back(p);
    }
  }
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < npf; ++j) {
      const std::size_t inext = (i + 1) % nc;
      Edge e{{index(i, j), Side::s_hi, false}, {index(inext, j), Side::s_lo, false}, cw.smooth(),
             fmt::format("cross_corner{}_p{}", i, j)};
      if (cw.smooth()) e.name = fmt::format("seam_p{}", j);
      surf.edges.push_back(e);
      if (j + 1 < npf) {
        surf.edges.push_back({{index(i, j), Side::t_hi, false},
                              {index(i, j + 1), Side::t_lo, false}, false,
                              fmt::format("profile_corner{}_c{}", j, i)});
      }
    }
  }
  surf.closed = true;
  surf.genus_hint = 0;
  surf.name = fmt::format("product_wulff(scale={:.17g})", scale);
  return surf;
}

PiecewiseSurface wulff_surface(const AnisotropyFunction& gamma, double scale) {
  if (!(scale > 0.0)) throw ConstructionError("Wulff scale must be positive");
  const GammaKind& k = gamma.kind();
  PiecewiseSurface s;
  switch (k.family) {
    case GammaFamily::isotropic: s = make_sphere(scale); break;
    case GammaFamily::quadratic: {
      Eigen::SelfAdjointEigenSolver<Mat3> es(k.q);
      const Mat3 root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                        es.eigenvectors().transpose();
      s = make_linear_ellipsoid(scale * root, "");
      break;
    }
    case GammaFamily::lens:
    case GammaFamily::product: s = product_wulff_surface(*k.profile, *k.cross, scale); break;
    case GammaFamily::sampled:
      s = make_spherical(std::make_shared<WulffNormalChart>(gamma, scale), "");
      break;
  }
  s.name = fmt::format("{:.17g}*W[{}]", scale, gamma.describe());
  return s;
}

}  // namespace anisurf
