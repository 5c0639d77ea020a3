#include "anisurf/delaunay.hpp"

#include "anisurf/fields.hpp"

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>

namespace anisurf {

namespace odeint = boost::numeric::odeint;

namespace {

using OdeState = std::array<double, 3>;

Vec2 unit2(double a) { return {std::cos(a), std::sin(a)}; }
Vec2 perp2(double a) { return {-std::sin(a), std::cos(a)}; }

/// u(theta) = first coordinate of the profile Wulff point at normal angle theta.
double profile_u(const PlanarSupport& p, double theta) {
  const SupportJet j = p.jet(theta);
  return j.h * std::cos(theta) - j.d1 * std::sin(theta);
}

struct MeridianRhs {
  const PlanarSupport* profile;
  double lambda;
  void operator()(const OdeState& y, OdeState& dy, double /*s*/) const {
    const SupportJet j = profile->jet(y[2]);
    const double u = j.h * std::cos(y[2]) - j.d1 * std::sin(y[2]);
    dy[0] = -std::sin(y[2]);
    dy[1] = std::cos(y[2]);
    dy[2] = (-lambda - u / y[0]) / j.rho();
  }
};

ProfileState advance(const PlanarSupport& profile, double lambda, ProfileState st, double from,
                     double to, double tol) {
  if (from == to) return st;
  OdeState y{st.x, st.z, st.theta};
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<OdeState>());
  const double dt = (to - from) / 4.0;
  odeint::integrate_adaptive(stepper, MeridianRhs{&profile, lambda}, y, from, to, dt);
  return {y[0], y[1], y[2]};
}

}  // namespace

// ---------------------------------------------------------------------------

ProductWulff ProductWulff::make(const PlanarSupport& profile, const PlanarSupport& cross) {
  if (!profile.even_in_first_axis()) {
    throw ConstructionError("product Wulff profile must be mirror symmetric about the axis");
  }
  PlanarWulff pw = PlanarWulff::build(profile);
  PlanarWulff cw = PlanarWulff::build(cross);
  if (!(PlanarConvexCurve(cw).enclosed_area() > 0.0)) {
    throw ConstructionError("cross-section curve encloses no area");
  }
  return ProductWulff{profile,
                      cross,
                      std::move(pw),
                      std::move(cw),
                      AnisotropyFunction::product(profile, cross),
                      product_wulff_surface(profile, cross, 1.0)};
}

double ProductWulff::support_excess(int normals, int grid) const {
  const std::vector<Vec3> ns = fibonacci_sphere(normals);
  std::vector<double> g(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) g[i] = gamma.eval(ns[i]);
  double worst = -std::numeric_limits<double>::infinity();
  for (const ParametricPatch& p : surface.patches) {
    for (int a = 0; a <= grid; ++a) {
      for (int b = 0; b <= grid; ++b) {
        const Vec3 chi = p.chart->position(p.s0 + (p.s1 - p.s0) * a / grid,
                                           p.t0 + (p.t1 - p.t0) * b / grid);
        for (std::size_t i = 0; i < ns.size(); ++i) worst = std::max(worst, chi.dot(ns[i]) - g[i]);
      }
    }
  }
  return worst;
}

std::string to_string(ProfileClass c) {
  switch (c) {
    case ProfileClass::wulff: return "wulff";
    case ProfileClass::cylinder: return "cylinder";
    case ProfileClass::catenoid: return "catenoid";
    case ProfileClass::unduloid: return "unduloid";
  }
  return "?";
}

ProfileClass profile_class_from_string(const std::string& s) {
  if (s == "wulff" || s == "sphere") return ProfileClass::wulff;
  if (s == "cylinder") return ProfileClass::cylinder;
  if (s == "catenoid") return ProfileClass::catenoid;
  if (s == "unduloid") return ProfileClass::unduloid;
  throw DomainError("unknown profile class '" + s + "'");
}

// ---------------------------------------------------------------------------

ProfilePiece::ProfilePiece(const PlanarSupport& profile, double lambda, double s0, double s1,
                           double s_ref, ProfileState ref, double tolerance)
    : profile_(profile), lambda_(lambda), s0_(s0), s1_(s1), tolerance_(tolerance) {
  if (!(s1 > s0)) throw NumericError("empty profile piece");
  const double len = s1 - s0;
  const int n = std::max(1, static_cast<int>(std::ceil(len / 0.01)));
  step_ = len / n;
  const ProfileState first = advance(profile_, lambda_, ref, s_ref, s0_ - step_, tolerance_);
  nodes_.push_back(first);
  for (int k = 1; k <= n + 2; ++k) {
    nodes_.push_back(advance(profile_, lambda_, nodes_.back(), s0_ + (k - 2) * step_,
                             s0_ + (k - 1) * step_, tolerance_));
  }
}

ProfileState ProfilePiece::state(double s) const {
  const double f = (s - (s0_ - step_)) / step_;
  const auto k = static_cast<std::size_t>(
      std::clamp(std::lround(f), 0L, static_cast<long>(nodes_.size()) - 1));
  return advance(profile_, lambda_, nodes_[k], s0_ + (static_cast<double>(k) - 1.0) * step_, s,
                 tolerance_);
}

double ProfilePiece::theta_rate(const ProfileState& st) const {
  const SupportJet j = profile_.jet(st.theta);
  return (-lambda_ - profile_u(profile_, st.theta) / st.x) / j.rho();
}

double ProfileCurve::s_begin() const {
  if (cls == ProfileClass::wulff) return -0.5 * kPi;
  return pieces.front().s0();
}

double ProfileCurve::s_end() const {
  if (cls == ProfileClass::wulff) return 0.5 * kPi;
  return pieces.back().s1();
}

ProfileState ProfileCurve::state(double s) const {
  if (cls == ProfileClass::wulff) {
    const Vec2 p = wulff_scale * profile.envelope_point(s);
    return {p.x(), p.y(), s};
  }
  for (const ProfilePiece& p : pieces) {
    if (s <= p.s1()) return p.state(s);
  }
  return pieces.back().state(s);
}

// ---------------------------------------------------------------------------

namespace {

struct Marcher {
  const PlanarSupport& profile;
  const std::vector<NormalArc>& arcs;  // attained normal arcs within [-pi/2, pi/2]
  double lambda;
  double tol;
  double step;
  double s_limit;  // max |s - s_start|

  struct Jump {
    double s;
    ProfileState before;
    ProfileState after;
  };

  int arc_of(double theta) const {
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (arcs[i].contains(theta, 1e-12)) return static_cast<int>(i);
    }
    return -1;
  }

  // Root of g along the solution in [a, b] (sign change assumed), from state at a.
  template <class G>
  std::pair<double, ProfileState> bisect(double a, ProfileState sa, double b, const G& g) const {
    const double ga = g(sa);
    double lo = a, hi = b;
    ProfileState slo = sa;
    for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * (1.0 + std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const ProfileState sm = advance(profile, lambda, slo, lo, mid, tol);
      if ((g(sm) > 0.0) == (ga > 0.0)) {
        lo = mid;
        slo = sm;
      } else {
        hi = mid;
      }
    }
    return {hi, advance(profile, lambda, slo, lo, hi, tol)};
  }

  /// March from (s, st) in direction dir until stop(state) changes sign.
  /// Normal-angle exits from the current arc become jumps to the adjacent arc.
  template <class Stop>
  std::pair<double, ProfileState> run(double s, ProfileState st, int dir, const Stop& stop,
                                      std::vector<Jump>& jumps) const {
    int arc = arc_of(st.theta);
    if (arc < 0) throw DomainError("profile start normal is not attained by the Wulff profile");
    const double s_start = s;
    const double stop0 = stop(st, s);
    while (std::abs(s - s_start) < s_limit) {
      const double s_next = s + dir * step;
      const ProfileState nx = advance(profile, lambda, st, s, s_next, tol);
      if (!(nx.x > 0.0) || !std::isfinite(nx.theta)) {
        throw DomainError(fmt::format("profile reaches the axis near s = {:.6g}", s_next));
      }
      const NormalArc& a = arcs[static_cast<std::size_t>(arc)];
      const bool below = nx.theta < a.lo;
      const bool above = nx.theta > a.hi;
      if (below || above) {
        const double bound = below ? a.lo : a.hi;
        auto g = [bound](const ProfileState& q) { return q.theta - bound; };
        auto [sj, sb] = bisect(s, st, s_next, g);
        const int next = below ? arc - 1 : arc + 1;
        if (next < 0 || next >= static_cast<int>(arcs.size())) {
          throw DomainError(fmt::format(
              "profile normal leaves the attained range [{:.6g}, {:.6g}] at s = {:.6g}",
              arcs.front().lo, arcs.back().hi, sj));
        }
        ProfileState sa = sb;
        sa.theta = below ? arcs[static_cast<std::size_t>(next)].hi
                         : arcs[static_cast<std::size_t>(next)].lo;
        jumps.push_back({sj, sb, sa});
        arc = next;
        s = sj;
        st = sa;
        continue;
      }
      const double sv = stop(nx, s_next);
      if ((sv > 0.0) != (stop0 > 0.0)) {
        auto g = [&](const ProfileState& q) { return stop(q, std::numeric_limits<double>::quiet_NaN()); };
        return bisect(s, st, s_next, g);
      }
      s = s_next;
      st = nx;
    }
    throw DomainError(fmt::format("profile did not reach its end within arclength {:.6g}", s_limit));
  }
};

void append_pieces(ProfileCurve& c, double s_lo, double s_hi, double s_ref, ProfileState ref,
                   std::vector<Marcher::Jump> jumps_fwd) {
  // Pieces between consecutive jumps; each piece is seeded with its own state.
  std::vector<std::pair<double, ProfileState>> starts{{s_ref, ref}};
  std::vector<double> cuts{s_lo};
  for (const auto& j : jumps_fwd) {
    cuts.push_back(j.s);
    starts.emplace_back(j.s, j.after);
  }
  cuts.push_back(s_hi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    c.pieces.emplace_back(c.profile, c.lambda, cuts[i], cuts[i + 1], starts[i].first, starts[i].second,
                          c.tolerance);
  }
}

}  // namespace

ProfileCurve solve_profile(const ProductWulff& w, const ProfileRequest& req) {
  ProfileCurve c;
  c.cls = req.cls;
  c.profile = w.profile;
  c.lambda = req.lambda;
  c.tolerance = req.tolerance;
  const std::vector<NormalArc> arcs = w.profile_wulff.arcs_within(-0.5 * kPi, 0.5 * kPi);
  const bool zero_attained = w.profile_wulff.attained(0.0, 0.0);
  const double h0 = w.profile(0.0);

  if (req.cls == ProfileClass::wulff) {
    if (!(req.lambda < 0.0)) throw DomainError("the Wulff class needs Lambda < 0");
    c.wulff_scale = -2.0 / req.lambda;
    c.flux = 0.0;  // the profile closes on the axis
    return c;
  }

  const double length_scale = std::max(req.neck, 1e-3);
  Marcher m{w.profile, arcs, req.lambda, req.tolerance, 0.01 * length_scale, 1e3 * length_scale};

  if (req.cls == ProfileClass::cylinder) {
    if (!(req.lambda < 0.0)) throw DomainError("a cylinder needs Lambda < 0");
    if (!zero_attained) throw DomainError("a cylinder needs the horizontal normal to be attained");
    const double r = h0 / -req.lambda;
    const ProfileState st{r, -req.z_extent, 0.0};
    c.pieces.emplace_back(c.profile, c.lambda, -req.z_extent, req.z_extent, -req.z_extent, st,
                          c.tolerance);
    c.flux = r * h0 + 0.5 * req.lambda * r * r;
    return c;
  }

  if (req.cls == ProfileClass::catenoid) {
    if (req.lambda != 0.0) throw DomainError("a catenoid has Lambda = 0");
    if (!(req.neck > 0.0)) throw DomainError("catenoid neck radius must be positive");
    if (!(req.z_extent > 0.0)) throw DomainError("catenoid half height must be positive");
    // Neck at z = 0; above it the normal angle is negative, below positive.
    ProfileState up{req.neck, 0.0, 0.0}, down{req.neck, 0.0, 0.0};
    if (!zero_attained) {
      auto gap_hi = std::find_if(arcs.begin(), arcs.end(), [](const NormalArc& a) { return a.lo > 0.0; });
      if (gap_hi == arcs.begin() || gap_hi == arcs.end()) {
        throw DomainError("catenoid neck normal: no attained arcs on both sides of the horizontal");
      }
      down.theta = gap_hi->lo;
      up.theta = std::prev(gap_hi)->hi;
    }
    c.flux = req.neck * profile_u(w.profile, up.theta);
    const double zt = req.z_extent;
    std::vector<Marcher::Jump> ju, jd;
    auto stop_up = [zt](const ProfileState& q, double) { return q.z - zt; };
    auto stop_down = [zt](const ProfileState& q, double) { return q.z + zt; };
    const double s_hi = m.run(0.0, up, +1, stop_up, ju).first;
    const double s_lo = m.run(0.0, down, -1, stop_down, jd).first;
    // Forward order: the downward jumps reversed, then the neck (when it is a
    // crease), then the upward jumps.
    std::vector<Marcher::Jump> all;
    ProfileState first_state = down;
    double first_s = 0.0;
    for (auto it = jd.rbegin(); it != jd.rend(); ++it) {
      all.push_back({it->s, it->after, it->before});
    }
    if (!jd.empty()) {
      first_s = jd.back().s;
      first_state = jd.back().after;
    }
    if (!zero_attained) all.push_back({0.0, down, up});
    else if (jd.empty()) first_state = up;
    for (const auto& j : ju) all.push_back(j);
    append_pieces(c, s_lo, s_hi, first_s, first_state, all);
    return c;
  }

  // Unduloid: neck at s = 0, z = 0, then two returns of the normal angle to 0.
  if (!(req.lambda < 0.0)) throw DomainError("an unduloid needs Lambda < 0");
  if (!zero_attained) throw DomainError("an unduloid neck needs the horizontal normal to be attained");
  const double x_cyl = h0 / -req.lambda;
  if (!(req.neck > 0.0 && req.neck < x_cyl)) {
    throw DomainError(fmt::format(
        "no unduloid with neck radius {:.17g}: the neck must lie in the open bracket (0, {:.17g}) "
        "between the axis and the cylinder radius u(0)/|Lambda|",
        req.neck, x_cyl));
  }
  if (req.periods < 1) throw DomainError("unduloid needs at least one period");
  const ProfileState neck{req.neck, 0.0, 0.0};
  c.flux = req.neck * h0 + 0.5 * req.lambda * req.neck * req.neck;
  std::vector<Marcher::Jump> j1, j2;
  // theta leaves 0 downward; the first sign change is the bulge.
  const ProfileState kick = advance(w.profile, req.lambda, neck, 0.0, 1e-6 * length_scale, req.tolerance);
  auto stop_theta = [](const ProfileState& q, double) { return q.theta; };
  auto [s_bulge, st_bulge] = m.run(1e-6 * length_scale, kick, +1, stop_theta, j1);
  const ProfileState kick2 =
      advance(w.profile, req.lambda, st_bulge, s_bulge, s_bulge + 1e-6 * length_scale, req.tolerance);
  auto [s_neck, st_neck] = m.run(s_bulge + 1e-6 * length_scale, kick2, +1, stop_theta, j2);
  if (!j1.empty() || !j2.empty()) {
    throw DomainError("unduloid profile crosses a profile corner; not supported");
  }
  c.period = s_neck;
  c.pitch = st_neck.z;
  c.pieces.emplace_back(c.profile, c.lambda, 0.0, req.periods * c.period, 0.0, neck, c.tolerance);
  return c;
}

// ---------------------------------------------------------------------------

DelaunayChart::DelaunayChart(std::shared_ptr<const ProfileCurve> profile, int piece,
                             PlanarSupport cross)
    : Chart(1e-3), profile_(std::move(profile)), piece_(piece), cross_(std::move(cross)) {}

Vec3 DelaunayChart::position(double s, double t) const {
  const ProfileState st = profile_->pieces[static_cast<std::size_t>(piece_)].state(t);
  const Vec2 w = cross_.envelope_point(s);
  return {st.x * w.x(), st.x * w.y(), st.z};
}

ChartFirst DelaunayChart::first(double s, double t) const {
  const ProfileState st = profile_->pieces[static_cast<std::size_t>(piece_)].state(t);
  const Vec2 w = cross_.envelope_point(s);
  const Vec2 dw = cross_.jet(s).rho() * perp2(s);
  const double xp = -std::sin(st.theta), zp = std::cos(st.theta);
  return {Vec3(st.x * dw.x(), st.x * dw.y(), 0.0), Vec3(xp * w.x(), xp * w.y(), zp)};
}

ChartSecond DelaunayChart::second(double s, double t) const {
  const ProfilePiece& piece = profile_->pieces[static_cast<std::size_t>(piece_)];
  const ProfileState st = piece.state(t);
  const double rate = piece.theta_rate(st);
  const SupportJet j = cross_.jet(s);
  const Vec2 w = cross_.envelope_point(s);
  const Vec2 dw = j.rho() * perp2(s);
  const Vec2 ddw = j.drho() * perp2(s) - j.rho() * unit2(s);
  const double xp = -std::sin(st.theta);
  const double xpp = -std::cos(st.theta) * rate, zpp = -std::sin(st.theta) * rate;
  ChartSecond d;
  d.xss = Vec3(st.x * ddw.x(), st.x * ddw.y(), 0.0);
  d.xst = Vec3(xp * dw.x(), xp * dw.y(), 0.0);
  d.xtt = Vec3(xpp * w.x(), xpp * w.y(), zpp);
  return d;
}

std::string DelaunayChart::describe() const {
  return fmt::format("delaunay[{} Lambda={:.17g} piece {}; cross {}]", to_string(profile_->cls),
                     profile_->lambda, piece_, cross_.describe());
}

PiecewiseSurface build_surface(const ProfileCurve& profile, const PlanarSupport& cross) {
  const PlanarWulff cw = PlanarWulff::build(cross);
  if (!(PlanarConvexCurve(cw).enclosed_area() > 0.0)) {
    throw ConstructionError("cross-section curve encloses no area");
  }
  if (profile.cls == ProfileClass::wulff) {
    PiecewiseSurface s = product_wulff_surface(profile.profile, cross, profile.wulff_scale);
    s.validate();
    return s;
  }
  const auto shared = std::make_shared<const ProfileCurve>(profile);
  const std::vector<NormalArc> carcs =
      cw.smooth() ? std::vector<NormalArc>{{0.0, 2.0 * kPi}} : cw.arcs();
  const std::size_t nc = carcs.size();
  const std::size_t np = profile.pieces.size();
  auto index = [np](std::size_t i, std::size_t j) { return static_cast<int>(i * np + j); };
  std::vector<ChartPtr> charts;
  for (std::size_t j = 0; j < np; ++j) {
    charts.push_back(std::make_shared<DelaunayChart>(shared, static_cast<int>(j), cross));
  }
  PiecewiseSurface surf;
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      ParametricPatch p;
      p.chart = charts[j];
      p.s0 = carcs[i].lo;
      p.s1 = carcs[i].hi;
      p.t0 = profile.pieces[j].s0();
      p.t1 = profile.pieces[j].s1();
      p.name = fmt::format("c{}p{}", i, j);
      surf.patches.push_back(p);
    }
  }
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      Edge e{{index(i, j), Side::s_hi, false}, {index((i + 1) % nc, j), Side::s_lo, false}, cw.smooth(),
             cw.smooth() ? fmt::format("seam_p{}", j) : fmt::format("cross_corner{}_p{}", i, j)};
      surf.edges.push_back(e);
      if (j + 1 < np) {
        surf.edges.push_back({{index(i, j), Side::t_hi, false}, {index(i, j + 1), Side::t_lo, false},
                              false, fmt::format("profile_crease{}_c{}", j, i)});
      }
    }
  }
  surf.closed = false;
  surf.genus_hint = 0;
  surf.name = fmt::format("{}(Lambda={:.17g})", to_string(profile.cls), profile.lambda);
  surf.validate();
  return surf;
}

Vec3 xi_by_tangency(const ProductWulff& w, const Vec3& nu) {
  const double r = std::hypot(nu.x(), nu.y());
  double phi = 0.0;
  double theta = nu.z() > 0.0 ? 0.5 * kPi : -0.5 * kPi;
  if (r > 1e-14) {
    phi = std::atan2(nu.y(), nu.x());
    if (!w.cross_wulff.attained(phi, 1e-9)) {
      throw DomainError(fmt::format("cross normal angle {:.17g} is not attained by W", phi));
    }
    theta = std::atan2(nu.z(), r * w.cross(phi));
  }
  if (!w.profile_wulff.attained(theta, 1e-9)) {
    throw DomainError(fmt::format("profile normal angle {:.17g} is not attained by W", theta));
  }
  const Vec2 uv = w.profile_wulff.point(theta);
  const Vec2 c = w.cross_wulff.point(phi);
  return {uv.x() * c.x(), uv.x() * c.y(), uv.y()};
}

IndependenceReport cross_section_independence(const ProfileCurve& profile, const PlanarSupport& cross_b,
                                              int s_samples, int phi_samples) {
  const PlanarSupport circle = PlanarSupport::circle();
  const PiecewiseSurface a = build_surface(profile, circle);
  const PiecewiseSurface b = build_surface(profile, cross_b);
  const AnisotropyFunction ga = AnisotropyFunction::product(profile.profile, circle);
  const AnisotropyFunction gb = AnisotropyFunction::product(profile.profile, cross_b);
  FieldOptions fo;
  fo.lambda_alt = false;
  IndependenceReport r;
  double suma = 0.0, sumb = 0.0;
  int na = 0;
  for (std::size_t pb = 0; pb < b.patches.size(); ++pb) {
    const ParametricPatch& q = b.patches[pb];
    for (int k = 0; k < s_samples; ++k) {
      const double t = q.t0 + (q.t1 - q.t0) * (k + 0.5) / s_samples;
      int pa = -1;
      for (std::size_t i = 0; i < a.patches.size(); ++i) {
        if (t >= a.patches[i].t0 && t <= a.patches[i].t1) {
          pa = static_cast<int>(i);
          break;
        }
      }
      if (pa < 0) throw NumericError("profile parameter outside the circular-cross surface");
      const double la = field_at(a, ga, {pa, 1.0, t, 1.0}, fo).lambda;
      for (int m = 0; m < phi_samples; ++m) {
        const double phi = q.s0 + (q.s1 - q.s0) * (m + 0.5) / phi_samples;
        const double lb = field_at(b, gb, {static_cast<int>(pb), phi, t, 1.0}, fo).lambda;
        r.max_discrepancy = std::max(r.max_discrepancy, std::abs(la - lb));
        suma += la;
        sumb += lb;
        ++na;
      }
    }
  }
  r.samples = na;
  r.lambda_a_mean = na ? suma / na : 0.0;
  r.lambda_b_mean = na ? sumb / na : 0.0;
  return r;
}

namespace {

bool constant_support(const PlanarSupport& p) {
  const double h0 = p(0.0);
  for (int k = 0; k < 64; ++k) {
    const SupportJet j = p.jet(kPi * k / 32.0);
    if (std::abs(j.h - h0) > 1e-15 * h0 || std::abs(j.d1) > 1e-15 * h0) return false;
  }
  return true;
}

}  // namespace

DelaunaySummary summarize_delaunay(const ProductWulff& w, const ProfileCurve& profile,
                                   const PiecewiseSurface& surf, int samples, unsigned long long seed) {
  DelaunaySummary d;
  d.lambda_target = profile.lambda;
  d.patches = static_cast<int>(surf.patches.size());
  d.geometric_edges = static_cast<int>(surf.geometric_edge_count());
  FieldOptions fo;
  fo.lambda_alt = false;
  for (const FieldSample& f : fields_at(surf, w.gamma, interior_samples(surf, samples, seed), fo).samples) {
    if (f.flagged) continue;
    d.lambda_max_residual = std::max(d.lambda_max_residual, std::abs(f.lambda - profile.lambda));
    d.tangency_max_residual =
        std::max(d.tangency_max_residual, (xi_by_tangency(w, f.nu) - f.xi).norm());
  }
  EquilibriumOptions eo;
  const EquilibriumReport eq = equilibrium_check(surf, w.gamma, eo);
  d.edge_max_xi_jump = eq.edge_max_xi_jump;
  d.edge_max_force_jump = eq.edge_max_force_jump;

  if (profile.cls != ProfileClass::wulff) {
    const int rows = 400;
    const double a = profile.s_begin(), b = profile.s_end();
    const bool isotropic = constant_support(profile.profile);
    double c = 0.0;
    if (isotropic && profile.cls == ProfileClass::catenoid) {
      c = profile.flux / profile.profile(0.0);
      d.catenoid_oracle = 0.0;
    }
    for (int k = 0; k <= rows; ++k) {
      const double s = a + (b - a) * k / rows;
      const ProfileState st = profile.state(s);
      const double q = st.x * profile_u(profile.profile, st.theta) + 0.5 * profile.lambda * st.x * st.x;
      d.flux_drift = std::max(d.flux_drift, std::abs(q - profile.flux));
      if (d.catenoid_oracle >= 0.0) {
        d.catenoid_oracle = std::max(d.catenoid_oracle, std::abs(st.x - c * std::cosh(st.z / c)));
      }
    }
    if (profile.cls == ProfileClass::unduloid) {
      d.periodicity = 0.0;
      const double span = b - a - profile.period;
      for (int k = 0; k <= 64; ++k) {
        const double s = a + span * k / 64.0;
        // Independent continuation by one period from the state at s.
        const ProfileState s0 = profile.state(s);
        const ProfileState s1 =
            advance(profile.profile, profile.lambda, s0, s, s + profile.period, profile.tolerance);
        d.periodicity = std::max({d.periodicity, std::abs(s1.x - s0.x),
                                  std::abs(s1.z - s0.z - profile.pitch)});
      }
    }
  }
  d.independence = cross_section_independence(profile, w.cross);
  return d;
}

Json delaunay_summary_json(const DelaunaySummary& s, const ProfileCurve& profile) {
  Json j;
  j["class"] = to_string(profile.cls);
  j["lambda_target"] = s.lambda_target;
  j["flux"] = profile.flux;
  if (profile.cls == ProfileClass::unduloid) {
    j["period"] = profile.period;
    j["pitch"] = profile.pitch;
    j["periodicity_residual"] = s.periodicity;
  }
  if (profile.cls == ProfileClass::wulff) j["wulff_scale"] = profile.wulff_scale;
  j["arclength"] = Json::array({profile.s_begin(), profile.s_end()});
  j["pieces"] = profile.cls == ProfileClass::wulff ? 0 : static_cast<int>(profile.pieces.size());
  j["patches"] = s.patches;
  j["geometric_edges"] = s.geometric_edges;
  j["lambda_max_residual"] = s.lambda_max_residual;
  j["edge_max_xi_jump"] = s.edge_max_xi_jump;
  j["edge_max_force_jump"] = s.edge_max_force_jump;
  j["tangency_max_residual"] = s.tangency_max_residual;
  j["flux_drift"] = s.flux_drift;
  if (s.catenoid_oracle >= 0.0) j["catenoid_oracle_residual"] = s.catenoid_oracle;
  Json ind;
  ind["samples"] = s.independence.samples;
  ind["max_discrepancy"] = s.independence.max_discrepancy;
  ind["lambda_circle_mean"] = s.independence.lambda_a_mean;
  ind["lambda_cross_mean"] = s.independence.lambda_b_mean;
  j["cross_section_independence"] = ind;
  return j;
}

std::string profile_csv(const ProfileCurve& profile, const PiecewiseSurface& surf,
                        const AnisotropyFunction& gamma, int rows) {
  std::ostringstream os;
  os << "s,x,z,lambda\r\n";
  FieldOptions fo;
  fo.lambda_alt = false;
  const std::size_t nc = profile.cls == ProfileClass::wulff ? 0 : profile.pieces.size();
  for (std::size_t pi = 0; pi < surf.patches.size(); ++pi) {
    const ParametricPatch& p = surf.patches[pi];
    // Patches of the first cross arc only.
    if (nc > 0 && pi >= nc) break;
    if (nc == 0 && std::abs(p.s0 - surf.patches.front().s0) > 0.0) break;
    const int n = std::max(2, rows / static_cast<int>(nc ? nc : surf.patches.size()));
    const double phi = 0.5 * (p.s0 + p.s1);
    for (int k = 0; k < n; ++k) {
      const double t = p.t0 + (p.t1 - p.t0) * (k + 0.5) / n;
      const ProfileState st = profile.state(t);
      const double lam = field_at(surf, gamma, {static_cast<int>(pi), phi, t, 1.0}, fo).lambda;
      os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\r\n", t, st.x, st.z, lam);
    }
  }
  return os.str();
}

TriangleMesh surface_mesh(const PiecewiseSurface& surf, int n) {
  TriangleMesh m;
  for (const ParametricPatch& p : surf.patches) {
    const int base = static_cast<int>(m.vertices.size());
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        m.vertices.push_back(
            p.chart->position(p.s0 + (p.s1 - p.s0) * a / n, p.t0 + (p.t1 - p.t0) * b / n));
      }
    }
    auto id = [&](int a, int b) { return base + a * (n + 1) + b; };
    auto add = [&](int i, int j, int k) {
      const Vec3 c = (m.vertices[static_cast<std::size_t>(j)] - m.vertices[static_cast<std::size_t>(i)])
                         .cross(m.vertices[static_cast<std::size_t>(k)] -
                                m.vertices[static_cast<std::size_t>(i)]);
      if (c.norm() < 1e-14) return;
      if (p.orientation > 0) m.triangles.push_back({i, j, k});
      else m.triangles.push_back({i, k, j});
    };
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        add(id(a, b), id(a + 1, b), id(a + 1, b + 1));
        add(id(a, b), id(a + 1, b + 1), id(a, b + 1));
      }
    }
  }
  return m;
}

Json edge_polylines(const PiecewiseSurface& surf, int points) {
  Json arr = Json::array();
  for (const Edge& e : surf.edges) {
    if (e.seam) continue;
    Json pts = Json::array();
    const ParametricPatch& p = surf.patches[static_cast<std::size_t>(e.a.patch)];
    for (int k = 0; k <= points; ++k) {
      const Vec2 st = p.side_param(e.a.side, static_cast<double>(k) / points);
      const Vec3 x = p.chart->position(st.x(), st.y());
      pts.push_back(Json::array({x.x(), x.y(), x.z()}));
    }
    Json j;
    j["name"] = e.name;
    j["points"] = pts;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace anisurf
