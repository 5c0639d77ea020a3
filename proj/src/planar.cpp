#include "anisurf/planar.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace anisurf {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }
Vec2 perp(double theta) { return {-std::sin(theta), std::cos(theta)}; }

SupportJet fourier_jet(const PlanarSupport::Fourier& f, double theta) {
  SupportJet j;
  j.h = f.c0;
  const std::size_t kmax = std::max(f.cos_coeffs.size(), f.sin_coeffs.size());
  for (std::size_t i = 0; i < kmax; ++i) {
    const double k = static_cast<double>(i + 1);
    const double a = i < f.cos_coeffs.size() ? f.cos_coeffs[i] : 0.0;
    const double b = i < f.sin_coeffs.size() ? f.sin_coeffs[i] : 0.0;
    const double c = std::cos(k * theta);
    const double s = std::sin(k * theta);
    j.h += a * c + b * s;
    j.d1 += k * (-a * s + b * c);
    j.d2 += -k * k * (a * c + b * s);
    j.d3 += k * k * k * (a * s - b * c);
  }
  return j;
}

SupportJet ellipse_jet(const PlanarSupport::Ellipse& e, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double diff = e.b * e.b - e.a * e.a;
  const double g = e.a * e.a * c * c + e.b * e.b * s * s;
  const double g1 = diff * std::sin(2.0 * theta);
  const double g2 = 2.0 * diff * std::cos(2.0 * theta);
  const double g3 = -4.0 * diff * std::sin(2.0 * theta);
  SupportJet j;
  j.h = std::sqrt(g);
  j.d1 = g1 / (2.0 * j.h);
  j.d2 = (g2 - 2.0 * j.d1 * j.d1) / (2.0 * j.h);
  j.d3 = (g3 - 6.0 * j.d1 * j.d2) / (2.0 * j.h);
  return j;
}

double wrap(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

}  // namespace

PlanarSupport PlanarSupport::circle(double radius) {
  if (!(radius > 0.0)) throw ConstructionError("circle support needs a positive radius");
  return PlanarSupport(Fourier{radius, {}, {}});
}

PlanarSupport PlanarSupport::ellipse(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw ConstructionError("ellipse support needs positive semi-axes");
  return PlanarSupport(Ellipse{a, b});
}

PlanarSupport PlanarSupport::lens(double beta) {
  // 1 + beta cos^2 = (1 + beta/2) + (beta/2) cos 2 theta
  if (!(beta > -1.0)) throw ConstructionError("lens support needs beta > -1");
  return PlanarSupport(Fourier{1.0 + 0.5 * beta, {0.0, 0.5 * beta}, {}});
}

PlanarSupport PlanarSupport::trig(int m, double b) {
  if (m < 1) throw ConstructionError("trig support needs m >= 1");
  if (!(std::abs(b) < 1.0)) throw ConstructionError("trig support needs |b| < 1");
  std::vector<double> a(static_cast<std::size_t>(m), 0.0);
  a.back() = b;
  return PlanarSupport(Fourier{1.0, std::move(a), {}});
}

PlanarSupport PlanarSupport::fourier(double c0, std::vector<double> cos_coeffs,
                                     std::vector<double> sin_coeffs) {
  PlanarSupport s(Fourier{c0, std::move(cos_coeffs), std::move(sin_coeffs)});
  for (int i = 0; i < 720; ++i) {
    if (!(s(kTwoPi * i / 720.0) > 0.0)) {
      throw ConstructionError("fourier support function must be positive");
    }
  }
  return s;
}

SupportJet PlanarSupport::jet(double theta) const {
  return std::visit(
      [theta](const auto& rep) -> SupportJet {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, Fourier>) {
          return fourier_jet(rep, theta);
        } else {
          return ellipse_jet(rep, theta);
        }
      },
      rep_);
}

PlanarExtension PlanarSupport::extension(const Vec2& y) const {
  const double r = y.norm();
  if (!(r > 0.0)) throw DomainError("planar support extension undefined at the origin");
  const double theta = std::atan2(y.y(), y.x());
  const SupportJet j = jet(theta);
  const Vec2 t = perp(theta);
  PlanarExtension e;
  e.value = r * j.h;
  e.gradient = j.h * unit(theta) + j.d1 * t;
  e.hessian = (j.rho() / r) * t * t.transpose();
  return e;
}

Vec2 PlanarSupport::envelope_point(double theta) const {
  const SupportJet j = jet(theta);
  return j.h * unit(theta) + j.d1 * perp(theta);
}

bool PlanarSupport::even_in_first_axis() const {
  for (int i = 0; i < 64; ++i) {
    const double t = 0.1 + kTwoPi * i / 64.0;
    if (std::abs((*this)(kPi - t) - (*this)(t)) > 1e-12) return false;
  }
  return true;
}

bool PlanarSupport::even_in_second_axis() const {
  for (int i = 0; i < 64; ++i) {
    const double t = 0.1 + kTwoPi * i / 64.0;
    if (std::abs((*this)(-t) - (*this)(t)) > 1e-12) return false;
  }
  return true;
}

std::string PlanarSupport::describe() const {
  return std::visit(
      [](const auto& rep) -> std::string {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, Fourier>) {
          std::string out = fmt::format("fourier({:.17g}", rep.c0);
          for (double a : rep.cos_coeffs) out += fmt::format(",{:.17g}", a);
          out += ";";
          for (std::size_t i = 0; i < rep.sin_coeffs.size(); ++i) {
            out += fmt::format("{}{:.17g}", i == 0 ? "" : ",", rep.sin_coeffs[i]);
          }
          return out + ")";
        } else {
          return fmt::format("ellipse({:.17g},{:.17g})", rep.a, rep.b);
        }
      },
      rep_);
}

// ---------------------------------------------------------------------------

PlanarWulff PlanarWulff::build(const PlanarSupport& support, int grid) {
  if (grid < 64) throw ConstructionError("planar Wulff scan needs at least 64 samples");
  const auto n = static_cast<std::size_t>(grid);
  std::vector<double> theta(n);
  std::vector<Vec2> pts(n);
  std::vector<double> h(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    h[i] = support(theta[i]);
    if (!(h[i] > 0.0)) throw ConstructionError("support function must be positive");
    pts[i] = support.envelope_point(theta[i]);
    scale = std::max(scale, h[i]);
  }

  // A sample is attained when its envelope point satisfies every sampled
  // half-plane constraint and the envelope is locally convex there.
  std::vector<char> ok(n, 1);
  const double tol = 1e-12 * scale;
  for (std::size_t i = 0; i < n; ++i) {
    if (support.jet(theta[i]).rho() < 0.0) {
      ok[i] = 0;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (pts[i].dot(unit(theta[j])) > h[j] + tol) {
        ok[i] = 0;
        break;
      }
    }
  }

  if (std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; })) {
    return PlanarWulff(support, {NormalArc{0.0, kTwoPi}}, {});
  }
  if (std::none_of(ok.begin(), ok.end(), [](char c) { return c != 0; })) {
    throw ConstructionError("planar Wulff scan found no attained normals");
  }

  // Gaps (a run of unattained samples between attained ones), as pairs of
  // the last attained index before and first attained index after.
  std::vector<std::pair<std::size_t, std::size_t>> gaps;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t next = (i + 1) % n;
    if (ok[i] && !ok[next]) {
      std::size_t j = next;
      while (!ok[j]) j = (j + 1) % n;
      gaps.emplace_back(i, j);
    }
  }

  std::vector<PlanarCorner> corners;
  for (const auto& [ia, ib] : gaps) {
    double t1 = theta[ia];
    double t2 = theta[ib];
    if (t2 < t1) t2 += kTwoPi;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const Vec2 f = support.envelope_point(t1) - support.envelope_point(t2);
      const SupportJet j1 = support.jet(t1);
      const SupportJet j2 = support.jet(t2);
      Mat2 jac;
      jac.col(0) = j1.rho() * perp(t1);
      jac.col(1) = -j2.rho() * perp(t2);
      const Vec2 step = jac.fullPivLu().solve(f);
      t1 -= step.x();
      t2 -= step.y();
      if (step.norm() < 1e-15 * (1.0 + std::abs(t1) + std::abs(t2))) {
        converged = true;
        break;
      }
      if (f.norm() < 1e-15 * scale && step.norm() < 1e-12) {
        converged = true;
        break;
      }
    }
    if (!converged || !(t2 > t1)) {
      throw ConstructionError("planar Wulff corner refinement did not converge");
    }
    PlanarCorner c;
    c.theta_before = t1;
    c.theta_after = t2;
    c.point = support.envelope_point(t1);
    corners.push_back(c);
  }

  // Normalize so that theta_before lies in [0, 2 pi) and sort.
  for (auto& c : corners) {
    const double shift = wrap(c.theta_before) - c.theta_before;
    c.theta_before += shift;
    c.theta_after += shift;
  }
  std::sort(corners.begin(), corners.end(),
            [](const PlanarCorner& a, const PlanarCorner& b) {
              return a.theta_before < b.theta_before;
            });

  std::vector<NormalArc> arcs;
  const std::size_t k = corners.size();
  for (std::size_t i = 0; i < k; ++i) {
    NormalArc arc;
    arc.lo = corners[i].theta_after;
    arc.hi = corners[(i + 1) % k].theta_before;
    while (arc.hi < arc.lo) arc.hi += kTwoPi;
    if (arc.lo >= kTwoPi) {
      arc.lo -= kTwoPi;
      arc.hi -= kTwoPi;
    }
    arcs.push_back(arc);
  }
  std::sort(arcs.begin(), arcs.end(),
            [](const NormalArc& a, const NormalArc& b) { return a.lo < b.lo; });
  return PlanarWulff(support, std::move(arcs), std::move(corners));
}

std::vector<NormalArc> PlanarWulff::arcs_within(double lo, double hi) const {
  if (smooth()) return {NormalArc{lo, hi}};
  std::vector<NormalArc> out;
  for (int shift = -2; shift <= 2; ++shift) {
    for (const NormalArc& a : arcs_) {
      const double l = std::max(lo, a.lo + shift * kTwoPi);
      const double h = std::min(hi, a.hi + shift * kTwoPi);
      if (h > l) out.push_back({l, h});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const NormalArc& a, const NormalArc& b) { return a.lo < b.lo; });
  return out;
}

bool PlanarWulff::attained(double theta, double tol) const {
  if (smooth()) return true;
  const double t = wrap(theta);
  for (const NormalArc& a : arcs_) {
    if (a.contains(t, tol) || a.contains(t + kTwoPi, tol) || a.contains(t - kTwoPi, tol)) {
      return true;
    }
  }
  return false;
}

Vec2 PlanarWulff::tangent(double theta) const {
  return support_.jet(theta).rho() * perp(theta);
}

Vec2 PlanarWulff::second(double theta) const {
  const SupportJet j = support_.jet(theta);
  return j.drho() * perp(theta) - j.rho() * unit(theta);
}

// ---------------------------------------------------------------------------

PlanarConvexCurve::PlanarConvexCurve(PlanarWulff wulff) : wulff_(std::move(wulff)) {
  for (const NormalArc& a : wulff_.arcs()) total_ += a.length();
}

std::vector<double> PlanarConvexCurve::corner_params() const {
  std::vector<double> out;
  if (wulff_.smooth()) return out;
  double acc = 0.0;
  for (const NormalArc& a : wulff_.arcs()) {
    out.push_back(kTwoPi * acc / total_);
    acc += a.length();
  }
  return out;
}

double PlanarConvexCurve::normal_angle(double tau) const {
  double f = wrap(tau) / kTwoPi * total_;
  for (const NormalArc& a : wulff_.arcs()) {
    if (f <= a.length()) return a.lo + f;
    f -= a.length();
  }
  return wulff_.arcs().back().hi;
}

Vec2 PlanarConvexCurve::param(double tau) const { return wulff_.point(normal_angle(tau)); }

double PlanarConvexCurve::enclosed_area(int samples) const {
  double area = 0.0;
  Vec2 prev = param(0.0);
  for (int i = 1; i <= samples; ++i) {
    const Vec2 cur = param(kTwoPi * i / samples);
    area += 0.5 * (prev.x() * cur.y() - cur.x() * prev.y());
    prev = cur;
  }
  return area;
}

}  // namespace anisurf
