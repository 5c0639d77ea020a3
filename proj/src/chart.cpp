#include "anisurf/chart.hpp"

#include <fmt/format.h>

#include <cmath>

namespace anisurf {

namespace {

template <class F>
auto diff4(const F& f, double h) {
  using T = decltype(f(h));
  const T a = f(h), b = f(-h), c = f(2.0 * h), d = f(-2.0 * h);
  return T((8.0 * (a - b) - (c - d)) / (12.0 * h));
}

Vec3 sphere_point(double s, double t) {
  return {std::sin(s) * std::cos(t), std::sin(s) * std::sin(t), std::cos(s)};
}

Vec2 unit2(double a) { return {std::cos(a), std::sin(a)}; }
Vec2 perp2(double a) { return {-std::sin(a), std::cos(a)}; }

struct CurveJet {
  Vec2 w, d1, d2;
};

CurveJet curve_jet(const PlanarSupport& h, double a) {
  const SupportJet j = h.jet(a);
  const Vec2 n = unit2(a);
  const Vec2 t = perp2(a);
  return {j.h * n + j.d1 * t, j.rho() * t, j.drho() * t - j.rho() * n};
}

}  // namespace

ChartFirst Chart::first(double s, double t) const {
  const double h = fd_step_;
  ChartFirst d;
  d.xs = diff4([&](double e) { return Vec3(position(s + e, t)); }, h);
  d.xt = diff4([&](double e) { return Vec3(position(s, t + e)); }, h);
  return d;
}

ChartSecond Chart::second(double s, double t) const {
  const double h = fd_step_;
  ChartSecond d;
  d.xss = diff4([&](double e) { return Vec3(first(s + e, t).xs); }, h);
  d.xtt = diff4([&](double e) { return Vec3(first(s, t + e).xt); }, h);
  const Vec3 a = diff4([&](double e) { return Vec3(first(s + e, t).xt); }, h);
  const Vec3 b = diff4([&](double e) { return Vec3(first(s, t + e).xs); }, h);
  d.xst = 0.5 * (a + b);
  return d;
}

NormalJet normal_jet(const Chart& chart, double s, double t, int orientation) {
  const ChartFirst d1 = chart.first(s, t);
  const ChartSecond d2 = chart.second(s, t);
  const Vec3 c = d1.xs.cross(d1.xt);
  NormalJet nj;
  nj.jacobian = c.norm();
  if (!(nj.jacobian > 0.0)) throw NumericError("chart is not immersed at the sample");
  nj.nu = orientation * c / nj.jacobian;
  Mat2 g, b;
  g << d1.xs.dot(d1.xs), d1.xs.dot(d1.xt), d1.xt.dot(d1.xs), d1.xt.dot(d1.xt);
  b << d2.xss.dot(nj.nu), d2.xst.dot(nj.nu), d2.xst.dot(nj.nu), d2.xtt.dot(nj.nu);
  const Mat2 m = -g.inverse() * b;
  nj.nu_s = m(0, 0) * d1.xs + m(1, 0) * d1.xt;
  nj.nu_t = m(0, 1) * d1.xs + m(1, 1) * d1.xt;
  return nj;
}

Vec3 unit_normal(const Chart& chart, double s, double t, int orientation) {
  const ChartFirst d1 = chart.first(s, t);
  const Vec3 c = d1.xs.cross(d1.xt);
  const double len = c.norm();
  if (!(len > 0.0)) throw NumericError("chart is not immersed at the sample");
  return orientation * c / len;
}

// ---------------------------------------------------------------------------

EllipsoidChart::EllipsoidChart(const Mat3& m, const Vec3& center) : m_(m), c_(center) {
  if (!(m.determinant() > 0.0)) {
    throw ConstructionError("ellipsoid chart needs an orientation-preserving matrix");
  }
}

ChartPtr EllipsoidChart::sphere(double radius, const Vec3& center) {
  return std::make_shared<EllipsoidChart>(radius * Mat3::Identity(), center);
}

ChartPtr EllipsoidChart::axes(const Vec3& semi_axes, const Vec3& center) {
  return std::make_shared<EllipsoidChart>(Mat3(semi_axes.asDiagonal()), center);
}

Vec3 EllipsoidChart::position(double s, double t) const { return c_ + m_ * sphere_point(s, t); }

ChartFirst EllipsoidChart::first(double s, double t) const {
  const double cs = std::cos(s), ss = std::sin(s), ct = std::cos(t), st = std::sin(t);
  return {m_ * Vec3(cs * ct, cs * st, -ss), m_ * Vec3(-ss * st, ss * ct, 0.0)};
}

ChartSecond EllipsoidChart::second(double s, double t) const {
  const double cs = std::cos(s), ss = std::sin(s), ct = std::cos(t), st = std::sin(t);
  return {-(m_ * sphere_point(s, t)), m_ * Vec3(-cs * st, cs * ct, 0.0),
          m_ * Vec3(-ss * ct, -ss * st, 0.0)};
}

std::string EllipsoidChart::describe() const {
  if ((m_ - m_(0, 0) * Mat3::Identity()).norm() == 0.0) {
    return fmt::format("sphere(r={:.17g})", m_(0, 0));
  }
  if ((m_ - Mat3(m_.diagonal().asDiagonal())).norm() == 0.0) {
    return fmt::format("ellipsoid({:.17g},{:.17g},{:.17g})", m_(0, 0), m_(1, 1), m_(2, 2));
  }
  return "ellipsoid(general)";
}

// ---------------------------------------------------------------------------

TorusChart::TorusChart(double major, double minor) : big_(major), small_(minor) {
  if (!(minor > 0.0 && major > minor)) {
    throw ConstructionError("torus needs major > minor > 0");
  }
}

Vec3 TorusChart::position(double s, double t) const {
  const double rr = big_ + small_ * std::cos(t);
  return {rr * std::cos(s), rr * std::sin(s), small_ * std::sin(t)};
}

ChartFirst TorusChart::first(double s, double t) const {
  const double rr = big_ + small_ * std::cos(t);
  return {rr * Vec3(-std::sin(s), std::cos(s), 0.0),
          small_ * Vec3(-std::sin(t) * std::cos(s), -std::sin(t) * std::sin(s), std::cos(t))};
}

ChartSecond TorusChart::second(double s, double t) const {
  const double rr = big_ + small_ * std::cos(t);
  return {-rr * Vec3(std::cos(s), std::sin(s), 0.0),
          -small_ * std::sin(t) * Vec3(-std::sin(s), std::cos(s), 0.0),
          -small_ * Vec3(std::cos(t) * std::cos(s), std::cos(t) * std::sin(s), std::sin(t))};
}

std::string TorusChart::describe() const {
  return fmt::format("torus(R={:.17g},r={:.17g})", big_, small_);
}

// ---------------------------------------------------------------------------

ProductWulffChart::ProductWulffChart(PlanarSupport profile, PlanarSupport cross, double scale)
    : profile_(std::move(profile)), cross_(std::move(cross)), scale_(scale) {}

Vec3 ProductWulffChart::position(double s, double t) const {
  const Vec2 c = cross_.envelope_point(s);
  const Vec2 p = profile_.envelope_point(t);
  return scale_ * Vec3(p.x() * c.x(), p.x() * c.y(), p.y());
}

ChartFirst ProductWulffChart::first(double s, double t) const {
  const CurveJet c = curve_jet(cross_, s);
  const CurveJet p = curve_jet(profile_, t);
  ChartFirst d;
  d.xs = scale_ * Vec3(p.w.x() * c.d1.x(), p.w.x() * c.d1.y(), 0.0);
  d.xt = scale_ * Vec3(p.d1.x() * c.w.x(), p.d1.x() * c.w.y(), p.d1.y());
  return d;
}

ChartSecond ProductWulffChart::second(double s, double t) const {
  const CurveJet c = curve_jet(cross_, s);
  const CurveJet p = curve_jet(profile_, t);
  ChartSecond d;
  d.xss = scale_ * Vec3(p.w.x() * c.d2.x(), p.w.x() * c.d2.y(), 0.0);
  d.xst = scale_ * Vec3(p.d1.x() * c.d1.x(), p.d1.x() * c.d1.y(), 0.0);
  d.xtt = scale_ * Vec3(p.d2.x() * c.w.x(), p.d2.x() * c.w.y(), p.d2.y());
  return d;
}

std::string ProductWulffChart::describe() const {
  return fmt::format("product_wulff(profile={}, cross={}, scale={:.17g})", profile_.describe(),
                     cross_.describe(), scale_);
}

// ---------------------------------------------------------------------------

WulffNormalChart::WulffNormalChart(AnisotropyFunction gamma, double scale)
    : Chart(1e-3), gamma_(std::move(gamma)), scale_(scale) {}

Vec3 WulffNormalChart::position(double s, double t) const {
  return scale_ * gamma_.extension(sphere_point(s, t)).gradient;
}

ChartFirst WulffNormalChart::first(double s, double t) const {
  const Mat3 h = gamma_.extension(sphere_point(s, t)).hessian;
  const double cs = std::cos(s), ss = std::sin(s), ct = std::cos(t), st = std::sin(t);
  return {scale_ * h * Vec3(cs * ct, cs * st, -ss), scale_ * h * Vec3(-ss * st, ss * ct, 0.0)};
}

std::string WulffNormalChart::describe() const {
  return fmt::format("wulff_normal({}, scale={:.17g})", gamma_.describe(), scale_);
}

// ---------------------------------------------------------------------------

ScaledChart::ScaledChart(ChartPtr base, double factor, const Vec3& center)
    : Chart(base->fd_step()), base_(std::move(base)), factor_(factor), center_(center) {
  if (!(factor > 0.0)) throw ConstructionError("scale factor must be positive");
}

Vec3 ScaledChart::position(double s, double t) const {
  return center_ + factor_ * (base_->position(s, t) - center_);
}

ChartFirst ScaledChart::first(double s, double t) const {
  const ChartFirst d = base_->first(s, t);
  return {factor_ * d.xs, factor_ * d.xt};
}

ChartSecond ScaledChart::second(double s, double t) const {
  const ChartSecond d = base_->second(s, t);
  return {factor_ * d.xss, factor_ * d.xst, factor_ * d.xtt};
}

std::string ScaledChart::describe() const {
  return fmt::format("{:.17g}*{}", factor_, base_->describe());
}

// ---------------------------------------------------------------------------

DisplacedChart::DisplacedChart(ChartPtr base, AnisotropyFunction gamma, int orientation, double eps)
    : Chart(1e-4), base_(std::move(base)), gamma_(std::move(gamma)), orientation_(orientation),
      eps_(eps) {}

Vec3 DisplacedChart::position(double s, double t) const {
  const Vec3 nu = unit_normal(*base_, s, t, orientation_);
  return base_->position(s, t) + eps_ * gamma_.extension(nu).gradient;
}

ChartFirst DisplacedChart::first(double s, double t) const {
  const NormalJet nj = normal_jet(*base_, s, t, orientation_);
  const ChartFirst d = base_->first(s, t);
  const Mat3 h = gamma_.extension(nj.nu).hessian;
  return {d.xs + eps_ * h * nj.nu_s, d.xt + eps_ * h * nj.nu_t};
}

std::string DisplacedChart::describe() const {
  return fmt::format("{} + {:.17g} xi", base_->describe(), eps_);
}

// ---------------------------------------------------------------------------

PerturbedChart::PerturbedChart(ChartPtr base, VariationField field, double eps)
    : Chart(base->fd_step()), base_(std::move(base)), field_(std::move(field)), eps_(eps) {}

Vec3 PerturbedChart::position(double s, double t) const {
  return base_->position(s, t) + eps_ * field_(*base_, s, t);
}

std::string PerturbedChart::describe() const {
  return fmt::format("{} + {:.17g} dX", base_->describe(), eps_);
}

FunctionChart::FunctionChart(std::function<Vec3(double, double)> f, std::string label,
                             double fd_step)
    : Chart(fd_step), f_(std::move(f)), label_(std::move(label)) {}

}  // namespace anisurf
