#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/common.hpp"
#include "anisurf/planar.hpp"

#include <functional>
#include <memory>
#include <string>

namespace anisurf {

struct ChartFirst {
  Vec3 xs = Vec3::Zero();
  Vec3 xt = Vec3::Zero();
};

struct ChartSecond {
  Vec3 xss = Vec3::Zero();
  Vec3 xst = Vec3::Zero();
  Vec3 xtt = Vec3::Zero();
};

/// Map (s, t) -> X(s, t). Derivatives default to fourth-order centered
/// differences (second derivatives are differences of `first`, so an analytic
/// `first` makes them one level more accurate).
class Chart {
 public:
  explicit Chart(double fd_step = 1e-3) : fd_step_(fd_step) {}
  virtual ~Chart() = default;

  [[nodiscard]] virtual Vec3 position(double s, double t) const = 0;
  [[nodiscard]] virtual ChartFirst first(double s, double t) const;
  [[nodiscard]] virtual ChartSecond second(double s, double t) const;
  [[nodiscard]] virtual std::string describe() const = 0;

  [[nodiscard]] double fd_step() const { return fd_step_; }

 private:
  double fd_step_;
};

using ChartPtr = std::shared_ptr<const Chart>;

/// Unit normal orientation * (X_s x X_t)/|..| and its parameter derivatives
/// from the Weingarten equations.
struct NormalJet {
  Vec3 nu = Vec3::UnitZ();
  Vec3 nu_s = Vec3::Zero();
  Vec3 nu_t = Vec3::Zero();
  double jacobian = 0.0;  // |X_s x X_t|
};

NormalJet normal_jet(const Chart& chart, double s, double t, int orientation);
Vec3 unit_normal(const Chart& chart, double s, double t, int orientation);

/// X = center + M y(s, t) with y the unit sphere in polar angle s in [0, pi]
/// and azimuth t in [0, 2 pi]. Covers spheres (M = r I) and ellipsoids.
class EllipsoidChart final : public Chart {
 public:
  EllipsoidChart(const Mat3& m, const Vec3& center = Vec3::Zero());
  static ChartPtr sphere(double radius, const Vec3& center = Vec3::Zero());
  static ChartPtr axes(const Vec3& semi_axes, const Vec3& center = Vec3::Zero());

  Vec3 position(double s, double t) const override;
  ChartFirst first(double s, double t) const override;
  ChartSecond second(double s, double t) const override;
  std::string describe() const override;

  [[nodiscard]] const Mat3& matrix() const { return m_; }

 private:
  Mat3 m_;
  Vec3 c_;
};

/// Torus of revolution about e3, s the longitude and t the tube angle.
class TorusChart final : public Chart {
 public:
  TorusChart(double major, double minor);
  Vec3 position(double s, double t) const override;
  ChartFirst first(double s, double t) const override;
  ChartSecond second(double s, double t) const override;
  std::string describe() const override;

 private:
  double big_, small_;
};

/// Wulff shape of a product-form anisotropy,
/// X(s, t) = scale (u(t) w_c(s), v(t)), with s the normal angle of the
/// cross-section curve and t the normal angle of the profile curve,
/// (u, v) = w_p(t).
class ProductWulffChart final : public Chart {
 public:
  ProductWulffChart(PlanarSupport profile, PlanarSupport cross, double scale = 1.0);
  Vec3 position(double s, double t) const override;
  ChartFirst first(double s, double t) const override;
  ChartSecond second(double s, double t) const override;
  std::string describe() const override;

 private:
  PlanarSupport profile_;
  PlanarSupport cross_;
  double scale_;
};

/// X = scale grad gamma~(y(s, t)) over the polar angle / azimuth sphere chart;
/// the Wulff shape of a convex gamma without a closed-form parametrization.
class WulffNormalChart final : public Chart {
 public:
  WulffNormalChart(AnisotropyFunction gamma, double scale = 1.0);
  Vec3 position(double s, double t) const override;
  ChartFirst first(double s, double t) const override;
  std::string describe() const override;

 private:
  AnisotropyFunction gamma_;
  double scale_;
};

/// center + factor (X - center).
class ScaledChart final : public Chart {
 public:
  ScaledChart(ChartPtr base, double factor, const Vec3& center = Vec3::Zero());
  Vec3 position(double s, double t) const override;
  ChartFirst first(double s, double t) const override;
  ChartSecond second(double s, double t) const override;
  std::string describe() const override;

 private:
  ChartPtr base_;
  double factor_;
  Vec3 center_;
};

/// X + eps xi(nu): the parallel surface along the Cahn-Hoffman field.
class DisplacedChart final : public Chart {
 public:
  DisplacedChart(ChartPtr base, AnisotropyFunction gamma, int orientation, double eps);
  Vec3 position(double s, double t) const override;
  ChartFirst first(double s, double t) const override;
  std::string describe() const override;

 private:
  ChartPtr base_;
  AnisotropyFunction gamma_;
  int orientation_;
  double eps_;
};

/// Variation field given on the unperturbed chart.
using VariationField = std::function<Vec3(const Chart& base, double s, double t)>;

/// X + eps dX(s, t).
class PerturbedChart final : public Chart {
 public:
  PerturbedChart(ChartPtr base, VariationField field, double eps);
  Vec3 position(double s, double t) const override;
  std::string describe() const override;

 private:
  ChartPtr base_;
  VariationField field_;
  double eps_;
};

/// Chart from a position callback only.
class FunctionChart final : public Chart {
 public:
  FunctionChart(std::function<Vec3(double, double)> f, std::string label, double fd_step = 1e-3);
  Vec3 position(double s, double t) const override { return f_(s, t); }
  std::string describe() const override { return label_; }

 private:
  std::function<Vec3(double, double)> f_;
  std::string label_;
};

}  // namespace anisurf
