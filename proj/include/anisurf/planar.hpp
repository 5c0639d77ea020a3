#pragma once

#include "anisurf/common.hpp"

#include <string>
#include <variant>
#include <vector>

namespace anisurf {

/// Angular derivatives of a planar support function h(theta), theta the
/// normal angle.
struct SupportJet {
  double h = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  /// Radius of curvature of the envelope, h + h''.
  [[nodiscard]] double rho() const { return h + d2; }
  [[nodiscard]] double drho() const { return d1 + d3; }
};

/// Value, gradient and Hessian of the degree-one homogeneous extension in R^2.
struct PlanarExtension {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  Mat2 hessian = Mat2::Zero();
};

/// Support function of a planar convex body, given as a smooth positive
/// periodic function of the normal angle. Built-in families: trigonometric
/// series (circle, lens, m-fold "trig" shapes) and ellipses.
class PlanarSupport {
 public:
  struct Fourier {
    double c0 = 1.0;
    std::vector<double> cos_coeffs;  // a_k for k = 1..K
    std::vector<double> sin_coeffs;  // b_k for k = 1..K
  };
  struct Ellipse {
    double a = 1.0;
    double b = 1.0;
  };

  static PlanarSupport circle(double radius = 1.0);
  static PlanarSupport ellipse(double a, double b);
  /// h = 1 + beta cos^2(theta); radius of curvature turns negative near
  /// theta = 0 for beta > 1, which produces a corner of the Wulff curve.
  static PlanarSupport lens(double beta);
  /// h = 1 + b cos(m theta); corners appear for b > 1/(m^2 - 1).
  static PlanarSupport trig(int m, double b);
  static PlanarSupport fourier(double c0, std::vector<double> cos_coeffs,
                               std::vector<double> sin_coeffs);

  [[nodiscard]] SupportJet jet(double theta) const;
  [[nodiscard]] double operator()(double theta) const { return jet(theta).h; }
  [[nodiscard]] PlanarExtension extension(const Vec2& y) const;

  /// Point of the envelope with normal angle theta: h n + h' n_perp.
  [[nodiscard]] Vec2 envelope_point(double theta) const;

  /// True when h(pi - theta) == h(theta) (mirror symmetric in the first axis).
  [[nodiscard]] bool even_in_first_axis() const;
  /// True when h(-theta) == h(theta) (mirror symmetric in the second axis).
  [[nodiscard]] bool even_in_second_axis() const;

  [[nodiscard]] std::string describe() const;

 private:
  explicit PlanarSupport(std::variant<Fourier, Ellipse> rep) : rep_(std::move(rep)) {}
  std::variant<Fourier, Ellipse> rep_;
};

/// A maximal range of normal angles [lo, hi] that the Wulff curve attains.
struct NormalArc {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double length() const { return hi - lo; }
  [[nodiscard]] bool contains(double theta, double tol = 0.0) const {
    return theta >= lo - tol && theta <= hi + tol;
  }
};

/// A corner of the Wulff curve: the end of one attained arc meets the start
/// of the next at the same point.
struct PlanarCorner {
  double theta_before = 0.0;  // hi of the preceding arc
  double theta_after = 0.0;   // lo of the following arc (may be offset by 2 pi)
  Vec2 point = Vec2::Zero();
};

/// Wulff curve of a planar support function: the inner envelope of the lines
/// {y . n(theta) = h(theta)}, parametrized by normal angle over the attained
/// arcs.
class PlanarWulff {
 public:
  /// Full closed curve. `grid` controls the attainment scan before the
  /// corners are refined by Newton's method.
  static PlanarWulff build(const PlanarSupport& support, int grid = 4096);

  [[nodiscard]] const PlanarSupport& support() const { return support_; }
  /// Attained arcs in increasing order; for a smooth curve a single arc of
  /// length 2 pi.
  [[nodiscard]] const std::vector<NormalArc>& arcs() const { return arcs_; }
  [[nodiscard]] const std::vector<PlanarCorner>& corners() const { return corners_; }
  [[nodiscard]] bool smooth() const { return corners_.empty(); }

  /// Arcs intersected with [lo, hi] (used for half profiles).
  [[nodiscard]] std::vector<NormalArc> arcs_within(double lo, double hi) const;
  /// True when theta (mod 2 pi) lies in an attained arc.
  [[nodiscard]] bool attained(double theta, double tol = 1e-12) const;

  [[nodiscard]] Vec2 point(double theta) const { return support_.envelope_point(theta); }
  /// d/dtheta of point: rho t.
  [[nodiscard]] Vec2 tangent(double theta) const;
  /// d^2/dtheta^2 of point: rho' t - rho n.
  [[nodiscard]] Vec2 second(double theta) const;

 private:
  PlanarWulff(PlanarSupport s, std::vector<NormalArc> arcs, std::vector<PlanarCorner> corners)
      : support_(std::move(s)), arcs_(std::move(arcs)), corners_(std::move(corners)) {}
  PlanarSupport support_;
  std::vector<NormalArc> arcs_;
  std::vector<PlanarCorner> corners_;
};

/// Convex planar curve (alpha(tau), beta(tau)) with corners, realized as the
/// Wulff curve of a support function. The native parameter is the normal
/// angle on each attained arc; `param` maps tau in [0, 2 pi) linearly onto
/// the concatenated arcs.
class PlanarConvexCurve {
 public:
  explicit PlanarConvexCurve(PlanarWulff wulff);
  static PlanarConvexCurve from_support(const PlanarSupport& s) {
    return PlanarConvexCurve(PlanarWulff::build(s));
  }

  [[nodiscard]] const PlanarWulff& wulff() const { return wulff_; }
  [[nodiscard]] const std::vector<NormalArc>& arcs() const { return wulff_.arcs(); }
  [[nodiscard]] std::vector<double> corner_params() const;
  [[nodiscard]] Vec2 param(double tau) const;
  /// Normal angle corresponding to tau.
  [[nodiscard]] double normal_angle(double tau) const;
  /// Area enclosed, by the shoelace formula over a fine sampling.
  [[nodiscard]] double enclosed_area(int samples = 4096) const;

 private:
  PlanarWulff wulff_;
  double total_ = 0.0;
};

}  // namespace anisurf
