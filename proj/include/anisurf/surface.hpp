#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/chart.hpp"
#include "anisurf/common.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace anisurf {

enum class Side : int { s_lo = 0, s_hi = 1, t_lo = 2, t_hi = 3 };

std::string to_string(Side s);

/// A chart restricted to [s0, s1] x [t0, t1]. orientation = +1 when
/// X_s x X_t points along the surface normal.
struct ParametricPatch {
  ChartPtr chart;
  double s0 = 0.0, s1 = 1.0, t0 = 0.0, t1 = 1.0;
  int orientation = 1;
  std::array<bool, 4> collapsed{};  // sides that degenerate to a point
  std::string name;

  /// Parameter point on `side` at lambda in [0, 1]; lambda runs with s on
  /// t-sides and with t on s-sides.
  [[nodiscard]] Vec2 side_param(Side side, double lambda) const;
  /// +1 when increasing lambda follows the positively oriented boundary of
  /// the patch (counter-clockwise seen from the normal), -1 otherwise.
  [[nodiscard]] int side_direction(Side side) const;
  [[nodiscard]] bool inside(double s, double t, double margin) const;
};

struct BoundaryRef {
  int patch = 0;
  Side side = Side::s_lo;
  bool reversed = false;  // lambda -> 1 - lambda on this side
};

/// A curve where two patch sides meet. Seams are chart artifacts (periodic
/// parameters) rather than geometric edges.
struct Edge {
  BoundaryRef a;
  BoundaryRef b;
  bool seam = false;
  std::string name;
};

struct EdgePoint {
  Vec3 point = Vec3::Zero();
  Vec3 tangent = Vec3::Zero();  // unit, along increasing lambda
  Vec3 nu_a = Vec3::Zero();
  Vec3 nu_b = Vec3::Zero();
  Vec3 xi_a = Vec3::Zero();
  Vec3 xi_b = Vec3::Zero();
  Vec3 conormal_a = Vec3::Zero();  // outward from face a, tangent to it
  Vec3 conormal_b = Vec3::Zero();
  double gap = 0.0;  // |X_a - X_b|
};

class PiecewiseSurface {
 public:
  std::vector<ParametricPatch> patches;
  std::vector<Edge> edges;
  bool closed = false;
  std::optional<int> genus_hint;
  std::string name;

  /// Throws ConstructionError when patches are not immersed, edges do not
  /// match within 1e-8 or are traversed in the same direction, or (closed)
  /// a side is neither collapsed nor matched exactly once.
  void validate() const;

  [[nodiscard]] Vec3 position(int patch, double s, double t) const;
  [[nodiscard]] Vec3 normal(int patch, double s, double t) const;
  /// Traces of both faces at parameter lambda of an edge.
  [[nodiscard]] EdgePoint edge_point(const Edge& e, double lambda,
                                     const AnisotropyFunction& gamma) const;
  [[nodiscard]] std::size_t geometric_edge_count() const;
};

/// Every patch wrapped in a ScaledChart about the origin.
PiecewiseSurface scaled(const PiecewiseSurface& s, double factor);

PiecewiseSurface make_sphere(double radius, const Vec3& center = Vec3::Zero());
PiecewiseSurface make_ellipsoid(const Vec3& semi_axes);
/// Ellipsoid x = M y, |y| = 1, for M with positive determinant.
PiecewiseSurface make_linear_ellipsoid(const Mat3& m, const std::string& name);
PiecewiseSurface make_torus(double major, double minor);
/// Polar-angle/azimuth chart of a closed surface with the sphere's patch and
/// seam structure.
PiecewiseSurface make_spherical(ChartPtr chart, const std::string& name);

/// Parametric Wulff shape scale * W of a built-in anisotropy: sphere,
/// ellipsoid, or product chart split at the corners of the profile and
/// cross-section curves (lens and product); X = scale grad gamma~(n) for
/// sampled gamma.
PiecewiseSurface wulff_surface(const AnisotropyFunction& gamma, double scale = 1.0);

/// Product chart over every pair of attained profile and cross arcs, with
/// profile normal angles restricted to [-pi/2, pi/2].
PiecewiseSurface product_wulff_surface(const PlanarSupport& profile, const PlanarSupport& cross,
                                       double scale = 1.0);

}  // namespace anisurf
