#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/chart.hpp"
#include "anisurf/json_writer.hpp"
#include "anisurf/mesh.hpp"
#include "anisurf/planar.hpp"
#include "anisurf/surface.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anisurf {

/// Wulff shape chi(sigma, tau) = (u(sigma) (alpha, beta)(tau), v(sigma)) with
/// (u, v) the profile Wulff curve and (alpha, beta) the cross-section curve.
struct ProductWulff {
  PlanarSupport profile;
  PlanarSupport cross;
  PlanarWulff profile_wulff;
  PlanarWulff cross_wulff;
  AnisotropyFunction gamma;
  PiecewiseSurface surface;  // W itself

  static ProductWulff make(const PlanarSupport& profile, const PlanarSupport& cross);
  /// max over Fibonacci normals n and chart samples chi of chi . n - gamma(n).
  [[nodiscard]] double support_excess(int normals = 2000, int grid = 64) const;
};

enum class ProfileClass { wulff, cylinder, catenoid, unduloid };
std::string to_string(ProfileClass c);
ProfileClass profile_class_from_string(const std::string& s);

struct ProfileRequest {
  ProfileClass cls = ProfileClass::catenoid;
  double lambda = 0.0;     // target Lambda
  double neck = 1.0;       // neck radius (catenoid, unduloid)
  double z_extent = 1.0;   // half height (catenoid, cylinder)
  int periods = 2;         // unduloid
  double tolerance = 1e-13;  // ODE absolute and relative tolerance
};

/// Meridian state in arc length: X = (x, z), normal angle theta with unit
/// normal (cos theta, sin theta) and tangent (-sin theta, cos theta).
struct ProfileState {
  double x = 0.0;
  double z = 0.0;
  double theta = 0.0;
};

/// One smooth piece of a profile: the solution of the constant-Lambda ODE
/// from a start state, stored on a grid and refined by re-integration.
class ProfilePiece {
 public:
  /// Solution on [s0, s1] through `ref` at arclength s_ref.
  ProfilePiece(const PlanarSupport& profile, double lambda, double s0, double s1, double s_ref,
               ProfileState ref, double tolerance);

  [[nodiscard]] double s0() const { return s0_; }
  [[nodiscard]] double s1() const { return s1_; }
  [[nodiscard]] ProfileState state(double s) const;
  /// d theta / ds at a state.
  [[nodiscard]] double theta_rate(const ProfileState& st) const;

 private:
  PlanarSupport profile_;
  double lambda_;
  double s0_, s1_;
  double step_;
  double tolerance_;
  std::vector<ProfileState> nodes_;  // at s0 + (k - 1) step
};

struct ProfileCurve {
  ProfileClass cls = ProfileClass::catenoid;
  PlanarSupport profile = PlanarSupport::circle();
  double lambda = 0.0;
  double flux = 0.0;                  // x u(theta) + (Lambda/2) x^2
  std::vector<ProfilePiece> pieces;   // in increasing s; empty for the Wulff class
  double wulff_scale = 0.0;           // Wulff class: profile = scale (u, v)
  double period = 0.0;                // unduloid
  double pitch = 0.0;                 // unduloid
  double tolerance = 1e-13;
  [[nodiscard]] double s_begin() const;
  [[nodiscard]] double s_end() const;
  /// State at arclength s (Wulff class: s is the profile normal angle).
  [[nodiscard]] ProfileState state(double s) const;
};

/// DomainError when the class is not realizable with the request (e.g. the
/// neck radius outside the unduloid bracket), with the bracket quoted.
ProfileCurve solve_profile(const ProductWulff& w, const ProfileRequest& req);

/// X(phi, s) = (x(s) w_c(phi), z(s)) with w_c the cross-section Wulff curve
/// at normal angle phi.
class DelaunayChart final : public Chart {
 public:
  DelaunayChart(std::shared_ptr<const ProfileCurve> profile, int piece, PlanarSupport cross);
  Vec3 position(double s, double t) const override;
  ChartFirst first(double s, double t) const override;
  ChartSecond second(double s, double t) const override;
  std::string describe() const override;

 private:
  std::shared_ptr<const ProfileCurve> profile_;
  int piece_;
  PlanarSupport cross_;
};

/// Patches are (cross arc) x (profile piece); edges at cross corners and at
/// profile creases. Not closed except for the Wulff class.
PiecewiseSurface build_surface(const ProfileCurve& profile, const PlanarSupport& cross);

/// xi from the matching tangent plane of W: cross normal angle from the
/// horizontal part of nu, profile normal angle from tan theta = nu3 / (|nu12| h_c).
/// DomainError when either angle is not attained by W.
Vec3 xi_by_tangency(const ProductWulff& w, const Vec3& nu);

struct IndependenceReport {
  int samples = 0;
  double max_discrepancy = 0.0;  // max |Lambda_a(s) - Lambda_b(s, phi)|
  double lambda_a_mean = 0.0;
  double lambda_b_mean = 0.0;
};

/// Lambda on the surface of revolution (circular cross, gamma_a) against
/// Lambda on the surface with cross_b (gamma_b), pointwise in s.
IndependenceReport cross_section_independence(const ProfileCurve& profile, const PlanarSupport& cross_b,
                                              int s_samples = 48, int phi_samples = 5);

struct DelaunaySummary {
  double lambda_target = 0.0;
  double lambda_max_residual = 0.0;  // generic evaluator, interior samples
  double edge_max_xi_jump = 0.0;
  double edge_max_force_jump = 0.0;
  double tangency_max_residual = 0.0;
  double catenoid_oracle = -1.0;     // isotropic catenoid: max |x - c cosh(z / c)|
  double periodicity = -1.0;         // unduloid: max deviation of x(s+P), z(s+P) - h
  int patches = 0;
  int geometric_edges = 0;
  IndependenceReport independence;
  double flux_drift = 0.0;           // max |Q(s) - Q|
};

DelaunaySummary summarize_delaunay(const ProductWulff& w, const ProfileCurve& profile,
                                   const PiecewiseSurface& surf, int samples, unsigned long long seed);

Json delaunay_summary_json(const DelaunaySummary& s, const ProfileCurve& profile);

/// CSV rows (s, x, z, Lambda) with Lambda from the generic evaluator on the
/// built surface at the middle of the first cross arc.
std::string profile_csv(const ProfileCurve& profile, const PiecewiseSurface& surf,
                        const AnisotropyFunction& gamma, int rows);

/// Triangulated grid of every patch, for export.
TriangleMesh surface_mesh(const PiecewiseSurface& surf, int n);

/// Edge polylines of a surface as JSON (num points per edge).
Json edge_polylines(const PiecewiseSurface& surf, int points);

}  // namespace anisurf
