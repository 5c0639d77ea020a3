#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisurf/delaunay.hpp"
#include "anisurf/fields.hpp"

#include <cmath>
#include <random>

using namespace anisurf;

namespace {

const PlanarSupport kCircle = PlanarSupport::circle();

ProfileRequest request(ProfileClass cls, double lambda, double neck = 1.0) {
  ProfileRequest r;
  r.cls = cls;
  r.lambda = lambda;
  r.neck = neck;
  return r;
}

double max_lambda_residual(const PiecewiseSurface& s, const AnisotropyFunction& g, double target) {
  FieldOptions fo;
  fo.lambda_alt = false;
  double worst = 0.0;
  for (const FieldSample& f : fields_at(s, g, interior_samples(s, 200, 3), fo).samples) {
    worst = std::max(worst, std::abs(f.lambda - target));
  }
  return worst;
}

}  // namespace

TEST_CASE("product Wulff shape is supported by gamma") {
  for (const auto& [p, c] : {std::pair{PlanarSupport::lens(2.0), kCircle},
                             std::pair{PlanarSupport::lens(0.5), PlanarSupport::trig(3, 0.2)}}) {
    const ProductWulff w = ProductWulff::make(p, c);
    CHECK(w.support_excess(1000, 32) <= 1e-9);
    CHECK(w.surface.closed);
  }
}

TEST_CASE("isotropic Wulff profile is the unit sphere") {
  const ProductWulff w = ProductWulff::make(kCircle, kCircle);
  const ProfileCurve p = solve_profile(w, request(ProfileClass::wulff, -2.0));
  const PiecewiseSurface s = build_surface(p, kCircle);
  for (const SamplePoint& sp : interior_samples(s, 50, 1)) {
    CHECK(s.position(sp.patch, sp.s, sp.t).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(max_lambda_residual(s, w.gamma, -2.0) < 1e-8);
}

TEST_CASE("isotropic catenoid matches x = c cosh(z / c)") {
  const ProductWulff w = ProductWulff::make(kCircle, kCircle);
  for (double c : {0.5, 1.0, 2.0}) {
    ProfileRequest r = request(ProfileClass::catenoid, 0.0, c);
    r.z_extent = 1.5 * c;
    const ProfileCurve p = solve_profile(w, r);
    for (int k = 0; k <= 100; ++k) {
      const double s = p.s_begin() + (p.s_end() - p.s_begin()) * k / 100;
      const ProfileState st = p.state(s);
      CHECK(std::abs(st.x - c * std::cosh(st.z / c)) < 1e-6 * c);
    }
    const PiecewiseSurface surf = build_surface(p, kCircle);
    CHECK(surf.patches.size() == 1);
    CHECK(surf.geometric_edge_count() == 0);
    CHECK_FALSE(surf.closed);
    CHECK(max_lambda_residual(surf, w.gamma, 0.0) < 1e-6);
  }
}

TEST_CASE("isotropic unduloid follows the Kenmotsu representation") {
  // Lambda = -2 means H = 1: x(s) = (1/2) sqrt(1 + B^2 - 2 B cos 2s) from the
  // neck, B = 1 - 2 a; the pitch is the perimeter of the rolling ellipse with
  // semi-axes (1/2, sqrt(a (1 - a))).
  const ProductWulff w = ProductWulff::make(kCircle, kCircle);
  for (double a : {0.2, 0.35}) {
    const ProfileCurve p = solve_profile(w, request(ProfileClass::unduloid, -2.0, a));
    const double b = 1.0 - 2.0 * a;
    CHECK(p.period == doctest::Approx(kPi).epsilon(1e-8));
    const double big = 0.5, small = std::sqrt(a * (1.0 - a));
    const double e = std::sqrt(1.0 - small * small / (big * big));
    CHECK(p.pitch == doctest::Approx(4.0 * big * std::comp_ellint_2(e)).epsilon(1e-8));
    const double s0 = p.s_begin();
    CHECK(p.state(s0).x == doctest::Approx(a).epsilon(1e-10));
    for (int k = 0; k <= 80; ++k) {
      const double sigma = (p.s_end() - s0) * k / 80;
      const double kx = 0.5 * std::sqrt(1.0 + b * b - 2.0 * b * std::cos(2.0 * sigma));
      CHECK(std::abs(p.state(s0 + sigma).x - kx) < 1e-8);
    }
  }
}

TEST_CASE("lens profile catenoid has constant zero Lambda and a crease") {
  const ProductWulff w = ProductWulff::make(PlanarSupport::lens(2.0), kCircle);
  const ProfileCurve p = solve_profile(w, request(ProfileClass::catenoid, 0.0));
  const PiecewiseSurface s = build_surface(p, kCircle);
  CHECK(max_lambda_residual(s, w.gamma, 0.0) < 1e-6);
  CHECK(s.geometric_edge_count() == 1);
  const DelaunaySummary d = summarize_delaunay(w, p, s, 200, 2);
  CHECK(d.edge_max_xi_jump <= 1e-8);
  CHECK(d.edge_max_force_jump <= 1e-8);
}

TEST_CASE("unduloid with a cornered cross-section") {
  const ProductWulff w = ProductWulff::make(PlanarSupport::lens(0.5), PlanarSupport::trig(3, 0.2));
  const ProfileCurve p = solve_profile(w, request(ProfileClass::unduloid, -2.0, 0.5));
  const PiecewiseSurface s = build_surface(p, PlanarSupport::trig(3, 0.2));
  CHECK(s.patches.size() == 3);
  CHECK(s.geometric_edge_count() == 3);
  const EquilibriumReport e = equilibrium_check(s, w.gamma);
  CHECK(e.pass());
  CHECK(e.lambda_mean == doctest::Approx(-2.0).epsilon(1e-6));
  const DelaunaySummary d = summarize_delaunay(w, p, s, 200, 2);
  CHECK(d.periodicity <= 1e-6);
  CHECK(d.edge_max_xi_jump <= 1e-8);
  CHECK(d.tangency_max_residual <= 1e-6);
  CHECK(d.flux_drift <= 1e-9);
}

TEST_CASE("cylinder radius") {
  const PlanarSupport prof = PlanarSupport::lens(0.5);
  const ProductWulff w = ProductWulff::make(prof, kCircle);
  const ProfileCurve p = solve_profile(w, request(ProfileClass::cylinder, -1.0));
  // Horizontal normal: Lambda = -u(0)/x on a vertical line.
  CHECK(p.state(0.5 * (p.s_begin() + p.s_end())).x == doctest::Approx(prof(0.0)).epsilon(1e-12));
  CHECK(max_lambda_residual(build_surface(p, kCircle), w.gamma, -1.0) < 1e-8);
}

TEST_CASE("tangency correspondence matches the gradient of gamma") {
  const ProductWulff w = ProductWulff::make(PlanarSupport::lens(0.5), PlanarSupport::trig(3, 0.2));
  // On W itself xi = X.
  for (const SamplePoint& sp : interior_samples(w.surface, 30, 4)) {
    const Vec3 x = w.surface.position(sp.patch, sp.s, sp.t);
    const Vec3 n = w.surface.normal(sp.patch, sp.s, sp.t);
    CHECK((xi_by_tangency(w, n) - x).norm() < 1e-8);
  }
  const ProfileCurve p = solve_profile(w, request(ProfileClass::unduloid, -2.0, 0.5));
  const PiecewiseSurface s = build_surface(p, PlanarSupport::trig(3, 0.2));
  for (const SamplePoint& sp : interior_samples(s, 50, 9)) {
    const Vec3 n = s.normal(sp.patch, sp.s, sp.t);
    CHECK((xi_by_tangency(w, n) - point_data(w.gamma, n).xi).norm() < 1e-6);
  }
  // Isotropic catenoid: xi = nu.
  const ProductWulff iso = ProductWulff::make(kCircle, kCircle);
  const Vec3 n = Vec3(0.3, -0.4, 0.5).normalized();
  CHECK((xi_by_tangency(iso, n) - n).norm() < 1e-10);
}

TEST_CASE("tangency outside the attained normals is an error") {
  // lens(2) profile: normals near the horizontal are not attained.
  const ProductWulff w = ProductWulff::make(PlanarSupport::lens(2.0), kCircle);
  CHECK_THROWS_AS(xi_by_tangency(w, Vec3::UnitX()), DomainError);
}

TEST_CASE("Lambda does not depend on the cross-section") {
  const ProductWulff iso = ProductWulff::make(kCircle, kCircle);
  const ProfileCurve cat = solve_profile(iso, request(ProfileClass::catenoid, 0.0));
  CHECK(cross_section_independence(cat, PlanarSupport::ellipse(1.0, 0.6)).max_discrepancy <= 1e-6);
  const IndependenceReport tri = cross_section_independence(cat, PlanarSupport::trig(3, 0.2));
  CHECK(tri.max_discrepancy <= 1e-6);
  CHECK(std::abs(tri.lambda_b_mean) <= 1e-6);
  const ProfileCurve sph = solve_profile(iso, request(ProfileClass::wulff, -2.0));
  const IndependenceReport s = cross_section_independence(sph, PlanarSupport::trig(4, 0.1));
  CHECK(s.lambda_b_mean == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(s.max_discrepancy <= 1e-6);
}

TEST_CASE("unreachable neck radius is reported with the bracket") {
  const ProductWulff w = ProductWulff::make(kCircle, kCircle);
  try {
    (void)solve_profile(w, request(ProfileClass::unduloid, -2.0, 5.0));
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("bracket") != std::string::npos);
  }
  CHECK_THROWS_AS(solve_profile(w, request(ProfileClass::unduloid, 1.0, 0.2)), DomainError);
}

TEST_CASE("exports") {
  const ProductWulff w = ProductWulff::make(kCircle, kCircle);
  const ProfileCurve p = solve_profile(w, request(ProfileClass::catenoid, 0.0));
  const PiecewiseSurface s = build_surface(p, kCircle);
  const std::string csv = profile_csv(p, s, w.gamma, 20);
  CHECK(csv.rfind("s,x,z,lambda\r\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
  const TriangleMesh m = surface_mesh(s, 8);
  CHECK(m.vertices.size() == 81);
  CHECK(m.triangles.size() == 128);
  CHECK(profile_class_from_string("sphere") == ProfileClass::wulff);
  CHECK_THROWS(profile_class_from_string("nodoid"));
}
