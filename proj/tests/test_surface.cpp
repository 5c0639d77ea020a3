#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisurf/delaunay.hpp"
#include "anisurf/fields.hpp"
#include "anisurf/surface.hpp"

#include <cmath>

using namespace anisurf;

namespace {

const AnisotropyFunction kIso = AnisotropyFunction::isotropic();
const AnisotropyFunction kQuad = AnisotropyFunction::quadratic(Vec3(1, 1, 4).asDiagonal());
const AnisotropyFunction kLens = AnisotropyFunction::lens(2.0);
const AnisotropyFunction kProduct =
    AnisotropyFunction::product(PlanarSupport::lens(0.5), PlanarSupport::trig(3, 0.2));

// Closed-form curvatures of x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 with outward normal:
// Lambda = -2 H with H the mean curvature (positive on the sphere).
struct EllipsoidCurvature {
  double k, lambda;
};
EllipsoidCurvature ellipsoid_curvature(const Vec3& ax, const Vec3& p) {
  const double a2 = ax.x() * ax.x(), b2 = ax.y() * ax.y(), c2 = ax.z() * ax.z();
  const double s = p.x() * p.x() / (a2 * a2) + p.y() * p.y() / (b2 * b2) + p.z() * p.z() / (c2 * c2);
  const double abc2 = a2 * b2 * c2;
  return {1.0 / (abc2 * s * s), (p.squaredNorm() - a2 - b2 - c2) / (abc2 * std::pow(s, 1.5))};
}

}  // namespace

TEST_CASE("unit sphere fields under the isotropic energy") {
  const auto surf = make_sphere(1.0);
  const GeometryFields f = fields_at(surf, kIso, interior_samples(surf, 100, 4));
  CHECK(f.flagged == 0);
  for (const FieldSample& s : f.samples) {
    CHECK(s.lambda == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(s.k_sigma == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.kw == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.q == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((s.dnu - Mat2::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("on its own Wulff shape dxi is the identity") {
  for (const AnisotropyFunction* g : {&kIso, &kQuad, &kLens, &kProduct}) {
    const auto w = wulff_surface(*g, 1.0);
    const GeometryFields f = fields_at(w, *g, interior_samples(w, 60, 9));
    for (const FieldSample& s : f.samples) {
      if (s.flagged) continue;
      CHECK((s.dxi - Mat2::Identity()).norm() < 1e-8);
      CHECK(s.lambda == doctest::Approx(-2.0).epsilon(1e-8));
      CHECK(s.det_dxi == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("quadratic energy on 2W has Lambda = -1") {
  const auto w = wulff_surface(kQuad, 2.0);
  for (const FieldSample& s : fields_at(w, kQuad, interior_samples(w, 50, 2)).samples) {
    CHECK(s.lambda == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("isotropic ellipsoid matches closed-form curvatures") {
  const Vec3 ax(1, 1, 2);
  const auto e = make_ellipsoid(ax);
  for (const FieldSample& s : fields_at(e, kIso, interior_samples(e, 100, 6)).samples) {
    const EllipsoidCurvature c = ellipsoid_curvature(ax, s.x);
    CHECK(s.k_sigma == doctest::Approx(c.k).epsilon(1e-9));
    CHECK(s.lambda == doctest::Approx(c.lambda).epsilon(1e-9));
    CHECK(s.lambda_alt == doctest::Approx(c.lambda).epsilon(1e-6));
  }
}

TEST_CASE("frame rotation leaves invariants unchanged") {
  const auto e = make_ellipsoid(Vec3(1, 1.5, 2));
  const auto samples = interior_samples(e, 40, 3);
  FieldOptions rot;
  rot.frame_rotation = 1.1;
  const auto a = fields_at(e, kQuad, samples);
  const auto b = fields_at(e, kQuad, samples, rot);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(a.samples[i].lambda == doctest::Approx(b.samples[i].lambda).epsilon(1e-12));
    CHECK(a.samples[i].det_dxi == doctest::Approx(b.samples[i].det_dxi).epsilon(1e-12));
    CHECK((a.samples[i].dnu - a.samples[i].dnu.transpose()).norm() < 1e-8);
    CHECK(a.samples[i].det_dxi == doctest::Approx(a.samples[i].k_sigma / a.samples[i].kw).epsilon(1e-8));
    CHECK(a.samples[i].lambda * a.samples[i].lambda - 4 * a.samples[i].det_dxi >= -1e-10);
  }
}

TEST_CASE("energy and volume of spheres and W") {
  const auto s = make_sphere(1.0);
  CHECK(energy(s, kIso, 64) == doctest::Approx(4 * kPi).epsilon(1e-6));
  CHECK(volume(s, 64) == doctest::Approx(4 * kPi / 3).epsilon(1e-6));
  for (double r : {0.3, 1.0, 2.5}) {
    const auto sr = make_sphere(r, Vec3(0.2, -0.1, 0.4));
    const double f = energy(sr, kIso), v = volume(sr);
    CHECK(f * f * f / (9 * v * v) == doctest::Approx(4 * kPi).epsilon(1e-9));
  }
  CHECK(volume(wulff_surface(kQuad, 1.0)) == doctest::Approx(8 * kPi / 3).epsilon(1e-9));
  CHECK_THROWS_AS(volume(build_surface(solve_profile(ProductWulff::make(PlanarSupport::circle(),
                                                                           PlanarSupport::circle()),
                                                       ProfileRequest{}),
                                         PlanarSupport::circle())),
                  DomainError);
}

TEST_CASE("volume agrees with the divergence theorem on a mesh") {
  const auto e = make_ellipsoid(Vec3(1, 1.5, 2));
  // Inscribed triangles lose volume at second order in the edge length.
  const double e1 = volume(e) - surface_mesh(e, 80).volume();
  const double e2 = volume(e) - surface_mesh(e, 160).volume();
  CHECK(e2 > 0.0);
  CHECK(e2 <= 1e-3 * volume(e));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(volume(e) == doctest::Approx(4 * kPi / 3 * 3.0).epsilon(1e-10));
}

TEST_CASE("scaling laws") {
  const auto base = make_ellipsoid(Vec3(1, 1.5, 2));
  const double f0 = energy(base, kQuad), v0 = volume(base);
  const auto samples = interior_samples(base, 20, 1);
  const auto l0 = fields_at(base, kQuad, samples);
  for (double r : {0.5, 2.0, 7.0}) {
    const auto sc = scaled(base, r);
    CHECK(energy(sc, kQuad) == doctest::Approx(r * r * f0).epsilon(1e-8));
    CHECK(volume(sc) == doctest::Approx(r * r * r * v0).epsilon(1e-8));
    const auto l = fields_at(sc, kQuad, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      CHECK(l.samples[i].lambda == doctest::Approx(l0.samples[i].lambda / r).epsilon(1e-8));
    }
  }
}

TEST_CASE("orientation flip reverses Lambda on the sphere") {
  auto s = make_sphere(1.0);
  for (auto& p : s.patches) p.orientation = -p.orientation;
  for (const FieldSample& f : fields_at(s, kIso, interior_samples(s, 20, 5)).samples) {
    CHECK(f.lambda == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.nu.dot(f.x) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("finite-difference and analytic chart derivatives agree") {
  const ChartPtr analytic = EllipsoidChart::axes(Vec3(1, 1.5, 2));
  const FunctionChart fd([analytic](double s, double t) { return analytic->position(s, t); }, "copy");
  for (double s : {0.4, 1.3, 2.6}) {
    for (double t : {0.2, 3.0}) {
      const ChartFirst a = analytic->first(s, t), b = fd.first(s, t);
      const ChartSecond a2 = analytic->second(s, t), b2 = fd.second(s, t);
      CHECK((a.xs - b.xs).norm() < 1e-10);
      CHECK((a.xt - b.xt).norm() < 1e-10);
      CHECK((a2.xss - b2.xss).norm() < 1e-8);
      CHECK((a2.xst - b2.xst).norm() < 1e-8);
      CHECK((a2.xtt - b2.xtt).norm() < 1e-8);
    }
  }
}

TEST_CASE("Jacobi operator on the unit sphere") {
  const auto s = make_sphere(1.0);
  const ParametricPatch& p = s.patches[0];
  ScalarField one{[](double, double) { return 1.0; }, {}};
  // Degree-one harmonic x1 = sin(s) cos(t): Delta psi = -2 psi, <dxi, dnu> = 2.
  ScalarField x1{[](double a, double b) { return std::sin(a) * std::cos(b); }, {}};
  ScalarField mix{[](double a, double b) { return 2.0 - 3.0 * std::sin(a) * std::cos(b); }, {}};
  for (const SamplePoint& sp : interior_samples(s, 20, 8, 0.1)) {
    CHECK(jacobi_apply(s, kIso, one, sp) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(std::abs(jacobi_apply(s, kIso, x1, sp)) < 1e-6);
    const double lin = 2.0 * jacobi_apply(s, kQuad, one, sp) - 3.0 * jacobi_apply(s, kQuad, x1, sp);
    CHECK(jacobi_apply(s, kQuad, mix, sp) == doctest::Approx(lin).epsilon(1e-8));
  }
  CHECK_THROWS_AS(jacobi_apply(s, kIso, one, SamplePoint{0, p.s0 + 1e-6, 1.0, 1.0}), DomainError);
}

TEST_CASE("equilibrium check") {
  for (double r : {0.5, 1.0, 3.0}) {
    const EquilibriumReport e = equilibrium_check(wulff_surface(kQuad, r), kQuad);
    CHECK(e.pass());
    CHECK(e.lambda_mean == doctest::Approx(-2.0 / r).epsilon(1e-9));
  }
  const EquilibriumReport bad = equilibrium_check(make_ellipsoid(Vec3(1, 1, 2)), kIso);
  CHECK_FALSE(bad.lambda_constant);
  CHECK_FALSE(bad.pass());
  const EquilibriumReport lens = equilibrium_check(wulff_surface(kLens, 1.0), kLens);
  CHECK(lens.pass());
  CHECK(lens.edge_max_xi_jump < 1e-8);
}

TEST_CASE("degree of the Gauss map") {
  CHECK(degree_of_gauss_map(make_sphere(1.0)).raw == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(degree_of_gauss_map(make_torus(2.0, 0.5)).raw) < 1e-4);
  for (const AnisotropyFunction* g : {&kQuad, &kLens, &kProduct}) {
    const DegreeResult d = degree_of_gauss_map(wulff_surface(*g, 1.0));
    CHECK(d.rounded == 1);
    CHECK(std::abs(d.raw - 1.0) < 1e-4);
  }
  CHECK_THROWS_AS(degree_of_gauss_map(build_surface(
                      solve_profile(ProductWulff::make(PlanarSupport::circle(), PlanarSupport::circle()),
                                    ProfileRequest{}),
                      PlanarSupport::circle())),
                  DomainError);
}

TEST_CASE("surfaces validate and count edges") {
  CHECK_NOTHROW(make_sphere(1.0).validate());
  CHECK(make_sphere(1.0).geometric_edge_count() == 0);
  const auto lw = wulff_surface(kLens, 1.0);
  CHECK(lw.closed);
  CHECK(lw.geometric_edge_count() == 1);
  const auto pw = wulff_surface(kProduct, 1.0);
  CHECK(pw.geometric_edge_count() == 3);
}
