#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisurf/planar.hpp"

#include <cmath>

using namespace anisurf;

TEST_CASE("circle support") {
  const PlanarSupport c = PlanarSupport::circle(1.5);
  const PlanarWulff w = PlanarWulff::build(c);
  CHECK(w.smooth());
  REQUIRE(w.arcs().size() == 1);
  CHECK(w.arcs()[0].length() == doctest::Approx(2 * kPi));
  for (double th : {0.0, 0.7, 2.5, -1.1}) {
    CHECK((w.point(th) - 1.5 * Vec2(std::cos(th), std::sin(th))).norm() < 1e-14);
  }
  CHECK(PlanarConvexCurve::from_support(c).enclosed_area() == doctest::Approx(kPi * 2.25).epsilon(1e-5));
}

TEST_CASE("ellipse support traces the ellipse") {
  const double a = 2.0, b = 0.5;
  const PlanarSupport e = PlanarSupport::ellipse(a, b);
  for (double th = 0.0; th < 2 * kPi; th += 0.37) {
    CHECK(e(th) == doctest::Approx(std::sqrt(a * a * std::cos(th) * std::cos(th) +
                                             b * b * std::sin(th) * std::sin(th))));
    const Vec2 p = e.envelope_point(th);
    CHECK(p.x() * p.x() / (a * a) + p.y() * p.y() / (b * b) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(PlanarConvexCurve::from_support(e).enclosed_area() == doctest::Approx(kPi * a * b).epsilon(1e-5));
}

TEST_CASE("support jet matches differences") {
  const PlanarSupport s = PlanarSupport::fourier(1.0, {0.05, 0.02}, {0.01, 0.0, 0.03});
  const double h = 1e-4;
  for (double th : {0.1, 1.3, 4.0}) {
    const SupportJet j = s.jet(th);
    CHECK(j.d1 == doctest::Approx((s(th + h) - s(th - h)) / (2 * h)).epsilon(1e-7));
    CHECK(j.d2 == doctest::Approx((s(th + h) - 2 * s(th) + s(th - h)) / (h * h)).epsilon(1e-5));
    CHECK(j.d3 == doctest::Approx((s.jet(th + h).d2 - s.jet(th - h).d2) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("corner counts") {
  // h'' + h = 1 + b (1 - m^2) cos(m theta) is negative somewhere iff b > 1/(m^2 - 1).
  CHECK(PlanarWulff::build(PlanarSupport::trig(3, 0.1)).smooth());
  CHECK(PlanarWulff::build(PlanarSupport::trig(3, 0.2)).corners().size() == 3);
  CHECK(PlanarWulff::build(PlanarSupport::trig(4, 0.1)).corners().size() == 4);
  // lens: h'' + h = 1 + beta cos(2 theta) + beta cos^2 ... negative near theta = 0, pi for beta > 1.
  CHECK(PlanarWulff::build(PlanarSupport::lens(0.5)).smooth());
  CHECK(PlanarWulff::build(PlanarSupport::lens(2.0)).corners().size() == 2);
}

TEST_CASE("corners join adjacent arcs") {
  for (const PlanarSupport& s : {PlanarSupport::trig(3, 0.2), PlanarSupport::lens(2.0)}) {
    const PlanarWulff w = PlanarWulff::build(s);
    for (const PlanarCorner& c : w.corners()) {
      CHECK((w.point(c.theta_before) - c.point).norm() < 1e-10);
      CHECK((w.point(c.theta_after) - c.point).norm() < 1e-10);
      CHECK(c.theta_after > c.theta_before);
    }
    for (const NormalArc& a : w.arcs()) {
      const int n = 50;
      for (int k = 0; k <= n; ++k) CHECK(s.jet(a.lo + a.length() * k / n).rho() >= -1e-9);
    }
  }
}

TEST_CASE("attained normals lie on the supporting lines") {
  const PlanarSupport s = PlanarSupport::trig(3, 0.2);
  const PlanarWulff w = PlanarWulff::build(s);
  for (const NormalArc& a : w.arcs()) {
    const Vec2 p = w.point(0.5 * (a.lo + a.hi));
    for (double th = 0.0; th < 2 * kPi; th += 0.01) {
      CHECK(p.dot(Vec2(std::cos(th), std::sin(th))) <= s(th) + 1e-12);
    }
  }
}

TEST_CASE("convex curve parameter is monotone in the normal angle") {
  const PlanarConvexCurve c = PlanarConvexCurve::from_support(PlanarSupport::trig(3, 0.2));
  double prev = c.normal_angle(0.0);
  for (int k = 1; k < 400; ++k) {
    const double th = c.normal_angle(2 * kPi * k / 400);
    CHECK(th >= prev - 1e-12);
    prev = th;
  }
  CHECK(c.corner_params().size() == 3);
}
