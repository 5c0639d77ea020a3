#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisurf/anisotropy.hpp"
#include "anisurf/common.hpp"
#include "anisurf/wulff.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace anisurf;

namespace {

std::vector<AnisotropyFunction> families() {
  return {AnisotropyFunction::isotropic(), AnisotropyFunction::quadratic(Vec3(1, 1, 4).asDiagonal()),
          AnisotropyFunction::lens(0.5), AnisotropyFunction::lens(2.0),
          AnisotropyFunction::product(PlanarSupport::lens(2.0), PlanarSupport::trig(3, 0.2))};
}

std::vector<Vec3> random_vectors(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec3> out;
  while (static_cast<int>(out.size()) < n) {
    Vec3 y(g(rng), g(rng), g(rng));
    if (y.norm() > 1e-3) out.push_back(y);
  }
  return out;
}

// Closed-form gradient of sqrt(Y^T Q Y).
Vec3 quadratic_gradient(const Mat3& q, const Vec3& y) { return q * y / std::sqrt(y.dot(q * y)); }

}  // namespace

TEST_CASE("isotropic extension is the norm") {
  const auto g = AnisotropyFunction::isotropic();
  const ExtensionValue e = gamma_extend(g, Vec3(0, 0, 2));
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK((e.gradient - Vec3(0, 0, 1)).norm() < 1e-14);
}

TEST_CASE("zero vector is a domain error") {
  CHECK_THROWS_AS(gamma_extend(AnisotropyFunction::isotropic(), Vec3::Zero()), DomainError);
}

TEST_CASE("quadratic extension matches the closed form and differences") {
  const Mat3 q = Vec3(1, 1, 4).asDiagonal();
  const auto g = AnisotropyFunction::quadratic(q);
  const ExtensionValue e = gamma_extend(g, Vec3::UnitZ());
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-14));
  CHECK((e.gradient - Vec3(0, 0, 2)).norm() < 1e-13);
  for (const Vec3& y : random_vectors(50, 3)) {
    const Vec3 grad = gamma_extend(g, y).gradient;
    CHECK((grad - quadratic_gradient(q, y)).norm() < 1e-12);
    // Independent check by central differences of the value.
    Vec3 fd;
    const double h = 1e-6 * y.norm();
    for (int i = 0; i < 3; ++i) {
      Vec3 d = Vec3::Zero();
      d[i] = h;
      fd[i] = (gamma_extend(g, y + d).value - gamma_extend(g, y - d).value) / (2 * h);
    }
    CHECK((grad - fd).norm() < 1e-7);
  }
}

TEST_CASE("Euler relation and degree-zero gradient for every family") {
  for (const auto& g : families()) {
    for (const Vec3& y : random_vectors(40, 11)) {
      const ExtensionValue e = gamma_extend(g, y);
      CHECK(std::abs(e.gradient.dot(y) - e.value) <= 1e-10 * e.value);
      const ExtensionValue e7 = gamma_extend(g, 7.3 * y);
      CHECK((e7.gradient - e.gradient).norm() <= 1e-12 * std::max(1.0, e.gradient.norm()));
      CHECK(e7.value == doctest::Approx(7.3 * e.value).epsilon(1e-13));
    }
  }
}

TEST_CASE("tangential gradient and xi . n = gamma") {
  for (const auto& g : families()) {
    for (const Vec3& y : random_vectors(40, 5)) {
      const Vec3 n = y.normalized();
      CHECK(std::abs(g.grad(n).dot(n)) < 1e-10);
      const CahnHoffmanPointData p = point_data(g, n);
      CHECK(std::abs(p.xi.dot(n) - g.eval(n)) < 1e-10);
      CHECK(g.eval(n) > 0.0);
    }
  }
}

TEST_CASE("point data: isotropic and quadratic oracles") {
  for (const Vec3& y : random_vectors(10, 8)) {
    const Vec3 n = y.normalized();
    const CahnHoffmanPointData p = point_data(AnisotropyFunction::isotropic(), n);
    CHECK((p.xi - n).norm() < 1e-14);
    CHECK((p.a - Mat2::Identity()).norm() < 1e-12);
    CHECK(p.kw == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.convex);
  }
  const CahnHoffmanPointData p =
      point_data(AnisotropyFunction::quadratic(Vec3(1, 1, 4).asDiagonal()), Vec3::UnitZ());
  CHECK((p.xi - Vec3(0, 0, 2)).norm() < 1e-13);
  CHECK(p.inv_mu[0] <= p.inv_mu[1]);
}

TEST_CASE("lens eigenvalues at the equator") {
  // Meridian gamma(theta) = 1 + beta sin^2 theta: gamma'' + gamma = 1 - beta at
  // theta = pi/2; the azimuthal eigenvalue gamma + cot(theta) gamma' = 1 + beta.
  for (double beta : {0.5, 2.0}) {
    const CahnHoffmanPointData p = point_data(AnisotropyFunction::lens(beta), Vec3::UnitX());
    CHECK(p.inv_mu[0] == doctest::Approx(1.0 - beta).epsilon(1e-9));
    CHECK(p.inv_mu[1] == doctest::Approx(1.0 + beta).epsilon(1e-9));
    CHECK(p.convex == (beta < 1.0));
  }
}

TEST_CASE("A is the tangential derivative of xi") {
  for (const auto& g : families()) {
    for (const Vec3& y : random_vectors(8, 21)) {
      const Vec3 n = y.normalized();
      const CahnHoffmanPointData p = point_data(g, n);
      const double h = 1e-4;
      for (int k = 0; k < 2; ++k) {
        const Vec3 e = k == 0 ? p.e1 : p.e2;
        auto xi = [&](double s) {
          const Vec3 m = (std::cos(s) * n + std::sin(s) * e);
          return point_data(g, m).xi;
        };
        const Vec3 d = (xi(h) - xi(-h)) / (2 * h);
        const Vec2 col(d.dot(p.e1), d.dot(p.e2));
        CHECK((col - p.a.col(k)).norm() < 1e-6 * std::max(1.0, p.a.norm()));
      }
    }
  }
}

TEST_CASE("sampled gamma reproduces a built-in") {
  const auto q = AnisotropyFunction::quadratic(Vec3(1, 2, 3).asDiagonal());
  const auto s = AnisotropyFunction::from_values([q](const Vec3& n) { return q.eval(n); }, "copy");
  for (const Vec3& y : random_vectors(10, 2)) {
    const Vec3 n = y.normalized();
    CHECK((point_data(s, n).xi - point_data(q, n).xi).norm() < 1e-8);
    CHECK((point_data(s, n).a - point_data(q, n).a).norm() < 1e-5);
  }
}

TEST_CASE("non-positive gamma is rejected") {
  CHECK_THROWS_AS(AnisotropyFunction::from_values([](const Vec3& n) { return n.z(); }, "bad"),
                  ConstructionError);
}

TEST_CASE("convexity scan") {
  const ConvexityReport iso = convexity_scan(AnisotropyFunction::isotropic(), 500);
  CHECK(iso.convex_everywhere());
  CHECK(iso.min_det == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(convexity_scan(AnisotropyFunction::lens(0.5), 2000).convex_everywhere());
  const ConvexityReport lens = convexity_scan(AnisotropyFunction::lens(2.0), 2000);
  CHECK_FALSE(lens.indefinite.empty());
  double min_abs_z = 1.0;
  for (const Vec3& n : lens.indefinite) min_abs_z = std::min(min_abs_z, std::abs(n.z()));
  CHECK(min_abs_z < 0.02);
  for (const Vec3& n : lens.positive) CHECK(std::abs(n.z()) > 0.05);
}

TEST_CASE("Wulff shape of the isotropic energy is the unit sphere") {
  const WulffShape w = wulff_construct(AnisotropyFunction::isotropic(), 5000);
  double dev = 0.0;
  for (const Vec3& v : w.mesh.vertices) dev = std::max(dev, std::abs(v.norm() - 1.0));
  CHECK(dev <= 5e-3);
  CHECK(w.energy == doctest::Approx(4 * kPi).epsilon(1e-6));
  CHECK(w.volume == doctest::Approx(4 * kPi / 3).epsilon(1e-6));
  CHECK(w.mesh.closed());
  CHECK(w.edges.empty());
}

TEST_CASE("Wulff shape of the quadratic energy is the ellipsoid") {
  const auto g = AnisotropyFunction::quadratic(Vec3(1, 1, 4).asDiagonal());
  const WulffShape w = wulff_construct(g, 20000);
  double dev = 0.0;
  // Sampson-type distance to x1^2 + x2^2 + x3^2/4 = 1 from the implicit form.
  for (const Vec3& v : w.mesh.vertices) {
    const double f = v.x() * v.x() + v.y() * v.y() + v.z() * v.z() / 4.0 - 1.0;
    const Vec3 grad(2 * v.x(), 2 * v.y(), v.z() / 2.0);
    dev = std::max(dev, std::abs(f) / grad.norm());
  }
  CHECK(dev <= 1e-2);
  CHECK(hausdorff_to_wulff(w, g) <= 1e-2);
  CHECK(w.volume == doctest::Approx(8 * kPi / 3).epsilon(1e-6));
}

TEST_CASE("Wulff Hausdorff error decreases with sampling") {
  const auto g = AnisotropyFunction::quadratic(Vec3(1, 1, 4).asDiagonal());
  double prev = 1e9;
  for (int n = 1000; n <= 32000; n *= 2) {
    const double d = hausdorff_to_wulff(wulff_construct(g, n), g);
    CHECK(d <= 1.1 * prev);
    prev = d;
  }
}

TEST_CASE("lens Wulff shape has an equatorial edge") {
  const auto g = AnisotropyFunction::lens(2.0);
  const WulffShape w = wulff_construct(g, 5000);
  REQUIRE_FALSE(w.edges.empty());
  double max_z = 0.0;
  for (const WulffEdgeCurve& e : w.edges) {
    for (const Vec3& p : e.points) max_z = std::max(max_z, std::abs(p.z()));
  }
  CHECK(max_z < 0.05);
  CHECK(support_excess(w, g) <= 1e-9);
  // Off the construction samples the polytope overshoots by O(spacing^2).
  CHECK(support_excess(w, g, 2000) <= 1e-2);
}

TEST_CASE("isoperimetric ratio of W equals F[W]") {
  for (const auto& g : families()) {
    const WulffShape w = wulff_construct(g, 2000);
    const double ratio = w.energy * w.energy * w.energy / (9 * w.volume * w.volume);
    CHECK(ratio == doctest::Approx(w.energy).epsilon(1e-6));
  }
}

TEST_CASE("support dominance of every W vertex") {
  for (const auto& g : families()) {
    const WulffShape w = wulff_construct(g, 3000);
    CHECK(support_excess(w, g) <= 1e-9);
  }
}
