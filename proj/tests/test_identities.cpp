#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisurf/identities.hpp"
#include "anisurf/report.hpp"

#include <cmath>
#include <random>

using namespace anisurf;

namespace {

const AnisotropyFunction kIso = AnisotropyFunction::isotropic();
const AnisotropyFunction kQuad = AnisotropyFunction::quadratic(Vec3(1, 1, 4).asDiagonal());
const AnisotropyFunction kLens = AnisotropyFunction::lens(2.0);
const AnisotropyFunction kProduct =
    AnisotropyFunction::product(PlanarSupport::lens(0.5), PlanarSupport::trig(3, 0.2));

Mat2 random_symmetric(std::mt19937_64& rng, bool positive) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Mat2 m;
  m << u(rng), u(rng), 0.0, u(rng);
  m(1, 0) = m(0, 1);
  if (positive) m = m * m.transpose() + 0.1 * Mat2::Identity();
  return m;
}

const CheckRecord& find(const VerificationReport& r, const std::string& name) {
  for (const CheckRecord& c : r.checks) {
    if (c.name == name) return c;
  }
  FAIL("missing check " << name);
  return r.checks.front();
}

}  // namespace

TEST_CASE("rep identity") {
  CHECK(rep_residual(Mat2::Identity(), -2.0) == 0.0);
  std::mt19937_64 rng(42);
  for (int k = 0; k < 1000; ++k) {
    const Mat2 a = random_symmetric(rng, true);
    const Mat2 dnu = random_symmetric(rng, false);
    CHECK(rep_residual(a, dnu) <= 1e-12 * std::max(1.0, (a * dnu).norm()));
  }
  const auto e = make_ellipsoid(Vec3(1, 1.5, 2));
  CHECK(check_rep(e, kQuad, interior_samples(e, 200, 1)).max <= 1e-8);
}

TEST_CASE("Jacobi operator applied to gamma") {
  const auto sphere = make_sphere(1.0);
  const auto iso_s = check_jacobi_gamma(sphere, kIso, interior_samples(sphere, 30, 3));
  CHECK(iso_s.lemma.max < 1e-6);

  // Isotropic ellipsoid, samples on the equator.
  const auto e = make_ellipsoid(Vec3(1, 1, 2));
  std::vector<SamplePoint> equator;
  for (double t : {0.3, 1.7, 4.0}) equator.push_back({0, kPi / 2, t, 1.0});
  const auto iso_e = check_jacobi_gamma(e, kIso, equator);
  CHECK(iso_e.lemma.max <= 1e-5);
  CHECK(iso_e.max_transport < 1e-8);

  // On W Lambda is constant, so the relation holds for anisotropic gamma too.
  const auto w = wulff_surface(kQuad, 1.0);
  const auto qw = check_jacobi_gamma(w, kQuad, interior_samples(w, 30, 4));
  CHECK(qw.lemma.max <= 1e-5);
  CHECK(qw.delta_lambda.max <= 1e-5);
}

TEST_CASE("Jacobi relation off equilibrium carries the transport term") {
  // Anisotropic gamma on the round sphere: Lambda varies and grad Lambda . D gamma
  // does not vanish. The general relation holds; the short one is off by exactly
  // that term.
  const auto sphere = make_sphere(1.0);
  const auto samples = interior_samples(sphere, 40, 7, 0.05);
  const auto r = check_jacobi_gamma(sphere, kQuad, samples);
  CHECK(r.general.max <= 1e-5);
  CHECK(r.delta_lambda.max <= 1e-5);
  CHECK(r.max_transport > 1.0);
  CHECK(r.lemma.max == doctest::Approx(r.max_transport).epsilon(1e-4));
}

TEST_CASE("divergence identities") {
  const auto sphere = make_sphere(1.0);
  for (DivIdentity w : {DivIdentity::div1, DivIdentity::div2}) {
    CHECK(check_div(sphere, kIso, w, interior_samples(sphere, 30, 1)).pointwise.max < 1e-9);
  }
  const auto e = make_ellipsoid(Vec3(1, 1, 2));
  const auto samples = interior_samples(e, 200, 2);
  for (DivIdentity w : {DivIdentity::div1, DivIdentity::div2}) {
    const DivResult d = check_div(e, kIso, w, samples);
    CHECK(d.pointwise.max <= 1e-5);
    CHECK(d.max_face_flux_residual <= 1e-6 * d.scale);
    const DivResult q = check_div(e, kQuad, w, samples);
    CHECK(q.pointwise.max <= 1e-5);
  }
}

TEST_CASE("divergence residual decays like h^2") {
  const auto e = make_ellipsoid(Vec3(1, 1, 2));
  const auto samples = interior_samples(e, 20, 5, 0.1);
  for (DivIdentity w : {DivIdentity::div1, DivIdentity::div2}) {
    const double r1 = check_div(e, kIso, w, samples, 8e-3, 2).pointwise.max;
    const double r2 = check_div(e, kIso, w, samples, 4e-3, 2).pointwise.max;
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.15));
  }
}

TEST_CASE("closed integrals") {
  for (const AnisotropyFunction* g : {&kIso, &kQuad, &kLens, &kProduct}) {
    for (double r : {0.5, 1.0, 2.0}) {
      const auto w = wulff_surface(*g, r);
      const ClosedIntegrals c = check_closed_integrals(w, *g);
      const double f = energy(w, *g);
      CHECK(c.hypothesis_ok);
      CHECK(std::abs(c.i1) <= 1e-8 * f);
      CHECK(std::abs(c.i2) <= 1e-8 * f);
    }
  }
  // Minkowski: the integral of 1 - H q vanishes on any closed surface.
  const auto e = make_ellipsoid(Vec3(1, 1, 2));
  const ClosedIntegrals c = check_closed_integrals(e, kIso);
  CHECK(std::abs(c.i1) <= 1e-6 * energy(e, kIso));
  CHECK(std::abs(check_closed_integrals(make_torus(2, 0.5), kIso).i1) <= 1e-6 * energy(make_torus(2, 0.5), kIso));
}

TEST_CASE("closed integrals need a closed surface") {
  auto h = make_sphere(1.0);
  h.closed = false;
  CHECK_THROWS_AS(check_closed_integrals(h, kIso), DomainError);
}

TEST_CASE("first variation") {
  const VariationField dil = [](const Chart& c, double s, double t) { return c.position(s, t); };
  const VariationField tr = [](const Chart&, double, double) { return Vec3(0.3, -0.5, 0.8); };
  for (const AnisotropyFunction* g : {&kIso, &kQuad, &kLens}) {
    const auto e = make_ellipsoid(Vec3(1, 1.5, 2));
    const double f = energy(e, *g);
    const FirstVariation d = check_first_variation(e, *g, dil);
    CHECK(d.numeric == doctest::Approx(2 * f).epsilon(1e-6));
    CHECK(d.residual <= 1e-6 * f);
    const FirstVariation t = check_first_variation(e, *g, tr);
    CHECK(std::abs(t.numeric) <= 1e-6 * f);
    CHECK(t.residual <= 1e-6 * f);
  }
}

TEST_CASE("first variation with a boundary term") {
  // Upper hemisphere: translation changes F only through the rim.
  auto h = make_sphere(1.0);
  h.patches[0].s1 = kPi / 2;
  h.patches[0].collapsed[1] = false;
  h.closed = false;
  const VariationField tr = [](const Chart&, double, double) { return Vec3(0.2, 0.1, 1.0); };
  const VariationField mixed = [](const Chart& c, double s, double t) {
    return Vec3(c.position(s, t) + Vec3(0.2, 0.1, 1.0));
  };
  for (const AnisotropyFunction* g : {&kIso, &kQuad, &kLens}) {
    // F is translation invariant, so the rim term cancels the interior one.
    const FirstVariation d = check_first_variation(h, *g, tr);
    CHECK(std::abs(d.boundary) > 1e-3);
    CHECK(std::abs(d.numeric) <= 1e-8);
    CHECK(d.residual <= 1e-8 * std::abs(d.boundary));
    const FirstVariation v = check_first_variation(h, *g, mixed);
    CHECK(std::abs(v.boundary) > 1e-3);
    CHECK(v.residual <= 1e-6 * std::abs(v.numeric));
  }
}

TEST_CASE("first variation of a bump normal field") {
  const auto s = make_sphere(1.0);
  const VariationField bump = [](const Chart& c, double a, double b) {
    const double r2 = (a - 1.2) * (a - 1.2) + (b - 2.0) * (b - 2.0);
    const double phi = r2 < 0.25 ? std::exp(-1.0 / (0.25 - r2)) : 0.0;
    return Vec3(phi * normal_jet(c, a, b, 1).nu);
  };
  // The bump is narrow in parameter space; order 32 does not resolve it.
  const FirstVariation d = check_first_variation(s, kQuad, bump, 1e-5, 96);
  CHECK(std::abs(d.numeric) > 1e-6);
  CHECK(d.residual <= 1e-5 * std::abs(d.numeric));
}

TEST_CASE("expansion on W") {
  const ExpansionFit e = expansion_fit(wulff_surface(kQuad, 1.0), kQuad);
  CHECK(e.ratio1 == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(e.ratio2 == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(e.s1 == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(e.s2 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.f[1] / e.f[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(e.fit_residual_v <= 1e-9);
  CHECK(e.fit_residual_f <= 1e-9);
  for (int k = 0; k < 4; ++k) CHECK(e.v[k] == doctest::Approx(e.v_target[k]).scale(e.v[0]).epsilon(1e-6));
  CHECK(e.lambda_constant);

  const ExpansionFit half = expansion_fit(wulff_surface(kLens, 0.5), kLens);
  CHECK(half.ratio1 == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("expansion off equilibrium still matches the densities") {
  // (1, 1, 2) would be the Wulff shape of kQuad.
  const auto e = make_ellipsoid(Vec3(1, 1.5, 2));
  const ExpansionFit x = expansion_fit(e, kQuad);
  CHECK_FALSE(x.lambda_constant);
  for (int k = 0; k < 4; ++k) CHECK(x.v[k] == doctest::Approx(x.v_target[k]).scale(x.v[0]).epsilon(1e-6));
  for (int k = 0; k < 3; ++k) CHECK(x.f[k] == doctest::Approx(x.f_target[k]).scale(x.f[0]).epsilon(1e-6));
}

TEST_CASE("second variation") {
  for (double r : {0.5, 1.0, 2.0}) {
    const auto w = wulff_surface(kQuad, r);
    const SecondVariation s = second_variation(w, kQuad);
    CHECK(std::abs(s.delta2) <= 1e-8 * s.energy);
    CHECK(s.pointwise_min >= -1e-10);
  }
  CHECK_THROWS_AS(second_variation(make_ellipsoid(Vec3(1, 1, 2)), kIso), DomainError);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const Mat2 m = random_symmetric(rng, true) * random_symmetric(rng, false);
    CHECK(m.trace() * m.trace() / 4 - m.determinant() >= -1e-12);
  }
}

TEST_CASE("isoperimetric ratio") {
  const double fw = wulff_energy(kIso);
  CHECK(fw == doctest::Approx(4 * kPi).epsilon(1e-9));
  for (double r : {0.5, 3.0}) {
    CHECK(std::abs(isoperimetric_ratio(make_sphere(r), kIso, fw).gap) <= 1e-9 * fw);
  }
  CHECK(isoperimetric_ratio(make_ellipsoid(Vec3(1, 1, 2)), kIso, fw).gap > 1e-3);
  const double fq = wulff_energy(kQuad);
  CHECK(std::abs(isoperimetric_ratio(wulff_surface(kQuad, 1.0), kQuad, fq).gap) <= 1e-6 * fq);
  auto inside_out = make_sphere(1.0);
  for (auto& p : inside_out.patches) p.orientation = -p.orientation;
  CHECK_THROWS_AS(isoperimetric_ratio(inside_out, kIso, fw), DomainError);
}

TEST_CASE("Gauss image energy counts the degree") {
  const double fl = wulff_energy(kLens);
  CHECK(gauss_image_energy(wulff_surface(kLens, 1.0), kLens) == doctest::Approx(fl).epsilon(1e-6));
  CHECK(gauss_image_energy(make_ellipsoid(Vec3(1, 1.5, 2)), kQuad) ==
        doctest::Approx(wulff_energy(kQuad)).epsilon(1e-6));
  CHECK(std::abs(gauss_image_energy(make_torus(2, 0.5), kQuad, 96)) < 1e-6);
}

TEST_CASE("verification report: isotropic sphere passes everything") {
  const VerificationReport r = run_verification(make_sphere(1.0), kIso, {});
  CHECK(r.checks.size() == check_names().size());
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    CHECK(r.checks[i].name == check_names()[i]);
    CHECK(r.checks[i].status == CheckStatus::pass);
  }
  CHECK(r.passed());
}

TEST_CASE("verification report: quadratic W passes with equality cases") {
  const VerificationReport r = run_verification(wulff_surface(kQuad, 1.0), kQuad, {});
  for (const CheckRecord& c : r.checks) CHECK_MESSAGE(c.status == CheckStatus::pass, c.name);
  CHECK(std::abs(find(r, "second_variation").integral_residual.value()) <= 1e-8);
  CHECK(std::abs(find(r, "isoperimetric").integral_residual.value()) <= 1e-6);
}

TEST_CASE("verification report: isotropic ellipsoid") {
  const VerificationReport r = run_verification(make_ellipsoid(Vec3(1, 1, 2)), kIso, {});
  CHECK(find(r, "equilibrium").status == CheckStatus::fail);
  CHECK(find(r, "closed_integrals").status == CheckStatus::pass);
  CHECK(find(r, "second_variation").status == CheckStatus::not_applicable);
  CHECK(find(r, "isoperimetric").status == CheckStatus::pass);
  CHECK(r.has_failures());
  const Json j = r.to_json();
  CHECK(j["summary"]["verdict"] == "fail");
  CHECK(j["checks"].size() == check_names().size());
}

TEST_CASE("verdicts do not depend on the quadrature order") {
  for (const AnisotropyFunction* g : {&kIso, &kQuad, &kLens}) {
    VerifyOptions lo;
    lo.quadrature = 8;
    lo.checks = {"closed_integrals", "equilibrium", "degree"};
    VerifyOptions hi = lo;
    hi.quadrature = 32;
    const auto w = wulff_surface(*g, 1.0);
    const auto a = run_verification(w, *g, lo), b = run_verification(w, *g, hi);
    REQUIRE(a.checks.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.checks[i].status == b.checks[i].status);
  }
}

TEST_CASE("report serialization is deterministic") {
  VerifyOptions o;
  o.samples = 30;
  const auto e = make_ellipsoid(Vec3(1, 1, 2));
  const auto a = run_verification(e, kQuad, o), b = run_verification(e, kQuad, o);
  CHECK(json_text(a.to_json()) == json_text(b.to_json()));
  CHECK(a.residual_csv() == b.residual_csv());
  CHECK(a.residual_csv().rfind("check,patch,s,t,residual\r\n", 0) == 0);
}

TEST_CASE("merge reports") {
  VerifyOptions o;
  o.checks = {"rep", "degree"};
  const Json a = run_verification(make_sphere(1.0), kIso, o).to_json();
  const Json b = run_verification(make_ellipsoid(Vec3(1, 1, 2)), kIso, o).to_json();
  const Json m = merge_reports({{"b.json", b}, {"a.json", a}});
  REQUIRE(m["checks"].size() == 4);
  CHECK(m["checks"][0]["name"] == "degree");
  CHECK(m["checks"][0]["source"] == "a.json");
  CHECK(m["summary"]["verdict"] == "pass");
  CHECK_THROWS_AS(merge_reports({{"x", Json::object()}}), DomainError);
}
