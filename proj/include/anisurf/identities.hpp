#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/chart.hpp"
#include "anisurf/fields.hpp"
#include "anisurf/surface.hpp"

#include <array>
#include <string>
#include <vector>

namespace anisurf {

struct PointwiseResiduals {
  std::vector<SamplePoint> at;
  std::vector<double> values;
  double max = 0.0;
  double mean = 0.0;
  int excluded = 0;
  void add(const SamplePoint& p, double v);
  void finish();
};

/// Frobenius norm of J dxi + dxi^T J + Lambda J, J the 90 degree rotation.
double rep_residual(const Mat2& dxi, double lambda);
/// rep_residual for A dnu with Lambda = -tr(A dnu).
double rep_residual(const Mat2& a, const Mat2& dnu);

PointwiseResiduals check_rep(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                             const std::vector<SamplePoint>& samples);

struct JacobiGammaResult {
  /// |L[gamma] - (Lambda^2 - 2 K/K_W)|; an identity only where grad Lambda . D gamma = 0.
  PointwiseResiduals lemma;
  /// |L[gamma] + grad Lambda . D gamma - (Lambda^2 - 2 K/K_W)|.
  PointwiseResiduals general;
  /// |dLambda/deps on X + eps xi - (L[gamma] + grad Lambda . D gamma)|.
  PointwiseResiduals delta_lambda;
  double max_transport = 0.0;  // max |grad Lambda . D gamma|
};

struct JacobiGammaOptions {
  double step = 1e-4;   // stencil of the divergence and of grad Lambda
  double eps = 1e-3;    // displacement for the dLambda/deps cross-check
  bool delta_lambda = true;
};

JacobiGammaResult check_jacobi_gamma(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                     const std::vector<SamplePoint>& samples,
                                     const JacobiGammaOptions& opt = {});

enum class DivIdentity { div1, div2 };
std::string to_string(DivIdentity d);

/// Tangent field of the identity at (s, t): gamma X - q xi for div1 and
/// (dxi + Lambda I) applied to it for div2; `rhs` receives the right-hand
/// side 2 gamma + Lambda q, resp. 2 q det(dxi) + Lambda gamma.
Vec3 div_field(const ParametricPatch& patch, const AnisotropyFunction& gamma, DivIdentity which,
               double s, double t, double* rhs = nullptr);

struct DivResult {
  PointwiseResiduals pointwise;
  double face_integral = 0.0;  // sum over faces of the integral of the divergence
  double boundary_flux = 0.0;  // sum over faces of the boundary flux
  double max_face_flux_residual = 0.0;
  double scale = 0.0;  // integral of |rhs|, for relative comparison
};

DivResult check_div(const PiecewiseSurface& surf, const AnisotropyFunction& gamma, DivIdentity which,
                    const std::vector<SamplePoint>& samples, double h = 1e-4, int order = 32);

struct ClosedIntegrals {
  double i1 = 0.0;  // integral of 2 gamma + Lambda q
  double i2 = 0.0;  // integral of 2 q det(dxi) + Lambda gamma
  double energy = 0.0;
  double max_xi_jump = 0.0;
  bool hypothesis_ok = true;  // xi continuous across every edge
};

ClosedIntegrals check_closed_integrals(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                       int order = 32);

struct FirstVariation {
  double numeric = 0.0;   // (F[X + eps dX] - F[X - eps dX]) / 2 eps
  double interior = 0.0;  // sum of integrals of Lambda dX . nu
  double boundary = 0.0;  // sum of boundary integrals of (xi x dX) . dX
  double formula = 0.0;   // -(interior - boundary)
  double residual = 0.0;  // |numeric - formula|
};

/// Boundary integrals run clockwise seen from the normal (see README).
FirstVariation check_first_variation(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                     const VariationField& field, double eps = 1e-5,
                                     int order = 32);

struct ExpansionFit {
  std::vector<double> grid;
  std::vector<double> volumes;
  std::vector<double> energies;
  std::array<double, 4> v{};         // fitted V(eps) coefficients
  std::array<double, 3> f{};         // fitted F(eps) coefficients
  std::array<double, 4> v_target{};  // integrals of the volume density terms
  std::array<double, 3> f_target{};
  double fit_residual_v = 0.0;  // max relative misfit over the grid
  double fit_residual_f = 0.0;
  double lambda_mean = 0.0;
  bool lambda_constant = false;
  double ratio1 = 0.0;  // v1/v0
  double ratio2 = 0.0;  // v2/v0
  double s1 = 0.0;
  double s2 = 0.0;
  /// eps^2 coefficient of s(eps)^2 F(eps) from the fitted coefficients, and
  /// the integral of gamma (K/K_W - Lambda^2/4) it should equal.
  double normalized_second = 0.0;
  double normalized_second_target = 0.0;
};

ExpansionFit expansion_fit(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                           const std::vector<double>& grid = {-0.1, -0.05, -0.025, 0.0, 0.025,
                                                              0.05, 0.1},
                           int order = 32);

struct SecondVariation {
  double delta2 = 0.0;         // integral of gamma (K/K_W - Lambda^2/4)
  double pointwise_min = 0.0;  // min of Lambda^2/4 - K/K_W
  double energy = 0.0;
};

/// DomainError unless the surface passes equilibrium_check.
SecondVariation second_variation(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                 int order = 32, const EquilibriumOptions& eq = {});

struct Isoperimetric {
  double ratio = 0.0;  // F^3 / (9 V^2)
  double wulff_energy = 0.0;
  double gap = 0.0;
  double energy = 0.0;
  double volume = 0.0;
};

/// DomainError when V <= 0.
Isoperimetric isoperimetric_ratio(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                  double wulff_energy, int order = 32);

/// F[W] from the parametric Wulff shape.
double wulff_energy(const AnisotropyFunction& gamma, int order = 48);

/// Integral of gamma det(dxi): the energy of the Cahn-Hoffman image counted
/// with multiplicity.
double gauss_image_energy(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                          int order = 32);

}  // namespace anisurf
