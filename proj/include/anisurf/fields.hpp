#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/surface.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace anisurf {

/// A parameter point on one patch with its quadrature weight in (s, t)
/// (1 for pointwise samples).
struct SamplePoint {
  int patch = 0;
  double s = 0.0;
  double t = 0.0;
  double weight = 1.0;
};

/// Tensor Gauss-Legendre nodes of the given order on every patch.
std::vector<SamplePoint> quadrature_samples(const PiecewiseSurface& surf, int order);
/// Uniform random parameter points, inset from each side by `margin` times
/// the side length, spread over patches in proportion to parameter area.
std::vector<SamplePoint> interior_samples(const PiecewiseSurface& surf, int count,
                                          std::uint64_t seed, double margin = 0.02);

struct FieldOptions {
  bool lambda_alt = true;        // second evaluation of Lambda by differencing xi
  double lambda_alt_step = 1e-3;  // fourth-order stencil step for xi_j
  double frame_rotation = 0.0;   // rotate (e1, e2) by this angle before assembling
};

/// Geometric state at one sample. Matrices are in the orthonormal frame
/// e1 = X_s/|X_s| rotated by FieldOptions::frame_rotation, e2 = nu x e1.
struct FieldSample {
  SamplePoint at;
  Vec3 x = Vec3::Zero();
  Vec3 xs = Vec3::Zero();
  Vec3 xt = Vec3::Zero();
  Vec3 nu = Vec3::UnitZ();
  Vec3 nu_s = Vec3::Zero();
  Vec3 nu_t = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Vec3 xi = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();  // Hessian of gamma~ at nu
  double gamma = 0.0;
  double q = 0.0;      // X . nu
  Mat2 dnu = Mat2::Zero();
  Mat2 a = Mat2::Zero();
  Mat2 dxi = Mat2::Zero();
  double lambda = 0.0;      // -tr(A dnu)
  double lambda_alt = 0.0;  // -g^{ij} X_i . xi_j (NaN when not requested)
  double k_sigma = 0.0;     // det dnu
  double kw = 0.0;          // 1/det A, +inf when singular
  double det_dxi = 0.0;
  double area = 0.0;        // weight * |X_s x X_t|
  bool flagged = false;     // immersion failure; excluded from integrals
  bool kw_singular = false;  // |det A| < 1e-12
  std::string note;
};

struct GeometryFields {
  std::vector<FieldSample> samples;
  std::vector<std::string> warnings;
  int flagged = 0;
};

FieldSample field_at(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                     const SamplePoint& p, const FieldOptions& opt = {});
GeometryFields fields_at(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                         const std::vector<SamplePoint>& samples, const FieldOptions& opt = {});

/// Sum over faces of the integral of gamma(nu).
double energy(const PiecewiseSurface& surf, const AnisotropyFunction& gamma, int order = 32);
double area(const PiecewiseSurface& surf, int order = 32);
/// (1/3) integral of X . nu; DomainError for a surface that is not closed.
double volume(const PiecewiseSurface& surf, int order = 32);

/// Tangent vector field on a patch as a function of the parameters.
using TangentField = std::function<Vec3(double s, double t)>;

/// g^{ij} d_i V . X_j with second-order centered differences of step h.
double surface_divergence(const ParametricPatch& patch, const TangentField& v, double s, double t,
                          double h);

/// Scalar field on a patch with an optional parameter gradient (psi_s, psi_t);
/// without it the gradient is differenced (fourth order, step 1e-3).
struct ScalarField {
  std::function<double(double, double)> value;
  std::function<Vec2(double, double)> gradient;
};

/// psi = gamma(nu) with psi_i = xi . nu_i.
ScalarField gamma_of_normal(const ParametricPatch& patch, const AnisotropyFunction& gamma);

struct JacobiOptions {
  double step = 1e-4;
};

/// div(A grad psi) + <dxi, dnu> psi at an interior sample. Throws DomainError
/// when the stencil leaves the patch.
double jacobi_apply(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                    const ScalarField& psi, const SamplePoint& p, const JacobiOptions& opt = {});

struct FaceLambda {
  std::string name;
  double mean = 0.0;
  double max_deviation = 0.0;
};

struct EdgeBalance {
  std::string name;
  double max_force_jump = 0.0;  // max |(xi_a - xi_b) x t|
  double max_xi_jump = 0.0;     // max |xi_a - xi_b|
};

struct EquilibriumOptions {
  int order = 32;
  int edge_samples = 64;
  double lambda_rel = 1e-6;
  double lambda_abs = 1e-9;
  double edge_tol = 1e-8;
};

struct EquilibriumReport {
  std::vector<FaceLambda> faces;
  std::vector<EdgeBalance> edges;
  double lambda_mean = 0.0;
  double lambda_max_deviation = 0.0;
  double edge_max_force_jump = 0.0;
  double edge_max_xi_jump = 0.0;
  bool lambda_constant = false;
  bool edges_balanced = false;
  [[nodiscard]] bool pass() const { return lambda_constant && edges_balanced; }
};

EquilibriumReport equilibrium_check(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                    const EquilibriumOptions& opt = {});

struct DegreeResult {
  double raw = 0.0;
  long rounded = 0;
  double face_part = 0.0;  // (1/4 pi) sum of face integrals of K
  double edge_part = 0.0;  // (1/4 pi) area swept by the normal across edges
};

/// Degree of the Gauss map of a closed surface: the total Gaussian curvature
/// of the faces plus the signed spherical area filled in along every edge by
/// the great-circle arc between the two face normals. Corner contributions at
/// isolated vertices are not included.
DegreeResult degree_of_gauss_map(const PiecewiseSurface& surf, int order = 32);

}  // namespace anisurf
