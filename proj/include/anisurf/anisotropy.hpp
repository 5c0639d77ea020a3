#pragma once

#include "anisurf/common.hpp"
#include "anisurf/planar.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace anisurf {

/// gamma~(Y) = |Y| gamma(Y/|Y|) together with its gradient and Hessian in R^3.
struct ExtensionJet {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
};

enum class GammaFamily { isotropic, quadratic, lens, product, sampled };

std::string to_string(GammaFamily f);

/// Identifies the built-in family and its parameters.
struct GammaKind {
  GammaFamily family = GammaFamily::isotropic;
  Mat3 q = Mat3::Identity();  // quadratic
  double beta = 0.0;          // lens
  std::optional<PlanarSupport> profile;  // product (and lens, as circle cross)
  std::optional<PlanarSupport> cross;
  std::string label;
};

class AnisotropyModel {
 public:
  virtual ~AnisotropyModel() = default;
  /// Jet of the homogeneous extension at a nonzero Y.
  [[nodiscard]] virtual ExtensionJet jet(const Vec3& y) const = 0;
  [[nodiscard]] virtual double value(const Vec3& y) const { return jet(y).value; }
};

/// Positive anisotropic energy density on the unit sphere. Immutable and
/// cheap to copy; all derived objects are computed through the homogeneous
/// extension, whose Hessian restricted to the tangent plane is D^2 gamma + gamma I.
class AnisotropyFunction {
 public:
  static AnisotropyFunction isotropic();
  /// gamma(n) = sqrt(n^T Q n) for symmetric positive definite Q; Wulff shape is
  /// the ellipsoid x^T Q^{-1} x = 1.
  static AnisotropyFunction quadratic(const Mat3& q);
  /// gamma(n) = 1 + beta (n1^2 + n2^2).
  static AnisotropyFunction lens(double beta);
  /// gamma~(Y) = h_profile(h_cross(Y1, Y2), Y3). The profile support must be
  /// even in its first argument.
  static AnisotropyFunction product(const PlanarSupport& profile, const PlanarSupport& cross);
  /// Only values supplied; gradient and Hessian by centered differences of
  /// the homogeneous extension (gradient step 1e-5, Hessian from differences
  /// of the differenced gradient at 1e-4).
  static AnisotropyFunction from_values(std::function<double(const Vec3&)> eval,
                                        std::string label);

  [[nodiscard]] double eval(const Vec3& n) const { return model_->value(n); }
  [[nodiscard]] double operator()(const Vec3& n) const { return eval(n); }
  /// Tangential gradient D gamma(n).
  [[nodiscard]] Vec3 grad(const Vec3& n) const;
  /// D^2 gamma(n) as a 3x3 matrix acting on (and valued in) the tangent plane.
  [[nodiscard]] Mat3 hess(const Vec3& n) const;
  [[nodiscard]] ExtensionJet extension(const Vec3& y) const { return model_->jet(y); }

  [[nodiscard]] const GammaKind& kind() const { return kind_; }
  [[nodiscard]] std::string describe() const;

 private:
  AnisotropyFunction(std::shared_ptr<const AnisotropyModel> m, GammaKind k)
      : model_(std::move(m)), kind_(std::move(k)) {}
  void validate() const;

  std::shared_ptr<const AnisotropyModel> model_;
  GammaKind kind_;
};

struct ExtensionValue {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
};

/// Homogeneous extension and its gradient at a nonzero vector.
/// Throws DomainError for the zero vector.
ExtensionValue gamma_extend(const AnisotropyFunction& gamma, const Vec3& y);

struct CahnHoffmanPointData {
  Vec3 n = Vec3::UnitZ();
  Vec3 xi = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Mat2 a = Mat2::Identity();  // D^2 gamma + gamma I in (e1, e2)
  Vec2 inv_mu = Vec2::Ones();  // eigenvalues of a, ascending
  double kw = 1.0;            // 1 / det a; +inf when |det a| < 1e-12
  bool convex = true;         // a positive definite
  bool singular = false;      // |det a| < 1e-12
};

/// Cahn-Hoffman vector, A matrix and Wulff curvature at a unit normal.
/// Precondition |n| = 1 within 1e-12.
CahnHoffmanPointData point_data(const AnisotropyFunction& gamma, const Vec3& n);

/// A in an arbitrary orthonormal tangent frame (e1, e2) at n.
Mat2 a_matrix(const ExtensionJet& jet, const Vec3& e1, const Vec3& e2);

struct ConvexityReport {
  std::vector<Vec3> positive;
  std::vector<Vec3> indefinite;
  std::vector<Vec3> negative;
  double min_det = 0.0;
  Vec3 argmin_det = Vec3::UnitZ();
  [[nodiscard]] bool convex_everywhere() const {
    return indefinite.empty() && negative.empty();
  }
};

/// Classifies sampled normals by the definiteness of A.
ConvexityReport convexity_scan(const AnisotropyFunction& gamma, int sample_count);

}  // namespace anisurf
