#include "anisurf/anisotropy.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace anisurf {

namespace {

class IsotropicModel final : public AnisotropyModel {
 public:
  ExtensionJet jet(const Vec3& y) const override {
    const double r = y.norm();
    const Vec3 u = y / r;
    return {r, u, (Mat3::Identity() - u * u.transpose()) / r};
  }
  double value(const Vec3& y) const override { return y.norm(); }
};

class QuadraticModel final : public AnisotropyModel {
 public:
  explicit QuadraticModel(const Mat3& q) : q_(q) {}
  ExtensionJet jet(const Vec3& y) const override {
    const Vec3 qy = q_ * y;
    const double g = std::sqrt(y.dot(qy));
    return {g, qy / g, (q_ - qy * qy.transpose() / (g * g)) / g};
  }
  double value(const Vec3& y) const override { return std::sqrt(y.dot(q_ * y)); }

 private:
  Mat3 q_;
};

class LensModel final : public AnisotropyModel {
 public:
  explicit LensModel(double beta) : beta_(beta) {}
  ExtensionJet jet(const Vec3& y) const override {
    const double r = y.norm();
    const double s = y.x() * y.x() + y.y() * y.y();
    const Vec3 py(y.x(), y.y(), 0.0);
    Mat3 p = Mat3::Zero();
    p(0, 0) = p(1, 1) = 1.0;
    const Mat3 id = Mat3::Identity();
    const Mat3 yy = y * y.transpose();
    const double r3 = r * r * r;
    const double r5 = r3 * r * r;
    ExtensionJet j;
    j.value = r + beta_ * s / r;
    j.gradient = y / r + beta_ * (2.0 * py / r - s * y / r3);
    j.hessian = (id - yy / (r * r)) / r +
                beta_ * (2.0 * p / r - 2.0 * (py * y.transpose() + y * py.transpose()) / r3 -
                         s * (id / r3 - 3.0 * yy / r5));
    return j;
  }

 private:
  double beta_;
};

class ProductModel final : public AnisotropyModel {
 public:
  ProductModel(PlanarSupport profile, PlanarSupport cross)
      : profile_(std::move(profile)), cross_(std::move(cross)) {}
  ExtensionJet jet(const Vec3& y_in) const override {
    Vec3 y = y_in;
    // On the axis the cross-section extension has no gradient; evaluate at a
    // negligible offset (the limit exists for profiles even in their first
    // argument).
    const double scale = y.norm();
    if (std::hypot(y.x(), y.y()) < 1e-12 * scale) y.x() += 1e-12 * scale;
    const PlanarExtension c = cross_.extension(Vec2(y.x(), y.y()));
    const PlanarExtension p = profile_.extension(Vec2(c.value, y.z()));
    ExtensionJet j;
    j.value = p.value;
    j.gradient << p.gradient.x() * c.gradient, p.gradient.y();
    j.hessian.topLeftCorner<2, 2>() =
        p.hessian(0, 0) * c.gradient * c.gradient.transpose() + p.gradient.x() * c.hessian;
    j.hessian.block<2, 1>(0, 2) = p.hessian(0, 1) * c.gradient;
    j.hessian.block<1, 2>(2, 0) = p.hessian(0, 1) * c.gradient.transpose();
    j.hessian(2, 2) = p.hessian(1, 1);
    return j;
  }

 private:
  PlanarSupport profile_;
  PlanarSupport cross_;
};

class SampledModel final : public AnisotropyModel {
 public:
  explicit SampledModel(std::function<double(const Vec3&)> f) : f_(std::move(f)) {}
  double value(const Vec3& y) const override {
    const double r = y.norm();
    return r * f_(y / r);
  }
  ExtensionJet jet(const Vec3& y) const override {
    const double r = y.norm();
    const Vec3 u = y / r;
    ExtensionJet j;
    j.value = value(y);
    // Degree-one homogeneity fixes the radial parts: grad . u = gamma, hess u = 0.
    const Mat3 p = Mat3::Identity() - u * u.transpose();
    j.gradient = p * fd_gradient(u) + f_(u) * u;
    constexpr double h2 = 1e-4;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = Vec3::Unit(k);
      j.hessian.col(k) = (fd_gradient(u + h2 * e) - fd_gradient(u - h2 * e)) / (2.0 * h2);
    }
    j.hessian = p * (0.5 * (j.hessian + j.hessian.transpose())) * p / r;
    return j;
  }

 private:
  Vec3 fd_gradient(const Vec3& y) const {
    constexpr double h = 1e-5;
    Vec3 g;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = Vec3::Unit(k);
      g(k) = (value(y + h * e) - value(y - h * e)) / (2.0 * h);
    }
    return g;
  }
  std::function<double(const Vec3&)> f_;
};

}  // namespace

std::string to_string(GammaFamily f) {
  switch (f) {
    case GammaFamily::isotropic: return "isotropic";
    case GammaFamily::quadratic: return "quadratic";
    case GammaFamily::lens: return "lens";
    case GammaFamily::product: return "product";
    case GammaFamily::sampled: return "sampled";
  }
  return "unknown";
}

AnisotropyFunction AnisotropyFunction::isotropic() {
  GammaKind k;
  k.family = GammaFamily::isotropic;
  k.profile = PlanarSupport::circle();
  k.cross = PlanarSupport::circle();
  AnisotropyFunction g(std::make_shared<IsotropicModel>(), k);
  g.validate();
  return g;
}

AnisotropyFunction AnisotropyFunction::quadratic(const Mat3& q) {
  if ((q - q.transpose()).norm() > 1e-12 * q.norm()) {
    throw ConstructionError("quadratic anisotropy needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(q);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw ConstructionError("quadratic anisotropy needs a positive definite matrix");
  }
  GammaKind k;
  k.family = GammaFamily::quadratic;
  k.q = q;
  AnisotropyFunction g(std::make_shared<QuadraticModel>(q), k);
  g.validate();
  return g;
}

AnisotropyFunction AnisotropyFunction::lens(double beta) {
  if (!(beta > -1.0)) throw ConstructionError("lens anisotropy needs beta > -1 (gamma > 0)");
  GammaKind k;
  k.family = GammaFamily::lens;
  k.beta = beta;
  k.profile = PlanarSupport::lens(beta);
  k.cross = PlanarSupport::circle();
  AnisotropyFunction g(std::make_shared<LensModel>(beta), k);
  g.validate();
  return g;
}

AnisotropyFunction AnisotropyFunction::product(const PlanarSupport& profile,
                                               const PlanarSupport& cross) {
  if (!profile.even_in_first_axis()) {
    throw ConstructionError("product anisotropy needs a profile support even in its first argument");
  }
  GammaKind k;
  k.family = GammaFamily::product;
  k.profile = profile;
  k.cross = cross;
  AnisotropyFunction g(std::make_shared<ProductModel>(profile, cross), k);
  g.validate();
  return g;
}

AnisotropyFunction AnisotropyFunction::from_values(std::function<double(const Vec3&)> eval,
                                                   std::string label) {
  GammaKind k;
  k.family = GammaFamily::sampled;
  k.label = std::move(label);
  AnisotropyFunction g(std::make_shared<SampledModel>(std::move(eval)), k);
  g.validate();
  return g;
}

void AnisotropyFunction::validate() const {
  const auto samples = fibonacci_sphere(64);
  const bool check_derivatives = kind_.family != GammaFamily::sampled;
  for (const Vec3& n : samples) {
    const ExtensionJet j = model_->jet(n);
    if (!(j.value > 0.0) || !std::isfinite(j.value)) {
      throw ConstructionError(
          fmt::format("anisotropy must be positive; gamma = {} at ({}, {}, {})", j.value, n.x(),
                      n.y(), n.z()));
    }
    if (std::abs(j.gradient.dot(n) - j.value) > 1e-10 * j.value) {
      throw ConstructionError("anisotropy gradient violates the Euler relation");
    }
    if (!check_derivatives) continue;
    constexpr double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = Vec3::Unit(k);
      const double dv = (model_->value(n + h * e) - model_->value(n - h * e)) / (2.0 * h);
      const Vec3 dg = (model_->jet(n + h * e).gradient - model_->jet(n - h * e).gradient) / (2.0 * h);
      const double scale = 1.0 + j.hessian.norm();
      if (std::abs(dv - j.gradient(k)) > 1e-6 * (1.0 + j.value) ||
          (dg - j.hessian.col(k)).norm() > 1e-5 * scale) {
        throw ConstructionError("anisotropy derivatives disagree with finite differences");
      }
    }
  }
}

Vec3 AnisotropyFunction::grad(const Vec3& n) const {
  const ExtensionJet j = model_->jet(n);
  return j.gradient - j.value * n;
}

Mat3 AnisotropyFunction::hess(const Vec3& n) const {
  const ExtensionJet j = model_->jet(n);
  const Mat3 p = Mat3::Identity() - n * n.transpose();
  return j.hessian - j.value * p;
}

std::string AnisotropyFunction::describe() const {
  switch (kind_.family) {
    case GammaFamily::isotropic: return "isotropic";
    case GammaFamily::quadratic: {
      std::string s = "quadratic(";
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          s += fmt::format("{}{:.17g}", (i == 0 && j == 0) ? "" : ",", kind_.q(i, j));
        }
      }
      return s + ")";
    }
    case GammaFamily::lens: return fmt::format("lens({:.17g})", kind_.beta);
    case GammaFamily::product:
      return fmt::format("product(profile={}, cross={})", kind_.profile->describe(),
                         kind_.cross->describe());
    case GammaFamily::sampled: return fmt::format("sampled({})", kind_.label);
  }
  return "unknown";
}

ExtensionValue gamma_extend(const AnisotropyFunction& gamma, const Vec3& y) {
  if (!(y.norm() > 0.0)) throw DomainError("homogeneous extension undefined at the zero vector");
  const ExtensionJet j = gamma.extension(y);
  return {j.value, j.gradient};
}

Mat2 a_matrix(const ExtensionJet& jet, const Vec3& e1, const Vec3& e2) {
  Mat2 a;
  a(0, 0) = e1.dot(jet.hessian * e1);
  a(0, 1) = e1.dot(jet.hessian * e2);
  a(1, 0) = e2.dot(jet.hessian * e1);
  a(1, 1) = e2.dot(jet.hessian * e2);
  return 0.5 * (a + a.transpose());
}

CahnHoffmanPointData point_data(const AnisotropyFunction& gamma, const Vec3& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12) throw DomainError("point_data needs a unit normal");
  CahnHoffmanPointData d;
  d.n = n;
  const ExtensionJet j = gamma.extension(n);
  d.xi = j.gradient;
  std::tie(d.e1, d.e2) = tangent_basis(n);
  d.a = a_matrix(j, d.e1, d.e2);
  Eigen::SelfAdjointEigenSolver<Mat2> es(d.a);
  d.inv_mu = es.eigenvalues();
  const double det = d.a.determinant();
  d.singular = std::abs(det) < 1e-12;
  d.kw = d.singular ? std::numeric_limits<double>::infinity() : 1.0 / det;
  d.convex = d.inv_mu(0) > 0.0;
  return d;
}

ConvexityReport convexity_scan(const AnisotropyFunction& gamma, int sample_count) {
  ConvexityReport r;
  r.min_det = std::numeric_limits<double>::infinity();
  for (const Vec3& n : fibonacci_sphere(sample_count)) {
    const CahnHoffmanPointData d = point_data(gamma, n);
    const double det = d.a.determinant();
    if (det < r.min_det) {
      r.min_det = det;
      r.argmin_det = n;
    }
    if (d.inv_mu(0) > 0.0) {
      r.positive.push_back(n);
    } else if (d.inv_mu(1) < 0.0) {
      r.negative.push_back(n);
    } else {
      r.indefinite.push_back(n);
    }
  }
  return r;
}

}  // namespace anisurf
