#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace anisurf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

/// Input outside the mathematical domain of an operation (zero vector, V <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A geometric object could not be built from its inputs.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (no bracket, no convergence, degenerate chart).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic quasi-uniform points on the unit sphere (golden-angle spiral).
std::vector<Vec3> fibonacci_sphere(int count);

/// Orthonormal tangent basis at unit n, chosen from the largest-magnitude
/// component of n so that the result is a smooth function away from
/// switching boundaries and reproducible everywhere.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& n);

/// 90 degree rotation of an oriented 2D tangent frame.
inline Mat2 rotation_j() {
  Mat2 j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

}  // namespace anisurf
