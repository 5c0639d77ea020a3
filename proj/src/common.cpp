#include "anisurf/common.hpp"

#include <cmath>

namespace anisurf {

std::vector<Vec3> fibonacci_sphere(int count) {
  std::vector<Vec3> pts;
  if (count <= 0) return pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
  int k = 0;
  n.cwiseAbs().maxCoeff(&k);
  const Vec3 helper = Vec3::Unit((k + 1) % 3);
  const Vec3 e1 = (helper - helper.dot(n) * n).normalized();
  const Vec3 e2 = n.cross(e1);
  return {e1, e2};
}

}  // namespace anisurf
