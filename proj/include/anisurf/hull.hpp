#pragma once

#include "anisurf/common.hpp"

#include <array>
#include <vector>

namespace anisurf {

/// Triangulated boundary of the convex hull of a 3D point set. Faces are
/// oriented counter-clockwise seen from outside; neighbors[f][k] is the face
/// across edge (faces[f][k], faces[f][(k+1)%3]).
struct ConvexHull3 {
  std::vector<Vec3> points;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<int, 3>> neighbors;
  std::vector<Vec3> normals;
  std::vector<double> offsets;  // normals[f] . x == offsets[f] on face f
  std::vector<char> on_hull;    // per input point

  /// Faces incident to vertex v in cyclic order, counter-clockwise seen from outside.
  [[nodiscard]] std::vector<int> ring(int v, const std::vector<int>& some_face_of) const;
  /// One incident face per hull vertex (-1 for interior points).
  [[nodiscard]] std::vector<int> incident_faces() const;
};

/// Quickhull with conflict lists. Throws ConstructionError for degenerate
/// (coplanar or too small) inputs.
ConvexHull3 convex_hull(const std::vector<Vec3>& points);

}  // namespace anisurf
