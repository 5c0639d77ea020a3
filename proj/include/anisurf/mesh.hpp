#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/common.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace anisurf {

/// Plain triangle mesh, counter-clockwise faces seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  [[nodiscard]] double area() const;
  /// Enclosed volume by the divergence theorem (signed tetrahedra).
  [[nodiscard]] double volume() const;
  /// (1/3) sum of area * (centroid . normal); equal to volume() for flat facets.
  [[nodiscard]] double support_volume() const;
  /// Sum over triangles of area * gamma(unit normal).
  [[nodiscard]] double energy(const AnisotropyFunction& gamma) const;
  /// Total angle defect divided by 4 pi (discrete Gauss-Bonnet).
  [[nodiscard]] double gauss_map_degree() const;
  /// Every undirected edge is shared by exactly two triangles with opposite orientation.
  [[nodiscard]] bool closed() const;
};

/// ASCII OBJ with 17 significant digits.
void write_obj(std::ostream& os, const TriangleMesh& mesh, const std::string& comment = {});
void write_obj_file(const std::string& path, const TriangleMesh& mesh,
                    const std::string& comment = {});
/// Reads `v` and `f` records; polygons are fan-triangulated.
TriangleMesh read_obj_file(const std::string& path);

}  // namespace anisurf
