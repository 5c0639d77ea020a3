#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/json_writer.hpp"
#include "anisurf/mesh.hpp"

#include <string>
#include <vector>

namespace anisurf {

struct WulffOptions {
  /// Hull edges whose sample normals differ by more than this are edges of W.
  double edge_threshold_deg = 3.0;
  /// Raise the threshold to four sample spacings when that is larger, so
  /// that ordinary neighbours are never mistaken for an edge.
  bool adaptive_threshold = true;
  /// Gauss order of the parametric-W quadrature used for energy and volume.
  int quadrature_order = 48;
};

/// Maximal smooth region of W: the sample normals whose support planes
/// touch W there.
struct WulffFaceRegion {
  int id = 0;
  int sample_count = 0;
  Vec3 mean_normal = Vec3::Zero();
  double cone_radius_deg = 0.0;  // max angle between a member normal and mean_normal
  double min_nz = 0.0;
  double max_nz = 0.0;
  std::vector<int> triangles;
};

struct WulffEdgeCurve {
  std::vector<Vec3> points;
  bool closed = false;
  double min_jump_deg = 0.0;  // normal jump across the edge, over its segments
  double max_jump_deg = 0.0;
};

struct WulffShape {
  TriangleMesh mesh;
  std::vector<Vec3> normals;          // sample normals
  std::vector<char> supporting;       // sample plane touches the polytope
  std::vector<int> triangle_sample;   // sample normal owning each triangle
  std::vector<WulffFaceRegion> faces;
  std::vector<WulffEdgeCurve> edges;
  double energy = 0.0;       // F[W]
  double volume = 0.0;       // V[W]
  double mesh_energy = 0.0;  // of the polytope
  double mesh_volume = 0.0;
  bool parametric_integrals = false;  // energy/volume from the parametric W
  double edge_threshold_deg = 0.0;
  int sample_count = 0;
  std::string gamma;
};

/// Polytope {Y . n_i <= gamma(n_i)} over a Fibonacci sampling, read off as the
/// polar dual of the convex hull of the points n_i / gamma(n_i).
WulffShape wulff_construct(const AnisotropyFunction& gamma, int sample_count,
                           const WulffOptions& opt = {});

/// max over mesh vertices v and unit n of v . n - gamma(n), with the inner
/// maximum found by projected ascent from the vertex direction. For convex
/// gamma this is the Hausdorff distance to the exact Wulff shape; DomainError
/// otherwise.
double hausdorff_to_wulff(const WulffShape& w, const AnisotropyFunction& gamma);

/// max over normals n of (max_v v . n - gamma(n)); the construction's own
/// normals when samples <= 0, otherwise `samples` fresh Fibonacci normals.
double support_excess(const WulffShape& w, const AnisotropyFunction& gamma, int samples = 0);

Json wulff_sidecar(const WulffShape& w);
void write_wulff(const WulffShape& w, const std::string& obj_path, const std::string& json_path);

}  // namespace anisurf
