#include "anisurf/wulff.hpp"

#include "anisurf/fields.hpp"
#include "anisurf/hull.hpp"
#include "anisurf/surface.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace anisurf {

namespace {

constexpr double kDeg = 180.0 / kPi;

int find_root(std::vector<int>& parent, int i) {
  while (parent[static_cast<std::size_t>(i)] != i) {
    parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
    i = parent[static_cast<std::size_t>(i)];
  }
  return i;
}

double angle_deg(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b)) * kDeg;
}

}  // namespace

WulffShape wulff_construct(const AnisotropyFunction& gamma, int sample_count,
                           const WulffOptions& opt) {
  if (sample_count < 100) throw DomainError("wulff_construct needs at least 100 samples");
  WulffShape w;
  w.sample_count = sample_count;
  w.gamma = gamma.describe();
  w.normals = fibonacci_sphere(sample_count);
  const std::size_t n = w.normals.size();
  std::vector<double> g(n);
  std::vector<Vec3> dual(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = gamma(w.normals[i]);
    if (!(g[i] > 0.0) || !std::isfinite(g[i])) {
      throw ConstructionError(fmt::format("anisotropy is not positive at sample {} (gamma = {})", i,
                                          g[i]));
    }
    dual[i] = w.normals[i] / g[i];
  }
  const ConvexHull3 hull = convex_hull(dual);
  w.supporting = hull.on_hull;

  // One polytope vertex per hull facet.
  const std::size_t nf = hull.faces.size();
  w.mesh.vertices.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    if (!(hull.offsets[f] > 0.0)) throw ConstructionError("dual hull does not contain the origin");
    w.mesh.vertices[f] = hull.normals[f] / hull.offsets[f];
  }

  // One polygon per supporting sample, fan-triangulated.
  const std::vector<int> incident = hull.incident_faces();
  for (std::size_t i = 0; i < n; ++i) {
    if (!hull.on_hull[i]) continue;
    std::vector<int> ring = hull.ring(static_cast<int>(i), incident);
    if (ring.size() < 3) continue;
    Vec3 area2 = Vec3::Zero();
    for (std::size_t k = 0; k < ring.size(); ++k) {
      area2 += w.mesh.vertices[static_cast<std::size_t>(ring[k])].cross(
          w.mesh.vertices[static_cast<std::size_t>(ring[(k + 1) % ring.size()])]);
    }
    if (area2.dot(w.normals[i]) < 0.0) std::reverse(ring.begin(), ring.end());
    for (std::size_t k = 1; k + 1 < ring.size(); ++k) {
      w.mesh.triangles.push_back({ring[0], ring[k], ring[k + 1]});
      w.triangle_sample.push_back(static_cast<int>(i));
    }
  }

  // Edges and faces from the angular gaps between hull-adjacent samples.
  w.edge_threshold_deg = opt.edge_threshold_deg;
  if (opt.adaptive_threshold) {
    const double spacing = std::sqrt(4.0 * kPi / static_cast<double>(n)) * kDeg;
    w.edge_threshold_deg = std::max(w.edge_threshold_deg, 4.0 * spacing);
  }
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::map<int, std::vector<std::pair<int, double>>> crease;  // polytope vertex -> (neighbour, jump)
  for (std::size_t f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int nb = hull.neighbors[f][static_cast<std::size_t>(k)];
      if (nb < static_cast<int>(f)) continue;
      const int a = hull.faces[f][static_cast<std::size_t>(k)];
      const int b = hull.faces[f][static_cast<std::size_t>((k + 1) % 3)];
      const double jump = angle_deg(w.normals[static_cast<std::size_t>(a)],
                                    w.normals[static_cast<std::size_t>(b)]);
      if (jump > w.edge_threshold_deg) {
        crease[static_cast<int>(f)].emplace_back(nb, jump);
        crease[nb].emplace_back(static_cast<int>(f), jump);
      } else {
        parent[static_cast<std::size_t>(find_root(parent, a))] = find_root(parent, b);
      }
    }
  }

  // Chain crease segments: open chains from non-degree-2 vertices first.
  std::map<std::pair<int, int>, bool> used;
  auto walk = [&](int start) {
    WulffEdgeCurve curve;
    curve.min_jump_deg = 180.0;
    int prev = -1;
    int cur = start;
    curve.points.push_back(w.mesh.vertices[static_cast<std::size_t>(cur)]);
    while (true) {
      int next = -1;
      double jump = 0.0;
      for (const auto& [v, j] : crease[cur]) {
        const auto key = std::minmax(cur, v);
        if (!used[{key.first, key.second}]) {
          next = v;
          jump = j;
          used[{key.first, key.second}] = true;
          break;
        }
      }
      if (next < 0) break;
      curve.min_jump_deg = std::min(curve.min_jump_deg, jump);
      curve.max_jump_deg = std::max(curve.max_jump_deg, jump);
      prev = cur;
      cur = next;
      curve.points.push_back(w.mesh.vertices[static_cast<std::size_t>(cur)]);
      if (cur == start) {
        curve.closed = true;
        break;
      }
      if (crease[cur].size() != 2) break;
    }
    (void)prev;
    if (curve.points.size() > 1) w.edges.push_back(std::move(curve));
  };
  for (const auto& [v, list] : crease) {
    if (list.size() != 2) {
      for (std::size_t r = 0; r < list.size(); ++r) walk(v);
    }
  }
  for (const auto& [v, list] : crease) {
    for (std::size_t r = 0; r < list.size(); ++r) walk(v);
  }

  // Face regions.
  std::map<int, int> region_of_root;
  std::vector<int> region(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!hull.on_hull[i]) continue;
    const int root = find_root(parent, static_cast<int>(i));
    auto it = region_of_root.find(root);
    if (it == region_of_root.end()) {
      it = region_of_root.emplace(root, static_cast<int>(w.faces.size())).first;
      WulffFaceRegion fr;
      fr.id = it->second;
      fr.min_nz = 1.0;
      fr.max_nz = -1.0;
      w.faces.push_back(fr);
    }
    region[i] = it->second;
    WulffFaceRegion& fr = w.faces[static_cast<std::size_t>(it->second)];
    ++fr.sample_count;
    fr.mean_normal += w.normals[i];
    fr.min_nz = std::min(fr.min_nz, w.normals[i].z());
    fr.max_nz = std::max(fr.max_nz, w.normals[i].z());
  }
  for (WulffFaceRegion& fr : w.faces) {
    if (fr.mean_normal.norm() > 1e-12) fr.mean_normal.normalize();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (region[i] < 0) continue;
    WulffFaceRegion& fr = w.faces[static_cast<std::size_t>(region[i])];
    fr.cone_radius_deg = std::max(fr.cone_radius_deg, angle_deg(fr.mean_normal, w.normals[i]));
  }
  for (std::size_t t = 0; t < w.triangle_sample.size(); ++t) {
    const int r = region[static_cast<std::size_t>(w.triangle_sample[t])];
    if (r >= 0) w.faces[static_cast<std::size_t>(r)].triangles.push_back(static_cast<int>(t));
  }

  // Polytope integrals: each polygon has normal n_i and support gamma_i.
  for (std::size_t t = 0; t < w.mesh.triangles.size(); ++t) {
    const auto& tri = w.mesh.triangles[t];
    const Vec3& a = w.mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vec3& b = w.mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vec3& c = w.mesh.vertices[static_cast<std::size_t>(tri[2])];
    const auto i = static_cast<std::size_t>(w.triangle_sample[t]);
    const double ar = 0.5 * (b - a).cross(c - a).dot(w.normals[i]);
    w.mesh_energy += ar * g[i];
    w.mesh_volume += ar * g[i] / 3.0;
  }

  // F[W] and V[W] from the parametric W, which converges spectrally; the
  // polytope is only second-order accurate in the sample spacing.
  const bool parametric = gamma.kind().family != GammaFamily::sampled ||
                          convexity_scan(gamma, 2000).convex_everywhere();
  if (parametric) {
    const PiecewiseSurface ws = wulff_surface(gamma, 1.0);
    w.energy = energy(ws, gamma, opt.quadrature_order);
    w.volume = volume(ws, opt.quadrature_order);
    w.parametric_integrals = true;
  } else {
    w.energy = w.mesh_energy;
    w.volume = w.mesh_volume;
  }
  return w;
}

double hausdorff_to_wulff(const WulffShape& w, const AnisotropyFunction& gamma) {
  if (!convexity_scan(gamma, 2000).convex_everywhere()) {
    throw DomainError("hausdorff_to_wulff needs an anisotropy with convex Wulff shape");
  }
  double worst = 0.0;
  for (const Vec3& v : w.mesh.vertices) {
    Vec3 n = v.normalized();
    double best = v.dot(n) - gamma(n);
    for (int it = 0; it < 200; ++it) {
      const ExtensionJet j = gamma.extension(n);
      const Vec3 grad = (v - j.gradient) - (v - j.gradient).dot(n) * n;
      if (grad.norm() < 1e-15) break;
      const double step = 1.0 / (j.hessian.norm() + v.norm());
      const Vec3 trial = (n + step * grad).normalized();
      const double val = v.dot(trial) - gamma(trial);
      if (!(val > best)) break;
      best = val;
      n = trial;
    }
    worst = std::max(worst, std::abs(best));
  }
  return worst;
}

double support_excess(const WulffShape& w, const AnisotropyFunction& gamma, int samples) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec3& n : samples > 0 ? fibonacci_sphere(samples) : w.normals) {
    double h = -std::numeric_limits<double>::infinity();
    for (const Vec3& v : w.mesh.vertices) h = std::max(h, v.dot(n));
    worst = std::max(worst, h - gamma(n));
  }
  return worst;
}

Json wulff_sidecar(const WulffShape& w) {
  Json j;
  j["gamma"] = w.gamma;
  j["sample_count"] = w.sample_count;
  j["edge_threshold_deg"] = w.edge_threshold_deg;
  j["energy"] = w.energy;
  j["volume"] = w.volume;
  j["integrals"] = w.parametric_integrals ? "parametric" : "polytope";
  j["mesh_energy"] = w.mesh_energy;
  j["mesh_volume"] = w.mesh_volume;
  j["vertex_count"] = w.mesh.vertices.size();
  j["triangle_count"] = w.mesh.triangles.size();
  Json edges = Json::array();
  for (const WulffEdgeCurve& e : w.edges) {
    Json je;
    je["closed"] = e.closed;
    je["min_jump_deg"] = e.min_jump_deg;
    je["max_jump_deg"] = e.max_jump_deg;
    Json pts = Json::array();
    for (const Vec3& p : e.points) pts.push_back(Json::array({p.x(), p.y(), p.z()}));
    je["points"] = pts;
    edges.push_back(je);
  }
  j["edges"] = edges;
  Json faces = Json::array();
  for (const WulffFaceRegion& f : w.faces) {
    Json jf;
    jf["id"] = f.id;
    jf["sample_count"] = f.sample_count;
    jf["mean_normal"] = Json::array({f.mean_normal.x(), f.mean_normal.y(), f.mean_normal.z()});
    jf["cone_radius_deg"] = f.cone_radius_deg;
    jf["normal_z_range"] = Json::array({f.min_nz, f.max_nz});
    jf["triangle_count"] = f.triangles.size();
    faces.push_back(jf);
  }
  j["faces"] = faces;
  return j;
}

void write_wulff(const WulffShape& w, const std::string& obj_path, const std::string& json_path) {
  write_obj_file(obj_path, w.mesh, "Wulff shape of " + w.gamma);
  write_json_file(json_path, wulff_sidecar(w));
}

}  // namespace anisurf
