#include "anisurf/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace anisurf {

namespace {

struct Face {
  std::array<int, 3> v{};
  std::array<int, 3> nb{-1, -1, -1};
  Vec3 n = Vec3::Zero();
  double d = 0.0;
  bool alive = true;
  bool visible = false;
  std::vector<int> outside;
  int far = -1;
  double far_dist = 0.0;
};

class QuickHull {
 public:
  explicit QuickHull(const std::vector<Vec3>& pts) : pts_(pts) {
    double scale = 0.0;
    for (const Vec3& p : pts_) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    eps_ = 1e-13 * std::max(scale, 1e-300);
  }

  ConvexHull3 run() {
    if (pts_.size() < 4) throw ConstructionError("convex hull needs at least 4 points");
    initial_tetrahedron();
    std::vector<int> stack;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      if (!faces_[f].outside.empty()) stack.push_back(f);
    }
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f, stack);
    }
    return collect();
  }

 private:
  double dist(const Face& f, int p) const { return f.n.dot(pts_[p]) - f.d; }

  int make_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    const Vec3 n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = n.norm();
    if (!(len > 0.0)) throw ConstructionError("convex hull produced a degenerate face");
    f.n = n / len;
    f.d = f.n.dot(pts_[a]);
    faces_.push_back(std::move(f));
    return static_cast<int>(faces_.size()) - 1;
  }

  void assign(int p, const std::vector<int>& candidates) {
    int best = -1;
    double best_d = eps_;
    for (int f : candidates) {
      const double d = dist(faces_[f], p);
      if (d > best_d) {
        best_d = d;
        best = f;
      }
    }
    if (best < 0) return;
    Face& face = faces_[best];
    face.outside.push_back(p);
    if (best_d > face.far_dist) {
      face.far_dist = best_d;
      face.far = p;
    }
  }

  void initial_tetrahedron() {
    const int n = static_cast<int>(pts_.size());
    std::array<int, 6> ext{};
    for (int k = 0; k < 3; ++k) {
      int lo = 0, hi = 0;
      for (int i = 1; i < n; ++i) {
        if (pts_[i](k) < pts_[lo](k)) lo = i;
        if (pts_[i](k) > pts_[hi](k)) hi = i;
      }
      ext[2 * k] = lo;
      ext[2 * k + 1] = hi;
    }
    int a = ext[0], b = ext[1];
    double best = -1.0;
    for (int i = 0; i < 6; ++i) {
      for (int j = i + 1; j < 6; ++j) {
        const double d = (pts_[ext[i]] - pts_[ext[j]]).squaredNorm();
        if (d > best) {
          best = d;
          a = ext[i];
          b = ext[j];
        }
      }
    }
    const Vec3 ab = (pts_[b] - pts_[a]).normalized();
    int c = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 w = pts_[i] - pts_[a];
      const double d = (w - w.dot(ab) * ab).squaredNorm();
      if (d > best) {
        best = d;
        c = i;
      }
    }
    if (c < 0 || best <= eps_ * eps_) throw ConstructionError("convex hull input is collinear");
    const Vec3 nrm = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]).normalized();
    int d = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double h = std::abs(nrm.dot(pts_[i] - pts_[a]));
      if (h > best) {
        best = h;
        d = i;
      }
    }
    if (d < 0 || best <= eps_) throw ConstructionError("convex hull input is coplanar");

    const Vec3 centroid = 0.25 * (pts_[a] + pts_[b] + pts_[c] + pts_[d]);
    const std::array<std::array<int, 3>, 4> tri{{{a, b, c}, {a, b, d}, {a, c, d}, {b, c, d}}};
    for (auto t : tri) {
      int f = make_face(t[0], t[1], t[2]);
      if (faces_[f].n.dot(centroid) - faces_[f].d > 0.0) {
        faces_.pop_back();
        f = make_face(t[0], t[2], t[1]);
      }
    }
    link_all();
    std::vector<int> all{0, 1, 2, 3};
    for (int i = 0; i < n; ++i) {
      if (i == a || i == b || i == c || i == d) continue;
      assign(i, all);
    }
  }

  void link_all() {
    std::unordered_map<long long, std::pair<int, int>> edges;
    const long long np = static_cast<long long>(pts_.size());
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      for (int k = 0; k < 3; ++k) {
        edges[faces_[f].v[k] * np + faces_[f].v[(k + 1) % 3]] = {f, k};
      }
    }
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      for (int k = 0; k < 3; ++k) {
        const auto it = edges.find(faces_[f].v[(k + 1) % 3] * np + faces_[f].v[k]);
        if (it == edges.end()) throw ConstructionError("convex hull is not closed");
        faces_[f].nb[k] = it->second.first;
      }
    }
  }

  void add_point(int f0, std::vector<int>& stack) {
    const int p = faces_[f0].far;
    // Visible region by flood fill.
    std::vector<int> visible{f0};
    faces_[f0].visible = true;
    for (std::size_t i = 0; i < visible.size(); ++i) {
      const Face& f = faces_[visible[i]];
      for (int g : f.nb) {
        if (!faces_[g].visible && dist(faces_[g], p) > eps_) {
          faces_[g].visible = true;
          visible.push_back(g);
        }
      }
    }
    // Horizon edges (u, v) as oriented in the visible face, keyed by u.
    std::unordered_map<int, std::pair<int, int>> horizon;  // u -> (v, outside face)
    for (int fi : visible) {
      const Face& f = faces_[fi];
      for (int k = 0; k < 3; ++k) {
        const int g = f.nb[k];
        if (!faces_[g].visible) {
          const int u = f.v[k];
          if (!horizon.emplace(u, std::make_pair(f.v[(k + 1) % 3], g)).second) {
            throw NumericError("convex hull horizon is not a simple cycle");
          }
        }
      }
    }
    if (horizon.size() < 3) throw NumericError("convex hull horizon is degenerate");
    std::vector<int> cycle;
    cycle.reserve(horizon.size());
    const int start = horizon.begin()->first;
    int u = start;
    do {
      cycle.push_back(u);
      const auto it = horizon.find(u);
      if (it == horizon.end() || cycle.size() > horizon.size()) {
        throw NumericError("convex hull horizon is not a simple cycle");
      }
      u = it->second.first;
    } while (u != start);
    if (cycle.size() != horizon.size()) throw NumericError("convex hull horizon has several cycles");

    const std::size_t m = cycle.size();
    std::vector<int> created(m);
    for (std::size_t i = 0; i < m; ++i) {
      const int a = cycle[i];
      const auto [b, outside_face] = horizon.at(a);
      const int nf = make_face(a, b, p);
      created[i] = nf;
      faces_[nf].nb[0] = outside_face;
      Face& g = faces_[outside_face];
      for (int k = 0; k < 3; ++k) {
        if (g.v[k] == b && g.v[(k + 1) % 3] == a) g.nb[k] = nf;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      faces_[created[i]].nb[1] = created[(i + 1) % m];
      faces_[created[i]].nb[2] = created[(i + m - 1) % m];
    }
    for (int fi : visible) {
      faces_[fi].alive = false;
      std::vector<int> pending = std::move(faces_[fi].outside);
      faces_[fi].outside.clear();
      for (int q : pending) {
        if (q != p) assign(q, created);
      }
    }
    for (int nf : created) {
      if (!faces_[nf].outside.empty()) stack.push_back(nf);
    }
  }

  ConvexHull3 collect() const {
    ConvexHull3 h;
    h.points = pts_;
    std::vector<int> remap(faces_.size(), -1);
    int count = 0;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (faces_[f].alive) remap[f] = count++;
    }
    h.on_hull.assign(pts_.size(), 0);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive) continue;
      const Face& face = faces_[f];
      h.faces.push_back(face.v);
      h.neighbors.push_back({remap[face.nb[0]], remap[face.nb[1]], remap[face.nb[2]]});
      h.normals.push_back(face.n);
      h.offsets.push_back(face.d);
      for (int v : face.v) h.on_hull[v] = 1;
    }
    return h;
  }

  const std::vector<Vec3>& pts_;
  std::vector<Face> faces_;
  double eps_ = 0.0;
};

}  // namespace

ConvexHull3 convex_hull(const std::vector<Vec3>& points) { return QuickHull(points).run(); }

std::vector<int> ConvexHull3::incident_faces() const {
  std::vector<int> out(points.size(), -1);
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    for (int v : faces[f]) {
      if (out[v] < 0) out[v] = f;
    }
  }
  return out;
}

std::vector<int> ConvexHull3::ring(int v, const std::vector<int>& some_face_of) const {
  std::vector<int> out;
  const int start = some_face_of[v];
  if (start < 0) return out;
  int f = start;
  do {
    out.push_back(f);
    int k = 0;
    while (faces[f][k] != v) ++k;
    // Crossing edge (v, next) walks clockwise; crossing the edge ending at v
    // walks counter-clockwise.
    f = neighbors[f][(k + 2) % 3];
    if (out.size() > faces.size()) throw NumericError("hull vertex ring does not close");
  } while (f != start);
  return out;
}

}  // namespace anisurf
