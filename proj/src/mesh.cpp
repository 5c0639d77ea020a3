#include "anisurf/mesh.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace anisurf {

double TriangleMesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) {
    a += 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
  }
  return a;
}

double TriangleMesh::volume() const {
  double v = 0.0;
  for (const auto& t : triangles) {
    v += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]])) / 6.0;
  }
  return v;
}

double TriangleMesh::support_volume() const {
  double v = 0.0;
  for (const auto& t : triangles) {
    const Vec3 c = (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
    const Vec3 n2 = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    v += c.dot(n2) / 6.0;
  }
  return v;
}

double TriangleMesh::energy(const AnisotropyFunction& gamma) const {
  double e = 0.0;
  for (const auto& t : triangles) {
    const Vec3 n2 = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    const double len = n2.norm();
    if (len > 0.0) e += 0.5 * len * gamma(n2 / len);
  }
  return e;
}

double TriangleMesh::gauss_map_degree() const {
  std::vector<double> angle_sum(vertices.size(), 0.0);
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = vertices[t[(k + 1) % 3]] - vertices[t[k]];
      const Vec3 b = vertices[t[(k + 2) % 3]] - vertices[t[k]];
      angle_sum[t[k]] += std::atan2(a.cross(b).norm(), a.dot(b));
    }
  }
  std::vector<char> used(vertices.size(), 0);
  for (const auto& t : triangles) {
    for (int v : t) used[v] = 1;
  }
  double defect = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (used[i]) defect += 2.0 * kPi - angle_sum[i];
  }
  return defect / (4.0 * kPi);
}

bool TriangleMesh::closed() const {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  }
  for (const auto& [e, count] : directed) {
    if (count != 1) return false;
    const auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

void write_obj(std::ostream& os, const TriangleMesh& mesh, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << "\n";
  for (const Vec3& v : mesh.vertices) {
    os << fmt::format("v {:.17g} {:.17g} {:.17g}\n", v.x(), v.y(), v.z());
  }
  for (const auto& t : mesh.triangles) {
    os << fmt::format("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1);
  }
}

void write_obj_file(const std::string& path, const TriangleMesh& mesh, const std::string& comment) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_obj(os, mesh, comment);
}

TriangleMesh read_obj_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  TriangleMesh mesh;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x() >> v.y() >> v.z();
      if (!ls) throw std::runtime_error("malformed vertex in " + path);
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        const int i = std::stoi(tok.substr(0, tok.find('/')));
        idx.push_back(i > 0 ? i - 1 : static_cast<int>(mesh.vertices.size()) + i);
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
      }
    }
  }
  for (const auto& t : mesh.triangles) {
    for (int v : t) {
      if (v < 0 || v >= static_cast<int>(mesh.vertices.size())) {
        throw std::runtime_error("face index out of range in " + path);
      }
    }
  }
  return mesh;
}

}  // namespace anisurf
