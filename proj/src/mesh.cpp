#include "vtrecon/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>

#include <Eigen/Geometry>

#include "vtrecon/errors.hpp"

namespace vtrecon {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const auto n = vertices_.size();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& face = faces_[f];
    for (VertexIndex idx : face) {
      if (idx >= n) {
        throw GeometryError("face " + std::to_string(f) + " references vertex " +
                            std::to_string(idx) + " but mesh has " + std::to_string(n));
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw GeometryError("face " + std::to_string(f) + " repeats a vertex index");
    }
  }
  build_adjacency();
  recompute_normals();
}

void TriangleMesh::build_adjacency() {
  adjacency_.assign(vertices_.size(), {});
  for (const Face& face : faces_) {
    for (int k = 0; k < 3; ++k) {
      const VertexIndex a = face[k];
      const VertexIndex b = face[(k + 1) % 3];
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

Vec3 TriangleMesh::face_normal(std::size_t f) const {
  const Face& face = faces_[f];
  const Vec3 n = (vertices_[face[1]] - vertices_[face[0]]).cross(vertices_[face[2]] - vertices_[face[0]]);
  const double len = n.norm();
  if (len <= 0.0) {
    return Vec3::Zero();
  }
  return n / len;
}

double TriangleMesh::face_area(std::size_t f) const {
  const Face& face = faces_[f];
  return 0.5 * (vertices_[face[1]] - vertices_[face[0]]).cross(vertices_[face[2]] - vertices_[face[0]]).norm();
}

double TriangleMesh::surface_area() const {
  double total = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    total += face_area(f);
  }
  return total;
}

Vec3 TriangleMesh::vertex_centroid() const {
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : vertices_) {
    c += v;
  }
  return vertices_.empty() ? c : Vec3(c / static_cast<double>(vertices_.size()));
}

double TriangleMesh::mean_edge_length() const {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    for (VertexIndex j : adjacency_[i]) {
      if (j > i) {
        total += (vertices_[i] - vertices_[j]).norm();
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

void TriangleMesh::set_vertices(std::vector<Vec3> vertices) {
  if (vertices.size() != vertices_.size()) {
    throw ParameterError("set_vertices: vertex count mismatch");
  }
  vertices_ = std::move(vertices);
  recompute_normals();
}

void TriangleMesh::recompute_normals() {
  normals_.assign(vertices_.size(), Vec3::Zero());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Vec3 n = face_normal(f);
    if (n.isZero()) {
      continue;
    }
    const Face& face = faces_[f];
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = vertices_[face[k]];
      const Vec3 e1 = vertices_[face[(k + 1) % 3]] - p;
      const Vec3 e2 = vertices_[face[(k + 2) % 3]] - p;
      const double angle = std::atan2(e1.cross(e2).norm(), e1.dot(e2));
      normals_[face[k]] += angle * n;
    }
  }
  for (Vec3& n : normals_) {
    const double len = n.norm();
    n = len > 0.0 ? Vec3(n / len) : Vec3::UnitZ();
  }
}

bool TriangleMesh::is_edge_graph_connected() const {
  if (vertices_.empty()) {
    return false;
  }
  std::vector<char> seen(vertices_.size(), 0);
  std::queue<VertexIndex> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const VertexIndex v = frontier.front();
    frontier.pop();
    for (VertexIndex w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == vertices_.size();
}

void TriangleMesh::validate() const {
  if (vertices_.empty() || faces_.empty()) {
    throw GeometryError("mesh is empty");
  }
  for (const Vec3& v : vertices_) {
    if (!v.allFinite()) {
      throw GeometryError("mesh has non-finite vertex coordinates");
    }
  }
  if (!is_edge_graph_connected()) {
    throw GeometryError("mesh edge graph is not connected");
  }
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
  if (!(radius > 0.0)) {
    throw ParameterError("icosphere radius must be positive");
  }
  if (subdivisions < 0 || subdivisions > 6) {
    throw ParameterError("icosphere subdivisions must be in [0, 6]");
  }
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (Vec3& v : verts) {
    v.normalize();
  }
  std::vector<Face> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<VertexIndex, VertexIndex>, VertexIndex> midpoints;
    auto midpoint = [&](VertexIndex a, VertexIndex b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) {
        return it->second;
      }
      const auto idx = static_cast<VertexIndex>(verts.size());
      verts.push_back((verts[a] + verts[b]).normalized());
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const VertexIndex ab = midpoint(f[0], f[1]);
      const VertexIndex bc = midpoint(f[1], f[2]);
      const VertexIndex ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  for (Vec3& v : verts) {
    v *= radius;
  }
  return TriangleMesh(std::move(verts), std::move(faces));
}

TriangleMesh make_rounded_box(const Vec3& half_extents, double corner_radius, int segments) {
  if (!(half_extents.array() > 0.0).all()) {
    throw ParameterError("box half extents must be positive");
  }
  if (corner_radius < 0.0 || corner_radius > half_extents.minCoeff()) {
    throw ParameterError("corner radius must be in [0, smallest half extent]");
  }
  if (segments < 1) {
    throw ParameterError("box segments must be >= 1");
  }
  const int n = segments;
  std::unordered_map<long long, VertexIndex> index_of;
  std::vector<Vec3> verts;
  const Vec3 inner_half = half_extents - Vec3::Constant(corner_radius);

  auto vertex_at = [&](const std::array<int, 3>& g) {
    const long long key = (static_cast<long long>(g[0]) * (n + 1) + g[1]) * (n + 1) + g[2];
    auto it = index_of.find(key);
    if (it != index_of.end()) {
      return it->second;
    }
    Vec3 p;
    for (int a = 0; a < 3; ++a) {
      p[a] = half_extents[a] * (-1.0 + 2.0 * g[a] / n);
    }
    if (corner_radius > 0.0) {
      const Vec3 inner = p.cwiseMax(-inner_half).cwiseMin(inner_half);
      const Vec3 out = p - inner;
      if (out.norm() > 0.0) {
        p = inner + corner_radius * out.normalized();
      }
    }
    const auto idx = static_cast<VertexIndex>(verts.size());
    verts.push_back(p);
    index_of.emplace(key, idx);
    return idx;
  };

  std::vector<Face> faces;
  for (int axis = 0; axis < 3; ++axis) {
    const int b = (axis + 1) % 3;
    const int c = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          auto grid = [&](int u, int v) {
            std::array<int, 3> g{};
            g[axis] = side == 0 ? 0 : n;
            g[b] = u;
            g[c] = v;
            return vertex_at(g);
          };
          const VertexIndex v00 = grid(i, j);
          const VertexIndex v10 = grid(i + 1, j);
          const VertexIndex v11 = grid(i + 1, j + 1);
          const VertexIndex v01 = grid(i, j + 1);
          if (side == 1) {
            faces.push_back({v00, v10, v11});
            faces.push_back({v00, v11, v01});
          } else {
            faces.push_back({v00, v11, v10});
            faces.push_back({v00, v01, v11});
          }
        }
      }
    }
  }
  return TriangleMesh(std::move(verts), std::move(faces));
}

TriangleMesh make_ellipsoid(const Vec3& semi_axes, int subdivisions) {
  if (!(semi_axes.array() > 0.0).all()) {
    throw ParameterError("ellipsoid semi-axes must be positive");
  }
  const TriangleMesh unit = make_icosphere(1.0, subdivisions);
  std::vector<Vec3> verts = unit.vertices();
  for (Vec3& v : verts) {
    v = v.cwiseProduct(semi_axes);
  }
  return TriangleMesh(std::move(verts), unit.faces());
}

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset) {
  std::vector<Vec3> verts = mesh.vertices();
  for (Vec3& v : verts) {
    v += offset;
  }
  return TriangleMesh(std::move(verts), mesh.faces());
}

double signed_volume(const TriangleMesh& mesh) {
  double vol = 0.0;
  for (const Face& f : mesh.faces()) {
    vol += mesh.vertex(f[0]).dot(mesh.vertex(f[1]).cross(mesh.vertex(f[2])));
  }
  return vol / 6.0;
}

}  // namespace vtrecon
