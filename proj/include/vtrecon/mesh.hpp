#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace vtrecon {

using Vec3 = Eigen::Vector3d;
using VertexIndex = std::uint32_t;
using Face = std::array<VertexIndex, 3>;

/// Read-only view of a vertex graph: positions plus symmetric neighbor
/// lists. Triangle meshes expose their edge graph through this view;
/// tests also build bare path graphs with it.
struct EdgeGraphView {
  std::span<const Vec3> positions;
  std::span<const std::vector<VertexIndex>> neighbors;

  std::size_t size() const { return positions.size(); }
};

/// Triangle surface with derived edge adjacency and angle-weighted vertex
/// normals. Faces are assumed counter-clockwise when seen from outside.
class TriangleMesh {
 public:
  TriangleMesh() = default;

  /// Throws GeometryError when a face references a missing vertex or
  /// repeats an index.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& vertex_normals() const { return normals_; }
  const std::vector<VertexIndex>& neighbors(std::size_t v) const { return adjacency_[v]; }
  const std::vector<std::vector<VertexIndex>>& adjacency() const { return adjacency_; }

  const Vec3& vertex(std::size_t v) const { return vertices_[v]; }
  const Vec3& vertex_normal(std::size_t v) const { return normals_[v]; }

  EdgeGraphView graph() const { return {vertices_, adjacency_}; }

  /// Unit normal of face `f`; zero vector for a degenerate face.
  Vec3 face_normal(std::size_t f) const;
  double face_area(std::size_t f) const;
  double surface_area() const;
  Vec3 vertex_centroid() const;

  /// Mean length over undirected edges.
  double mean_edge_length() const;

  /// Replaces vertex positions (same count) and recomputes normals. Face
  /// topology and adjacency are untouched.
  void set_vertices(std::vector<Vec3> vertices);

  /// Angle-weighted average of incident face normals.
  void recompute_normals();

  bool is_edge_graph_connected() const;

  /// Throws GeometryError unless the mesh is non-empty, has a connected
  /// edge graph and finite coordinates.
  void validate() const;

 private:
  void build_adjacency();

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> normals_;
  std::vector<std::vector<VertexIndex>> adjacency_;
};

/// Icosahedron subdivided `subdivisions` times and projected onto a sphere
/// centered at the origin. Vertex count is 10 * 4^subdivisions + 2.
TriangleMesh make_icosphere(double radius, int subdivisions);

/// Axis-aligned box centered at the origin whose edges and corners are
/// rounded with `corner_radius`. Each cube face is a `segments` x
/// `segments` grid. A zero radius yields a plain box.
TriangleMesh make_rounded_box(const Vec3& half_extents, double corner_radius, int segments);

/// Icosphere scaled per axis into an ellipsoid with the given semi-axes.
TriangleMesh make_ellipsoid(const Vec3& semi_axes, int subdivisions);

/// Rigidly moves every vertex by `offset`.
TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset);

/// Signed enclosed volume; positive for outward-oriented closed meshes.
double signed_volume(const TriangleMesh& mesh);

}  // namespace vtrecon
