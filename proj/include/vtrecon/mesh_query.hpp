#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vtrecon/mesh.hpp"

namespace vtrecon {

/// Closest point of a mesh surface to a query point.
struct SurfaceProjection {
  Vec3 point;
  std::size_t face_index = 0;
  Vec3 normal;        // unit normal of `face_index`
  double distance = 0.0;
  Vec3 barycentric;   // weights of the face's three corners
};

struct SegmentHit {
  Vec3 point;
  std::size_t face_index = 0;
  double parameter = 0.0;  // position along the segment, in [0, 1]
  Vec3 barycentric;
};

struct TrianglePoint {
  Vec3 point;
  Vec3 barycentric;
};

/// Closest point on triangle (a, b, c) to p, with its barycentric weights.
TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Watertight segment/triangle test. `end != start`. Returns the hit with
/// its segment parameter in [0, 1]; edges shared by two triangles are
/// never missed by both.
std::optional<SegmentHit> intersect_segment_triangle(const Vec3& start, const Vec3& end, const Vec3& a,
                                                     const Vec3& b, const Vec3& c);

/// Closest-point and segment queries over a fixed mesh. Meshes with more
/// than `bvh_threshold` faces are served by an axis-aligned bounding volume
/// hierarchy; smaller meshes are scanned exhaustively. The index keeps its
/// own copy of the geometry. Ties resolve to the lowest face index.
class SurfaceIndex {
 public:
  static constexpr std::size_t kDefaultBvhThreshold = 1000;

  explicit SurfaceIndex(const TriangleMesh& mesh, std::size_t bvh_threshold = kDefaultBvhThreshold);

  SurfaceProjection project(const Vec3& query) const;

  /// Intersection closest to `start`, if the segment crosses any face.
  std::optional<SegmentHit> intersect(const Vec3& start, const Vec3& end) const;

  bool uses_bvh() const { return !nodes_.empty(); }
  std::size_t face_count() const { return faces_.size(); }

 private:
  struct Node {
    Eigen::Vector3d lo;
    Eigen::Vector3d hi;
    std::size_t left = 0;   // child index, or first entry of face_order_ for a leaf
    std::size_t right = 0;  // child index, or entry count for a leaf
    bool leaf = false;
  };

  std::size_t build(std::size_t begin, std::size_t end, const std::vector<Vec3>& centroids);
  void consider_face(std::size_t f, const Vec3& query, SurfaceProjection& best, double& best_d2) const;
  void consider_face(std::size_t f, const Vec3& start, const Vec3& end, std::optional<SegmentHit>& best) const;

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> face_normals_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> face_order_;
};

/// One-shot convenience wrappers; build a SurfaceIndex for repeated queries.
SurfaceProjection project_point(const TriangleMesh& mesh, const Vec3& query);
std::optional<SegmentHit> segment_intersect(const TriangleMesh& mesh, const Vec3& start, const Vec3& end);

}  // namespace vtrecon
