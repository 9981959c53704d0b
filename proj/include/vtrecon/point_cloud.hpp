#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vtrecon/mesh.hpp"

namespace vtrecon {

struct SurfaceSample {
  Vec3 point;
  std::size_t face_index = 0;
};

/// Area-weighted uniform samples drawn from `rng`. Throws GeometryError
/// when the mesh has zero total area.
std::vector<SurfaceSample> sample_surface_faces(const TriangleMesh& mesh, std::size_t n, std::mt19937_64& rng);

/// `n` area-weighted uniform surface samples, reproducible for a fixed seed.
std::vector<Vec3> sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Static 3D k-d tree for nearest-neighbor queries.
class PointKdTree {
 public:
  explicit PointKdTree(std::span<const Vec3> points);

  struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
  };

  /// Nearest stored point; ties go to the lowest original index.
  Neighbor nearest(const Vec3& query) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t point = 0;  // original index of the splitting point
    int axis = 0;
    std::ptrdiff_t left = -1;
    std::ptrdiff_t right = -1;
    Vec3 lo;  // bounds of the subtree
    Vec3 hi;
  };

  std::ptrdiff_t build(std::size_t begin, std::size_t end);
  void search(std::ptrdiff_t node, const Vec3& query, Neighbor& best, double& best_d2) const;

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Mean over `points` of the distance to the nearest point held by `tree`.
double mean_nearest_distance(std::span<const Vec3> points, const PointKdTree& tree);

/// Symmetric chamfer distance: half the sum of the two one-sided mean
/// nearest-neighbor distances. Throws ParameterError on an empty set.
double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b);

/// Same, reusing prebuilt trees (`tree_a` indexes `a`, `tree_b` indexes `b`).
double chamfer_distance(std::span<const Vec3> a, const PointKdTree& tree_a, std::span<const Vec3> b,
                        const PointKdTree& tree_b);

}  // namespace vtrecon
