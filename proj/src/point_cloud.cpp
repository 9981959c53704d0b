#include "vtrecon/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vtrecon/errors.hpp"

namespace vtrecon {

std::vector<SurfaceSample> sample_surface_faces(const TriangleMesh& mesh, std::size_t n, std::mt19937_64& rng) {
  if (n == 0) {
    throw ParameterError("sample count must be positive");
  }
  std::vector<double> cumulative(mesh.face_count());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) {
    throw GeometryError("cannot sample a mesh with zero surface area");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SurfaceSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const auto f = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), mesh.face_count() - 1);
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const Face& face = mesh.faces()[f];
    const Vec3 p = (1.0 - r1) * mesh.vertex(face[0]) + r1 * (1.0 - r2) * mesh.vertex(face[1]) +
                   r1 * r2 * mesh.vertex(face[2]);
    out.push_back({p, f});
  }
  return out;
}

std::vector<Vec3> sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto samples = sample_surface_faces(mesh, n, rng);
  std::vector<Vec3> points;
  points.reserve(samples.size());
  for (const auto& s : samples) {
    points.push_back(s.point);
  }
  return points;
}

PointKdTree::PointKdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) {
    throw ParameterError("k-d tree needs at least one point");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(points_.size());
  build(0, points_.size());
}

std::ptrdiff_t PointKdTree::build(std::size_t begin, std::size_t end) {
  if (begin >= end) {
    return -1;
  }
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     const double pa = points_[a][axis];
                     const double pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const auto id = static_cast<std::ptrdiff_t>(nodes_.size());
  nodes_.push_back({order_[mid], axis, -1, -1, lo, hi});
  const std::ptrdiff_t left = build(begin, mid);
  const std::ptrdiff_t right = build(mid + 1, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

void PointKdTree::search(std::ptrdiff_t node_id, const Vec3& query, Neighbor& best, double& best_d2) const {
  if (node_id < 0) {
    return;
  }
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  const Vec3 gap = (node.lo - query).cwiseMax(query - node.hi).cwiseMax(0.0);
  if (gap.squaredNorm() > best_d2) {
    return;
  }
  const Vec3& p = points_[node.point];
  const double d2 = (p - query).squaredNorm();
  if (d2 < best_d2 || (d2 == best_d2 && node.point < best.index)) {
    best_d2 = d2;
    best.index = node.point;
  }
  const double delta = query[node.axis] - p[node.axis];
  const std::ptrdiff_t near = delta < 0.0 ? node.left : node.right;
  const std::ptrdiff_t far = delta < 0.0 ? node.right : node.left;
  search(near, query, best, best_d2);
  search(far, query, best, best_d2);
}

PointKdTree::Neighbor PointKdTree::nearest(const Vec3& query) const {
  Neighbor best;
  best.index = points_.size();
  double best_d2 = std::numeric_limits<double>::infinity();
  search(0, query, best, best_d2);
  best.distance = std::sqrt(best_d2);
  return best;
}

double mean_nearest_distance(std::span<const Vec3> points, const PointKdTree& tree) {
  if (points.empty()) {
    throw ParameterError("point set is empty");
  }
  double total = 0.0;
  for (const Vec3& p : points) {
    total += tree.nearest(p).distance;
  }
  return total / static_cast<double>(points.size());
}

double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) {
    throw ParameterError("chamfer distance needs two non-empty point sets");
  }
  const PointKdTree tree_a(a);
  const PointKdTree tree_b(b);
  return chamfer_distance(a, tree_a, b, tree_b);
}

double chamfer_distance(std::span<const Vec3> a, const PointKdTree& tree_a, std::span<const Vec3> b,
                        const PointKdTree& tree_b) {
  if (a.empty() || b.empty()) {
    throw ParameterError("chamfer distance needs two non-empty point sets");
  }
  return 0.5 * (mean_nearest_distance(a, tree_b) + mean_nearest_distance(b, tree_a));
}

}  // namespace vtrecon
