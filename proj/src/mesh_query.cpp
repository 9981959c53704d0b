#include "vtrecon/mesh_query.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "vtrecon/errors.hpp"

namespace vtrecon {

TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk over vertices, edges and the interior.
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) {
    return {a, Vec3(1, 0, 0)};
  }
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) {
    return {b, Vec3(0, 1, 0)};
  }
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {a + v * ab, Vec3(1 - v, v, 0)};
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) {
    return {c, Vec3(0, 0, 1)};
  }
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {a + w * ac, Vec3(1 - w, 0, w)};
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + w * (c - b), Vec3(0, 1 - w, w)};
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return {a + ab * v + ac * w, Vec3(1 - v - w, v, w)};
}

std::optional<SegmentHit> intersect_segment_triangle(const Vec3& start, const Vec3& end, const Vec3& a,
                                                     const Vec3& b, const Vec3& c) {
  // Woop, Benthin and Wald's watertight test: shear the triangle into ray
  // space and evaluate the 2D edge functions there, falling back to
  // extended precision when one of them rounds to zero.
  const Vec3 dir = end - start;
  int kz = 0;
  dir.cwiseAbs().maxCoeff(&kz);
  if (dir[kz] == 0.0) {
    return std::nullopt;
  }
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < 0.0) {
    std::swap(kx, ky);
  }
  const double sx = dir[kx] / dir[kz];
  const double sy = dir[ky] / dir[kz];
  const double sz = 1.0 / dir[kz];

  const Vec3 pa = a - start;
  const Vec3 pb = b - start;
  const Vec3 pc = c - start;
  const double ax = pa[kx] - sx * pa[kz];
  const double ay = pa[ky] - sy * pa[kz];
  const double bx = pb[kx] - sx * pb[kz];
  const double by = pb[ky] - sy * pb[kz];
  const double cx = pc[kx] - sx * pc[kz];
  const double cy = pc[ky] - sy * pc[kz];

  double u = cx * by - cy * bx;
  double v = ax * cy - ay * cx;
  double w = bx * ay - by * ax;
  if (u == 0.0 || v == 0.0 || w == 0.0) {
    using LD = long double;
    u = static_cast<double>(static_cast<LD>(cx) * by - static_cast<LD>(cy) * bx);
    v = static_cast<double>(static_cast<LD>(ax) * cy - static_cast<LD>(ay) * cx);
    w = static_cast<double>(static_cast<LD>(bx) * ay - static_cast<LD>(by) * ax);
  }
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) {
    return std::nullopt;
  }
  const double det = u + v + w;
  if (det == 0.0) {
    return std::nullopt;
  }
  const double az = sz * pa[kz];
  const double bz = sz * pb[kz];
  const double cz = sz * pc[kz];
  const double t = (u * az + v * bz + w * cz) / det;
  if (!(t >= 0.0 && t <= 1.0)) {
    return std::nullopt;
  }
  SegmentHit hit;
  hit.parameter = t;
  hit.barycentric = Vec3(u, v, w) / det;
  hit.point = hit.barycentric[0] * a + hit.barycentric[1] * b + hit.barycentric[2] * c;
  return hit;
}

namespace {

double box_distance_squared(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  const Vec3 d = (lo - p).cwiseMax(Vec3::Zero()).cwiseMax(p - hi);
  return d.squaredNorm();
}

bool segment_hits_box(const Vec3& start, const Vec3& dir, double t_max, const Vec3& lo, const Vec3& hi) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (start[a] < lo[a] || start[a] > hi[a]) {
        return false;
      }
      continue;
    }
    const double inv = 1.0 / dir[a];
    double near = (lo[a] - start[a]) * inv;
    double far = (hi[a] - start[a]) * inv;
    if (near > far) {
      std::swap(near, far);
    }
    // Slightly inflated so rounding never culls a grazing hit.
    far *= 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) {
      return false;
    }
  }
  return true;
}

constexpr std::size_t kLeafSize = 4;

}  // namespace

SurfaceIndex::SurfaceIndex(const TriangleMesh& mesh, std::size_t bvh_threshold)
    : vertices_(mesh.vertices()), faces_(mesh.faces()) {
  if (faces_.empty()) {
    throw GeometryError("surface index needs at least one face");
  }
  face_normals_.reserve(faces_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    face_normals_.push_back(mesh.face_normal(f));
  }
  face_order_.resize(faces_.size());
  std::iota(face_order_.begin(), face_order_.end(), 0);
  if (faces_.size() > bvh_threshold) {
    std::vector<Vec3> centroids;
    centroids.reserve(faces_.size());
    for (const Face& f : faces_) {
      centroids.push_back((vertices_[f[0]] + vertices_[f[1]] + vertices_[f[2]]) / 3.0);
    }
    nodes_.reserve(2 * faces_.size() / kLeafSize + 1);
    build(0, faces_.size(), centroids);
  }
}

std::size_t SurfaceIndex::build(std::size_t begin, std::size_t end, const std::vector<Vec3>& centroids) {
  Node node;
  node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  Vec3 clo = node.lo;
  Vec3 chi = node.hi;
  for (std::size_t i = begin; i < end; ++i) {
    const Face& f = faces_[face_order_[i]];
    for (VertexIndex v : f) {
      node.lo = node.lo.cwiseMin(vertices_[v]);
      node.hi = node.hi.cwiseMax(vertices_[v]);
    }
    clo = clo.cwiseMin(centroids[face_order_[i]]);
    chi = chi.cwiseMax(centroids[face_order_[i]]);
  }
  const std::size_t id = nodes_.size();
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) {
    nodes_[id].leaf = true;
    nodes_[id].left = begin;
    nodes_[id].right = end - begin;
    return id;
  }
  int axis = 0;
  (chi - clo).maxCoeff(&axis);
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(face_order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   face_order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   face_order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t x, std::size_t y) {
                     const double cx = centroids[x][axis];
                     const double cy = centroids[y][axis];
                     return cx < cy || (cx == cy && x < y);
                   });
  const std::size_t left = build(begin, mid, centroids);
  const std::size_t right = build(mid, end, centroids);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void SurfaceIndex::consider_face(std::size_t f, const Vec3& query, SurfaceProjection& best,
                                 double& best_d2) const {
  const Face& face = faces_[f];
  const TrianglePoint tp =
      closest_point_on_triangle(query, vertices_[face[0]], vertices_[face[1]], vertices_[face[2]]);
  const double d2 = (tp.point - query).squaredNorm();
  if (d2 < best_d2 || (d2 == best_d2 && f < best.face_index)) {
    best_d2 = d2;
    best.point = tp.point;
    best.barycentric = tp.barycentric;
    best.face_index = f;
  }
}

void SurfaceIndex::consider_face(std::size_t f, const Vec3& start, const Vec3& end,
                                 std::optional<SegmentHit>& best) const {
  const Face& face = faces_[f];
  auto hit = intersect_segment_triangle(start, end, vertices_[face[0]], vertices_[face[1]], vertices_[face[2]]);
  if (!hit) {
    return;
  }
  if (!best || hit->parameter < best->parameter ||
      (hit->parameter == best->parameter && f < best->face_index)) {
    hit->face_index = f;
    best = hit;
  }
}

SurfaceProjection SurfaceIndex::project(const Vec3& query) const {
  SurfaceProjection best;
  best.face_index = faces_.size();
  double best_d2 = std::numeric_limits<double>::infinity();
  if (nodes_.empty()) {
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      consider_face(f, query, best, best_d2);
    }
  } else {
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
      const Node& node = nodes_[stack.back()];
      stack.pop_back();
      if (box_distance_squared(query, node.lo, node.hi) > best_d2) {
        continue;
      }
      if (node.leaf) {
        for (std::size_t i = node.left; i < node.left + node.right; ++i) {
          consider_face(face_order_[i], query, best, best_d2);
        }
        continue;
      }
      const double dl = box_distance_squared(query, nodes_[node.left].lo, nodes_[node.left].hi);
      const double dr = box_distance_squared(query, nodes_[node.right].lo, nodes_[node.right].hi);
      // Push the farther child first so the nearer one is visited next.
      if (dl <= dr) {
        stack.push_back(node.right);
        stack.push_back(node.left);
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
  }
  best.distance = std::sqrt(best_d2);
  best.normal = face_normals_[best.face_index];
  return best;
}

std::optional<SegmentHit> SurfaceIndex::intersect(const Vec3& start, const Vec3& end) const {
  if (start == end) {
    throw ParameterError("segment endpoints must differ");
  }
  std::optional<SegmentHit> best;
  if (nodes_.empty()) {
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      consider_face(f, start, end, best);
    }
    return best;
  }
  const Vec3 dir = end - start;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    const double t_max = best ? best->parameter : 1.0;
    if (!segment_hits_box(start, dir, t_max, node.lo, node.hi)) {
      continue;
    }
    if (node.leaf) {
      for (std::size_t i = node.left; i < node.left + node.right; ++i) {
        consider_face(face_order_[i], start, end, best);
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return best;
}

SurfaceProjection project_point(const TriangleMesh& mesh, const Vec3& query) {
  return SurfaceIndex(mesh).project(query);
}

std::optional<SegmentHit> segment_intersect(const TriangleMesh& mesh, const Vec3& start, const Vec3& end) {
  return SurfaceIndex(mesh).intersect(start, end);
}

}  // namespace vtrecon
