#include "vtrecon/local_deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "vtrecon/errors.hpp"
#include "vtrecon/mesh_query.hpp"

namespace vtrecon {

namespace {

constexpr double kDuplicateSiteTolerance = 1e-9;

double kernel(double r) { return r * r * r; }

}  // namespace

RbfInterpolant::RbfInterpolant(std::vector<Vec3> centers, std::vector<double> weights, Eigen::Vector4d affine)
    : centers_(std::move(centers)), weights_(std::move(weights)), affine_(affine) {
  if (centers_.size() != weights_.size()) {
    throw ParameterError("interpolant centers and weights differ in length");
  }
}

double RbfInterpolant::operator()(const Vec3& x) const {
  double value = affine_[0] + affine_.tail<3>().dot(x);
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    value += weights_[i] * kernel((x - centers_[i]).norm());
  }
  return value;
}

std::vector<DisplacementSample> compute_displacement_samples(const TriangleMesh& global_mesh,
                                                             std::span<const Attractor> attractors) {
  const SurfaceIndex index(global_mesh);
  std::vector<DisplacementSample> out;
  out.reserve(attractors.size());
  for (const Attractor& a : attractors) {
    const SurfaceProjection proj = index.project(a.position);
    DisplacementSample s;
    s.site = proj.point;
    s.normal = proj.normal;
    s.displacement = (a.position - proj.point).dot(proj.normal);
    s.uncertainty = a.uncertainty;
    out.push_back(s);
  }
  return out;
}

std::vector<DisplacementSample> deduplicate_sites(std::span<const DisplacementSample> samples) {
  std::vector<DisplacementSample> kept;
  kept.reserve(samples.size());
  for (const DisplacementSample& s : samples) {
    auto dup = std::find_if(kept.begin(), kept.end(), [&](const DisplacementSample& k) {
      return (k.site - s.site).norm() < kDuplicateSiteTolerance;
    });
    if (dup == kept.end()) {
      kept.push_back(s);
    } else if (s.uncertainty < dup->uncertainty) {
      *dup = s;
    }
  }
  return kept;
}

double default_regularization(std::span<const DisplacementSample> samples) {
  if (samples.size() < 2) {
    return 0.0;
  }
  Vec3 centroid = Vec3::Zero();
  for (const DisplacementSample& s : samples) {
    centroid += s.site;
  }
  centroid /= static_cast<double>(samples.size());
  double ms = 0.0;
  for (const DisplacementSample& s : samples) {
    ms += (s.site - centroid).squaredNorm();
  }
  const double radius = std::sqrt(ms / static_cast<double>(samples.size()));
  return kRelativeRegularization * radius * radius * radius;
}

RbfInterpolant fit_interpolant(std::span<const DisplacementSample> samples, double regularization) {
  if (samples.empty()) {
    throw ParameterError("interpolant needs at least one sample");
  }
  if (regularization < 0.0) {
    throw ParameterError("regularization must be non-negative");
  }
  const std::vector<DisplacementSample> unique = deduplicate_sites(samples);
  const auto n = static_cast<Eigen::Index>(unique.size());

  std::vector<Vec3> centers;
  centers.reserve(unique.size());
  bool all_zero = true;
  for (const DisplacementSample& s : unique) {
    centers.push_back(s.site);
    all_zero = all_zero && s.displacement == 0.0;
  }
  if (all_zero) {
    return RbfInterpolant(std::move(centers), std::vector<double>(unique.size(), 0.0), Eigen::Vector4d::Zero());
  }

  // [ K + lambda I   P ] [w]   [d]
  // [ P^T            0 ] [b] = [0]
  // with the affine basis centered on the site centroid c, so that
  // F(x) = ... + b0 + b . (x - c).
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& c : centers) {
    centroid += c;
  }
  centroid /= static_cast<double>(n);

  const Eigen::Index m = n + 4;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = kernel((centers[i] - centers[j]).norm());
    }
    a(i, i) += regularization;
    a(i, n) = 1.0;
    a(n, i) = 1.0;
    const Vec3 rel = centers[i] - centroid;
    for (int k = 0; k < 3; ++k) {
      a(i, n + 1 + k) = rel[k];
      a(n + 1 + k, i) = rel[k];
    }
    rhs[i] = unique[i].displacement;
  }

  // Fewer than four sites, or coplanar sites, leave part of the affine term
  // undetermined; the minimum-norm solution then sets that part to zero.
  Eigen::VectorXd sol;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  if (cod.rank() < m) {
    sol = cod.solve(rhs);
  } else {
    sol = a.partialPivLu().solve(rhs);
  }
  if (!sol.allFinite()) {
    throw NumericalError("interpolation system is singular");
  }
  const double residual = (a * sol - rhs).norm();
  if (residual > 1e-6 * std::max(1.0, rhs.norm())) {
    throw NumericalError("interpolation system is singular");
  }

  std::vector<double> weights(sol.data(), sol.data() + n);
  const Vec3 linear = sol.tail<3>();
  const Eigen::Vector4d affine(sol[n] - linear.dot(centroid), linear.x(), linear.y(), linear.z());
  return RbfInterpolant(std::move(centers), std::move(weights), affine);
}

TriangleMesh apply_deformation(const TriangleMesh& global_mesh, const RbfInterpolant& interpolant,
                               double max_displacement) {
  if (!(max_displacement >= 0.0)) {
    throw ParameterError("max_displacement must be non-negative");
  }
  std::vector<Vec3> verts = global_mesh.vertices();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const double d = std::clamp(interpolant(verts[i]), -max_displacement, max_displacement);
    verts[i] += d * global_mesh.vertex_normal(i);
  }
  return TriangleMesh(std::move(verts), global_mesh.faces());
}

}  // namespace vtrecon
