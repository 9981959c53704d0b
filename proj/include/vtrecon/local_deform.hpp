#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "vtrecon/mesh.hpp"
#include "vtrecon/sensing.hpp"

namespace vtrecon {

/// Signed normal offset of an attractor from its projection on the global
/// mesh: attractor = site + displacement * normal.
struct DisplacementSample {
  Vec3 site = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double displacement = 0.0;
  double uncertainty = 0.0;  // of the source attractor; decides duplicate sites
};

/// F(x) = sum_i w_i |x - c_i|^3 + a0 + a . x, with sum w_i = 0 and
/// sum w_i c_i = 0.
class RbfInterpolant {
 public:
  RbfInterpolant() = default;
  RbfInterpolant(std::vector<Vec3> centers, std::vector<double> weights, Eigen::Vector4d affine);

  double operator()(const Vec3& x) const;

  const std::vector<Vec3>& centers() const { return centers_; }
  const std::vector<double>& weights() const { return weights_; }
  const Eigen::Vector4d& affine() const { return affine_; }  // (a0, ax, ay, az)

 private:
  std::vector<Vec3> centers_;
  std::vector<double> weights_;
  Eigen::Vector4d affine_ = Eigen::Vector4d::Zero();
};

std::vector<DisplacementSample> compute_displacement_samples(const TriangleMesh& global_mesh,
                                                             std::span<const Attractor> attractors);

/// Sites closer than 1e-9 m are merged, keeping the lower-uncertainty
/// sample (first one on ties). Output keeps input order.
std::vector<DisplacementSample> deduplicate_sites(std::span<const DisplacementSample> samples);

/// Solves the augmented cubic-kernel system with `regularization` added to
/// the kernel diagonal. Samples are deduplicated first. Throws
/// ParameterError on an empty set and NumericalError if the system is
/// singular.
RbfInterpolant fit_interpolant(std::span<const DisplacementSample> samples, double regularization);

/// Ridge scaled to the site cloud: kRelativeRegularization times the cubed
/// RMS distance of the sites from their centroid. Heavy enough to keep
/// millimeter noise on dense visual points from ringing across the mesh.
inline constexpr double kRelativeRegularization = 1e-2;
double default_regularization(std::span<const DisplacementSample> samples);

/// Moves every vertex along its normal by F(v) clamped to +-max_displacement.
TriangleMesh apply_deformation(const TriangleMesh& global_mesh, const RbfInterpolant& interpolant,
                               double max_displacement);

}  // namespace vtrecon
