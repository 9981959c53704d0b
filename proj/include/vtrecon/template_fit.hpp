#pragma once

#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "vtrecon/mesh.hpp"
#include "vtrecon/sensing.hpp"

namespace vtrecon {

/// Pose and shape of the ellipsoid template. A world point x maps to the
/// template frame as y = diag(scale) * R * (x - translation); the ellipsoid
/// surface is ||y|| = 1, so the semi-axes are 1 / scale.
struct EllipsoidParams {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Vec3 translation = Vec3::Zero();
  Vec3 scale = Vec3::Ones();  // 1 / m

  /// Throws ParameterError unless the quaternion is unit length (1e-9) and
  /// every scale component is positive and finite.
  void validate() const;

  Eigen::Matrix3d rotation_matrix() const;
  Vec3 semi_axes() const { return scale.cwiseInverse(); }
};

struct FitConfig {
  double learning_rate = 1e-2;
  int max_iterations = 500;
  double convergence_tol = 1e-10;
  double init_scale_factor = 0.75;
  bool confidence_weighting = false;
  int max_halvings = 10;

  void validate() const;
};

struct FitReport {
  EllipsoidParams params;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  bool underdetermined = false;  // fewer than 4 attractors
};

/// Loss value together with its gradient over the ten raw parameters.
struct LossGradient {
  double loss = 0.0;
  Eigen::Vector4d rotation = Eigen::Vector4d::Zero();  // d/d(w, x, y, z)
  Vec3 translation = Vec3::Zero();
  Vec3 scale = Vec3::Zero();
};

Vec3 normalize_point(const Vec3& x, const EllipsoidParams& params);

/// Sum over attractors of (||y_i||^2 - 1)^2, optionally weighted by
/// (1 - uncertainty_i). Throws ParameterError on an empty set.
double ellipsoid_loss(std::span<const Attractor> attractors, const EllipsoidParams& params,
                      bool confidence_weighting = false);

/// Analytic gradient. The rotation part differentiates the quaternion
/// rotation formula in its raw components at the given (unit) quaternion.
LossGradient ellipsoid_loss_gradient(std::span<const Attractor> attractors, const EllipsoidParams& params,
                                     bool confidence_weighting = false);

/// Deliberately small starting ellipsoid: a sphere centered on the attractor
/// centroid with radius init_scale_factor times the largest centroid
/// distance. Its frame follows the principal axes of the attractors, in
/// ascending order of spread.
EllipsoidParams initial_params(std::span<const Attractor> attractors, const FitConfig& cfg);

/// Gradient descent with step halving on loss increase. Never returns a
/// loss above the initial one. Throws NumericalError on a non-finite loss.
FitReport fit_ellipsoid(std::span<const Attractor> attractors, const EllipsoidParams& init, const FitConfig& cfg);

/// Maps each template vertex v through the inverse of normalize_point:
/// R^T diag(1/s) v + t.
TriangleMesh instantiate_template(const TriangleMesh& unit_sphere, const EllipsoidParams& params);

/// Flat record "qw qx qy qz tx ty tz sx sy sz".
std::string format_params(const EllipsoidParams& params);
EllipsoidParams parse_params(std::string_view text);

}  // namespace vtrecon
