#include "vtrecon/template_fit.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vtrecon/errors.hpp"

namespace vtrecon {

namespace {

// Rotates d by the quaternion (w, v) via (w^2 - v.v) d + 2 (v.d) v + 2 w (v x d).
// For unit quaternions this equals the rotation matrix; the gradient below
// differentiates exactly this expression.
Vec3 rotate(const Eigen::Vector4d& q, const Vec3& d) {
  const double w = q[0];
  const Vec3 v = q.tail<3>();
  return (w * w - v.dot(v)) * d + 2.0 * v.dot(d) * v + 2.0 * w * v.cross(d);
}

struct Problem {
  std::vector<Vec3> points;
  std::vector<double> weights;
};

struct Theta {
  Eigen::Vector4d q;
  Vec3 t;
  Vec3 s;
};

Problem make_problem(std::span<const Attractor> attractors, bool weighting, const Vec3& center, double length) {
  Problem p;
  p.points.reserve(attractors.size());
  p.weights.reserve(attractors.size());
  for (const Attractor& a : attractors) {
    p.points.push_back((a.position - center) / length);
    p.weights.push_back(weighting ? 1.0 - a.uncertainty : 1.0);
  }
  return p;
}

double loss_of(const Problem& p, const Theta& th) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const Vec3 y = th.s.cwiseProduct(rotate(th.q, p.points[i] - th.t));
    const double r = y.squaredNorm() - 1.0;
    total += p.weights[i] * r * r;
  }
  return total;
}

LossGradient gradient_of(const Problem& p, const Theta& th) {
  LossGradient g;
  const double w = th.q[0];
  const Vec3 v = th.q.tail<3>();
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const Vec3 d = p.points[i] - th.t;
    const Vec3 z = rotate(th.q, d);
    const Vec3 y = th.s.cwiseProduct(z);
    const double r = y.squaredNorm() - 1.0;
    g.loss += p.weights[i] * r * r;

    const Vec3 dy = 4.0 * p.weights[i] * r * y;  // dL/dy
    g.scale += dy.cwiseProduct(z);
    const Vec3 dz = th.s.cwiseProduct(dy);  // dL/dz
    // dz/dt = -R, so dL/dt = -R^T dz; R^T is the rotation by the conjugate.
    g.translation -= rotate(Eigen::Vector4d(w, -v.x(), -v.y(), -v.z()), dz);
    g.rotation[0] += dz.dot(2.0 * w * d + 2.0 * v.cross(d));
    g.rotation.tail<3>() += -2.0 * d.dot(dz) * v + 2.0 * v.dot(d) * dz + 2.0 * v.dot(dz) * d + 2.0 * w * d.cross(dz);
  }
  return g;
}

Theta to_theta(const EllipsoidParams& params, const Vec3& center, double length) {
  const Eigen::Quaterniond& q = params.rotation;
  return {Eigen::Vector4d(q.w(), q.x(), q.y(), q.z()), (params.translation - center) / length,
          params.scale * length};
}

EllipsoidParams from_theta(const Theta& th, const Vec3& center, double length) {
  EllipsoidParams params;
  params.rotation = Eigen::Quaterniond(th.q[0], th.q[1], th.q[2], th.q[3]);
  params.translation = center + length * th.t;
  params.scale = th.s / length;
  return params;
}

}  // namespace

void EllipsoidParams::validate() const {
  if (std::abs(rotation.norm() - 1.0) > 1e-9) {
    throw ParameterError("ellipsoid rotation quaternion is not unit length");
  }
  if (!translation.allFinite() || !scale.allFinite() || !(scale.array() > 0.0).all()) {
    throw ParameterError("ellipsoid scale must be positive and finite");
  }
}

Eigen::Matrix3d EllipsoidParams::rotation_matrix() const {
  const Eigen::Vector4d q(rotation.w(), rotation.x(), rotation.y(), rotation.z());
  Eigen::Matrix3d m;
  for (int c = 0; c < 3; ++c) {
    m.col(c) = rotate(q, Vec3::Unit(c));
  }
  return m;
}

void FitConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw ParameterError("learning_rate must be positive");
  }
  if (max_iterations < 1) {
    throw ParameterError("max_iterations must be >= 1");
  }
  if (!(convergence_tol >= 0.0)) {
    throw ParameterError("convergence_tol must be non-negative");
  }
  if (!(init_scale_factor > 0.0)) {
    throw ParameterError("init_scale_factor must be positive");
  }
  if (max_halvings < 0) {
    throw ParameterError("max_halvings must be non-negative");
  }
}

Vec3 normalize_point(const Vec3& x, const EllipsoidParams& params) {
  const Eigen::Vector4d q(params.rotation.w(), params.rotation.x(), params.rotation.y(), params.rotation.z());
  return params.scale.cwiseProduct(rotate(q, x - params.translation));
}

double ellipsoid_loss(std::span<const Attractor> attractors, const EllipsoidParams& params,
                      bool confidence_weighting) {
  if (attractors.empty()) {
    throw ParameterError("ellipsoid loss needs at least one attractor");
  }
  double total = 0.0;
  for (const Attractor& a : attractors) {
    const double r = normalize_point(a.position, params).squaredNorm() - 1.0;
    total += (confidence_weighting ? 1.0 - a.uncertainty : 1.0) * r * r;
  }
  return total;
}

LossGradient ellipsoid_loss_gradient(std::span<const Attractor> attractors, const EllipsoidParams& params,
                                     bool confidence_weighting) {
  if (attractors.empty()) {
    throw ParameterError("ellipsoid loss needs at least one attractor");
  }
  const Problem p = make_problem(attractors, confidence_weighting, Vec3::Zero(), 1.0);
  return gradient_of(p, to_theta(params, Vec3::Zero(), 1.0));
}

EllipsoidParams initial_params(std::span<const Attractor> attractors, const FitConfig& cfg) {
  if (attractors.empty()) {
    throw ParameterError("cannot initialize an ellipsoid without attractors");
  }
  Vec3 centroid = Vec3::Zero();
  for (const Attractor& a : attractors) {
    centroid += a.position;
  }
  centroid /= static_cast<double>(attractors.size());
  double spread = 0.0;
  for (const Attractor& a : attractors) {
    spread = std::max(spread, (a.position - centroid).norm());
  }
  if (!(spread > 0.0)) {
    throw ParameterError("attractors are all coincident");
  }
  // Align the starting axes with the principal directions of the attractors.
  // A sphere has no preferred frame, and starting from an arbitrary one lets
  // thin shapes settle into a large, shifted ellipsoid through the points.
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Attractor& a : attractors) {
    cov += (a.position - centroid) * (a.position - centroid).transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Eigen::Matrix3d axes = eig.eigenvectors();
  if (axes.determinant() < 0.0) {
    axes.col(0) *= -1.0;
  }
  EllipsoidParams params;
  params.rotation = Eigen::Quaterniond(Eigen::Matrix3d(axes.transpose())).normalized();
  if (params.rotation.w() < 0.0) {
    params.rotation.coeffs() *= -1.0;
  }
  params.translation = centroid;
  params.scale = Vec3::Constant(1.0 / (cfg.init_scale_factor * spread));
  return params;
}

FitReport fit_ellipsoid(std::span<const Attractor> attractors, const EllipsoidParams& init, const FitConfig& cfg) {
  if (attractors.empty()) {
    throw ParameterError("ellipsoid fit needs at least one attractor");
  }
  cfg.validate();
  init.validate();

  // Descend in a frame centered on the attractors and scaled to unit RMS
  // radius. The loss is unchanged by this change of variables; it only
  // makes the step size independent of object size and placement.
  Vec3 center = Vec3::Zero();
  for (const Attractor& a : attractors) {
    center += a.position;
  }
  center /= static_cast<double>(attractors.size());
  double rms = 0.0;
  for (const Attractor& a : attractors) {
    rms += (a.position - center).squaredNorm();
  }
  rms = std::sqrt(rms / static_cast<double>(attractors.size()));
  const double length = rms > 0.0 ? rms : 1.0;

  const Problem problem = make_problem(attractors, cfg.confidence_weighting, center, length);
  Theta theta = to_theta(init, center, length);

  FitReport report;
  report.underdetermined = attractors.size() < 4;
  double loss = loss_of(problem, theta);
  if (!std::isfinite(loss)) {
    throw NumericalError("ellipsoid loss is not finite at the initial parameters");
  }
  report.initial_loss = loss;

  double step = cfg.learning_rate;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const LossGradient g = gradient_of(problem, theta);
    if (!std::isfinite(g.loss) || !g.rotation.allFinite() || !g.translation.allFinite() ||
        !g.scale.allFinite()) {
      throw NumericalError("ellipsoid gradient is not finite");
    }
    bool accepted = false;
    bool first_try = true;
    Theta candidate;
    double candidate_loss = loss;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      candidate.q = theta.q - step * g.rotation;
      candidate.t = theta.t - step * g.translation;
      candidate.s = theta.s - step * g.scale;
      const double qn = candidate.q.norm();
      if (qn > 0.0 && (candidate.s.array() > 0.0).all()) {
        candidate.q /= qn;
        candidate_loss = loss_of(problem, candidate);
        if (!std::isfinite(candidate_loss)) {
          throw NumericalError("ellipsoid loss diverged; reduce the learning rate");
        }
        if (candidate_loss < loss) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
      first_try = false;
    }
    report.iterations = it + 1;
    if (!accepted) {
      report.converged = true;
      break;
    }
    const double delta = loss - candidate_loss;
    theta = candidate;
    loss = candidate_loss;
    if (delta < cfg.convergence_tol) {
      report.converged = true;
      break;
    }
    if (first_try) {
      step *= 2.0;
    }
  }

  report.params = from_theta(theta, center, length);
  report.final_loss = loss;
  return report;
}

TriangleMesh instantiate_template(const TriangleMesh& unit_sphere, const EllipsoidParams& params) {
  params.validate();
  const Eigen::Matrix3d rt = params.rotation_matrix().transpose();
  const Vec3 inv_scale = params.scale.cwiseInverse();
  std::vector<Vec3> verts;
  verts.reserve(unit_sphere.vertex_count());
  for (const Vec3& v : unit_sphere.vertices()) {
    verts.push_back(rt * inv_scale.cwiseProduct(v) + params.translation);
  }
  return TriangleMesh(std::move(verts), unit_sphere.faces());
}

std::string format_params(const EllipsoidParams& params) {
  std::ostringstream out;
  out << std::setprecision(17) << params.rotation.w() << ' ' << params.rotation.x() << ' ' << params.rotation.y()
      << ' ' << params.rotation.z() << ' ' << params.translation.x() << ' ' << params.translation.y() << ' '
      << params.translation.z() << ' ' << params.scale.x() << ' ' << params.scale.y() << ' ' << params.scale.z();
  return out.str();
}

EllipsoidParams parse_params(std::string_view text) {
  std::istringstream in{std::string(text)};
  double v[10];
  for (double& x : v) {
    if (!(in >> x)) {
      throw IoError("ellipsoid parameter record needs 10 numbers");
    }
  }
  EllipsoidParams params;
  params.rotation = Eigen::Quaterniond(v[0], v[1], v[2], v[3]);
  params.translation = Vec3(v[4], v[5], v[6]);
  params.scale = Vec3(v[7], v[8], v[9]);
  params.validate();
  return params;
}

}  // namespace vtrecon
