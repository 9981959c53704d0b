#include "vtrecon/sensing.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "vtrecon/errors.hpp"
#include "vtrecon/point_cloud.hpp"

namespace vtrecon {

std::string_view to_string(AttractorSource source) {
  return source == AttractorSource::visual ? "visual" : "tactile";
}

AttractorSource parse_attractor_source(std::string_view text) {
  if (text == "visual") {
    return AttractorSource::visual;
  }
  if (text == "tactile") {
    return AttractorSource::tactile;
  }
  throw ParameterError("unknown attractor source '" + std::string(text) + "'");
}

void SensorModel::validate() const {
  if (!(u_max > 0.0 && u_max <= 1.0)) {
    throw ParameterError("u_max must be in (0, 1]");
  }
  if (!(pad_radius > 0.0)) {
    throw ParameterError("pad_radius must be positive");
  }
  if (!(nominal_force > 0.0)) {
    throw ParameterError("nominal_force must be positive");
  }
}

void VisualPriorConfig::validate() const {
  if (!(view_direction.norm() > 0.0)) {
    throw ParameterError("view_direction must be non-zero");
  }
  if (!(cone_half_angle > 0.0 && cone_half_angle < std::numbers::pi / 2)) {
    throw ParameterError("cone_half_angle must be in (0, pi/2)");
  }
  if (n_points == 0) {
    throw ParameterError("visual prior needs at least one point");
  }
  if (position_noise_sigma < 0.0) {
    throw ParameterError("position_noise_sigma must be non-negative");
  }
  if (!(visual_uncertainty >= 0.0 && visual_uncertainty <= 1.0)) {
    throw ParameterError("visual_uncertainty must be in [0, 1]");
  }
}

double attractor_uncertainty(const ContactReading& reading, const SensorModel& model) {
  const double torque = std::abs(reading.torque_x) + std::abs(reading.torque_y);
  const double force = std::abs(reading.force_z);
  if (torque == 0.0 && force == 0.0) {
    throw NoContactError("reading has neither force nor torque");
  }
  return model.u_max * torque / (2.0 * force + torque);
}

std::optional<ContactReading> simulate_reading(const Eigen::Vector2d& offset, const SensorModel& model) {
  if (offset.norm() > model.pad_radius) {
    return std::nullopt;
  }
  ContactReading r;
  r.force_z = model.nominal_force;
  r.torque_x = model.nominal_force * offset.y();
  r.torque_y = model.nominal_force * offset.x();
  return r;
}

std::vector<Attractor> sample_visual_prior(const TriangleMesh& truth, const VisualPriorConfig& cfg) {
  cfg.validate();
  const Vec3 view = cfg.view_direction.normalized();
  const Vec3 toward_viewer = -view;
  const Vec3 centroid = truth.vertex_centroid();
  const double cos_limit = std::cos(cfg.cone_half_angle);

  std::vector<Vec3> face_normals(truth.face_count());
  for (std::size_t f = 0; f < truth.face_count(); ++f) {
    face_normals[f] = truth.face_normal(f);
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<Vec3> accepted;
  accepted.reserve(cfg.n_points);
  const std::size_t batch = std::max<std::size_t>(256, 4 * cfg.n_points);
  const std::size_t max_draws = std::max<std::size_t>(1'000'000, 2000 * cfg.n_points);
  std::size_t draws = 0;
  while (accepted.size() < cfg.n_points && draws < max_draws) {
    for (const SurfaceSample& s : sample_surface_faces(truth, batch, rng)) {
      ++draws;
      if (face_normals[s.face_index].dot(view) >= 0.0) {
        continue;
      }
      const Vec3 rel = s.point - centroid;
      const double len = rel.norm();
      if (len == 0.0 || rel.dot(toward_viewer) < cos_limit * len) {
        continue;
      }
      accepted.push_back(s.point);
      if (accepted.size() == cfg.n_points) {
        break;
      }
    }
  }
  if (accepted.size() < cfg.n_points) {
    throw ConfigError("visual prior: only " + std::to_string(accepted.size()) + " of " +
                      std::to_string(cfg.n_points) + " points visible in the view cone");
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Attractor> out;
  out.reserve(accepted.size());
  for (const Vec3& p : accepted) {
    Vec3 pos = p;
    if (cfg.position_noise_sigma > 0.0) {
      const double nx = noise(rng);
      const double ny = noise(rng);
      const double nz = noise(rng);
      pos += cfg.position_noise_sigma * Vec3(nx, ny, nz);
    }
    out.push_back({pos, cfg.visual_uncertainty, AttractorSource::visual});
  }
  return out;
}

void write_attractors(std::ostream& out, std::span<const Attractor> attractors) {
  out << std::setprecision(17);
  for (const Attractor& a : attractors) {
    out << a.position.x() << ' ' << a.position.y() << ' ' << a.position.z() << ' ' << a.uncertainty << ' '
        << to_string(a.source) << '\n';
  }
}

std::vector<Attractor> read_attractors(std::istream& in) {
  std::vector<Attractor> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream ls(line);
    Attractor a;
    std::string source;
    if (!(ls >> a.position.x() >> a.position.y() >> a.position.z() >> a.uncertainty >> source)) {
      throw IoError("attractor line " + std::to_string(line_no) + " is malformed");
    }
    if (!(a.uncertainty >= 0.0 && a.uncertainty <= 1.0)) {
      throw IoError("attractor line " + std::to_string(line_no) + ": uncertainty outside [0, 1]");
    }
    try {
      a.source = parse_attractor_source(source);
    } catch (const ParameterError& e) {
      throw IoError("attractor line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace vtrecon
