#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vtrecon/mesh.hpp"

namespace vtrecon {

enum class AttractorSource { visual, tactile };

std::string_view to_string(AttractorSource source);
AttractorSource parse_attractor_source(std::string_view text);

/// A surface evidence point that pulls the estimated mesh toward it.
struct Attractor {
  Vec3 position = Vec3::Zero();
  double uncertainty = 1.0;  // in [0, 1]
  AttractorSource source = AttractorSource::visual;
};

/// Force/torque measured by the fingertip pad at a contact.
struct ContactReading {
  double force_z = 0.0;   // N
  double torque_x = 0.0;  // N m
  double torque_y = 0.0;  // N m
};

struct SensorModel {
  double u_max = 0.5;
  double pad_radius = 0.009;  // m
  double nominal_force = 5.0; // N
  std::uint64_t offset_noise_seed = 0;

  void validate() const;
};

/// Single-view visual prior. The viewer looks along `view_direction`;
/// a surface point is visible when its face normal points back at the
/// viewer and the angle, seen from the truth centroid, between the point
/// and the direction toward the viewer is within `cone_half_angle`.
struct VisualPriorConfig {
  // acos(0.8): the visible cap of a sphere is 10% of its surface.
  static constexpr double kTenPercentCapAngle = 0.6435011087932844;

  Vec3 view_direction = Vec3(-1.0, 0.0, 0.0);
  double cone_half_angle = kTenPercentCapAngle;
  std::size_t n_points = 100;
  double position_noise_sigma = 0.001;  // m
  double visual_uncertainty = 0.4;
  std::uint64_t seed = 0;

  void validate() const;
};

/// u = u_max (|Tx| + |Ty|) / (2 |Fz| + |Tx| + |Ty|). Throws NoContactError
/// for an all-zero reading.
double attractor_uncertainty(const ContactReading& reading, const SensorModel& model);

/// Rigid moment-arm reading for a contact at `offset` from the pad center.
/// Returns nullopt when the offset falls outside the pad (the sensing part
/// misses the object).
std::optional<ContactReading> simulate_reading(const Eigen::Vector2d& offset, const SensorModel& model);

/// Noisy visible-surface samples of `truth`, all tagged visual with the
/// configured uncertainty. Throws ConfigError when nothing is visible.
std::vector<Attractor> sample_visual_prior(const TriangleMesh& truth, const VisualPriorConfig& cfg);

/// One attractor per line: `x y z uncertainty source`.
void write_attractors(std::ostream& out, std::span<const Attractor> attractors);
std::vector<Attractor> read_attractors(std::istream& in);

}  // namespace vtrecon
