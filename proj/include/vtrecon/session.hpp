#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vtrecon/exploration.hpp"
#include "vtrecon/mesh.hpp"
#include "vtrecon/mesh_query.hpp"
#include "vtrecon/point_cloud.hpp"
#include "vtrecon/sensing.hpp"
#include "vtrecon/template_fit.hpp"
#include "vtrecon/uncertainty_field.hpp"

namespace vtrecon {

/// Where the ground-truth surface comes from.
enum class TruthShape { mesh_file, sphere, ellipsoid, rounded_box };

std::string_view to_string(TruthShape shape);
TruthShape parse_truth_shape(std::string_view text);

struct SessionConfig {
  std::string name = "object";

  // Ground truth: an OBJ file, or a procedural shape centered at
  // `truth_center`. `truth_extents` holds the radius (x component) for a
  // sphere, the semi-axes for an ellipsoid and the half extents for a box.
  TruthShape truth_shape = TruthShape::sphere;
  std::filesystem::path truth_mesh_path;
  Vec3 truth_extents = Vec3::Constant(0.1);
  Vec3 truth_center = Vec3::Zero();
  double truth_corner_radius = 0.01;
  int truth_resolution = 5;  // icosphere subdivisions, or box grid segments

  int template_subdivisions = 3;
  double probe_travel_d = 0.05;      // m
  double failure_threshold = 0.015;  // m
  int max_iterations = 50;
  std::uint64_t seed = 1;
  std::size_t chamfer_samples = 50000;

  FitConfig fit;
  VisualPriorConfig visual;
  SensorModel sensor;
  ExplorationConfig exploration;

  std::optional<double> rbf_regularization;  // unset: scale-aware default
  double max_displacement_ratio = 0.5;       // of the smallest fitted semi-axis
  int traverse_threshold = 5;
  PropagationMode propagation_mode = PropagationMode::complement;
  bool exclude_failed_vertices = true;
  bool fit_warm_start = false;  // refit from the previous parameters instead of a fresh modest init

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

/// Flat `key = value` text; `#` starts a comment. Vector values are three
/// space-separated numbers. Unknown keys and malformed values raise
/// ConfigError. Relative mesh paths resolve against `base_dir`.
SessionConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
SessionConfig load_config(const std::filesystem::path& path);

/// Writes every key understood by parse_config.
void write_config(std::ostream& out, const SessionConfig& cfg);

/// Builds (and validates) the ground-truth mesh described by the config.
TriangleMesh make_truth_mesh(const SessionConfig& cfg);

enum class ProbeOutcome { contact, failure };
enum class FailureReason { no_intersection, threshold_exceeded, pad_miss };

std::string_view to_string(ProbeOutcome outcome);
std::string_view to_string(FailureReason reason);

struct ProbeResult {
  ProbeOutcome outcome = ProbeOutcome::failure;
  std::optional<Vec3> contact_point;
  std::optional<ContactReading> reading;
  std::optional<FailureReason> failure_reason;
  std::optional<Attractor> attractor;  // tactile attractor on contact
  double deviation = 0.0;              // |hit - candidate point| when a hit exists
};

/// Sweeps the probe from point + d * normal to point - d * normal against
/// the truth. A hit farther than the failure threshold from the candidate
/// point is a failure. On contact the pad offset is drawn from `rng`, its
/// magnitude scaled by deviation / threshold, and the tactile attractor sits
/// at the pad center, i.e. the hit point shifted by that offset.
ProbeResult simulate_probe(const SurfaceIndex& truth, const CandidatePose& pose, const SessionConfig& cfg,
                           std::mt19937_64& rng);

struct IterationRecord {
  int iteration = 0;
  double chamfer = 0.0;  // m
  int cumulative_failures = 0;
  std::size_t n_attractors = 0;
  std::optional<VertexIndex> selected_vertex;  // empty for iteration 0
  std::optional<ProbeOutcome> outcome;          // empty for iteration 0
};

/// Everything one reconstruction run evolves.
struct SessionState {
  SessionConfig config;

  TriangleMesh truth;
  std::optional<SurfaceIndex> truth_index;
  std::vector<Vec3> truth_samples;
  std::optional<PointKdTree> truth_tree;

  TriangleMesh unit_template;
  EllipsoidParams params;
  std::vector<Attractor> attractors;
  TriangleMesh global_mesh;
  TriangleMesh estimate;
  UncertaintyField field;
  double chamfer = 0.0;

  std::vector<VertexIndex> failed_vertices;
  std::optional<Selection> last_selection;
  std::vector<IterationRecord> records;
  int failures = 0;
  int contacts = 0;
  bool exploration_complete = false;
};

/// Loads the truth, samples the visual prior and builds the iteration-0
/// estimate (fit + deformation on visual attractors only).
SessionState run_init(const SessionConfig& cfg);

/// One probe attempt. Returns nullopt, and sets exploration_complete, when
/// the strategy has no admissible candidate left.
std::optional<IterationRecord> run_iteration(SessionState& state);

/// Called after iteration 0 and after every later iteration.
using IterationObserver = std::function<void(const SessionState&, const IterationRecord&)>;

struct SessionResult {
  std::vector<IterationRecord> records;
  TriangleMesh final_estimate;
  UncertaintyField final_field;
  std::vector<Attractor> attractors;
  EllipsoidParams params;
  bool terminated_early = false;
};

SessionResult run_session(const SessionConfig& cfg, const IterationObserver& observer = {});

/// Metrics CSV: iteration,chamfer_mm,cumulative_failures,n_attractors,selected_vertex,outcome.
void write_metrics_csv(std::ostream& out, std::span<const IterationRecord> records);

struct StrategyStats {
  Strategy strategy = Strategy::ours;
  std::vector<double> final_chamfer_mm;
  std::vector<int> failures;
  std::vector<double> initial_chamfer_mm;
  std::vector<int> iterations;
};

struct SummaryRow {
  std::string metric;  // "chamfer_mm" or "failures"
  Strategy strategy = Strategy::ours;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
  std::size_t runs = 0;
};

struct ComparisonSummary {
  std::string object;
  std::vector<std::uint64_t> seeds;
  StrategyStats ours;
  StrategyStats min_u;
  std::vector<SummaryRow> rows;  // 2 metrics x 2 strategies
};

/// Paired runs per seed that differ only in the exploration strategy.
/// Sessions run concurrently; results do not depend on scheduling.
ComparisonSummary compare_strategies(const SessionConfig& cfg, std::span<const std::uint64_t> seeds);

/// CSV: object,metric,strategy,mean,std,runs.
void write_summary_csv(std::ostream& out, const ComparisonSummary& summary);
/// Human-readable "metric strategy mean ± std" table.
void write_summary_table(std::ostream& out, const ComparisonSummary& summary);

}  // namespace vtrecon
