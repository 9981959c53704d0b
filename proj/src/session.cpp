#include "vtrecon/session.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "vtrecon/errors.hpp"
#include "vtrecon/local_deform.hpp"
#include "vtrecon/mesh_io.hpp"

namespace vtrecon {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

// Stream tags for the independent random sequences of a session.
constexpr std::uint64_t kVisualStream = 0x5649535541ULL;
constexpr std::uint64_t kProbeStream = 0x50524f4245ULL;
constexpr std::uint64_t kTruthSampleStream = 0x5452555448ULL;
constexpr std::uint64_t kEstimateSampleStream = 0x455354494dULL;

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

std::string_view to_string(TruthShape shape) {
  switch (shape) {
    case TruthShape::mesh_file:
      return "mesh";
    case TruthShape::sphere:
      return "sphere";
    case TruthShape::ellipsoid:
      return "ellipsoid";
    case TruthShape::rounded_box:
      return "rounded_box";
  }
  return "mesh";
}

TruthShape parse_truth_shape(std::string_view text) {
  if (text == "mesh") {
    return TruthShape::mesh_file;
  }
  if (text == "sphere") {
    return TruthShape::sphere;
  }
  if (text == "ellipsoid") {
    return TruthShape::ellipsoid;
  }
  if (text == "rounded_box") {
    return TruthShape::rounded_box;
  }
  throw ParameterError("unknown truth shape '" + std::string(text) + "'");
}

void SessionConfig::validate() const {
  try {
    fit.validate();
    visual.validate();
    sensor.validate();
    exploration.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (truth_shape == TruthShape::mesh_file && truth_mesh_path.empty()) {
    throw ConfigError("truth_shape = mesh requires truth_mesh_path");
  }
  if (!(truth_extents.array() > 0.0).all()) {
    throw ConfigError("truth_extents must be positive");
  }
  if (template_subdivisions < 0 || template_subdivisions > 6) {
    throw ConfigError("template_subdivisions must be in [0, 6]");
  }
  if (!(probe_travel_d > 0.0)) {
    throw ConfigError("probe_travel_d must be positive");
  }
  if (!(failure_threshold > 0.0)) {
    throw ConfigError("failure_threshold must be positive");
  }
  if (max_iterations < 0) {
    throw ConfigError("max_iterations must be non-negative");
  }
  if (chamfer_samples == 0) {
    throw ConfigError("chamfer_samples must be positive");
  }
  if (rbf_regularization && *rbf_regularization < 0.0) {
    throw ConfigError("rbf_regularization must be non-negative");
  }
  if (!(max_displacement_ratio >= 0.0)) {
    throw ConfigError("max_displacement_ratio must be non-negative");
  }
  if (traverse_threshold < 0) {
    throw ConfigError("traverse_threshold must be non-negative");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ValueReader {
  const std::string& key;
  const std::string& text;

  [[noreturn]] void fail(const char* what) const {
    throw ConfigError("config key '" + key + "': expected " + what + ", got '" + text + "'");
  }

  double number() const {
    std::istringstream in(text);
    double v = 0.0;
    std::string rest;
    if (!(in >> v) || (in >> rest) || !std::isfinite(v)) {
      fail("a number");
    }
    return v;
  }

  long long integer() const {
    std::istringstream in(text);
    long long v = 0;
    std::string rest;
    if (!(in >> v) || (in >> rest)) {
      fail("an integer");
    }
    return v;
  }

  std::uint64_t unsigned_integer() const {
    if (!text.empty() && text[0] == '-') {
      fail("a non-negative integer");
    }
    std::istringstream in(text);
    std::uint64_t v = 0;
    std::string rest;
    if (!(in >> v) || (in >> rest)) {
      fail("a non-negative integer");
    }
    return v;
  }

  bool boolean() const {
    if (text == "true" || text == "1" || text == "yes") {
      return true;
    }
    if (text == "false" || text == "0" || text == "no") {
      return false;
    }
    fail("true or false");
  }

  Vec3 vec3() const {
    std::istringstream in(text);
    Vec3 v;
    std::string rest;
    if (!(in >> v.x() >> v.y() >> v.z()) || (in >> rest) || !v.allFinite()) {
      fail("three numbers");
    }
    return v;
  }

  template <typename F>
  auto parsed(F&& parse) const {
    try {
      return parse(text);
    } catch (const ParameterError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
};

using Setter = std::function<void(SessionConfig&, const ValueReader&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](SessionConfig& c, const ValueReader& r) { c.name = r.text; }},
      {"truth_shape",
       [](SessionConfig& c, const ValueReader& r) { c.truth_shape = r.parsed(parse_truth_shape); }},
      {"truth_mesh_path", [](SessionConfig& c, const ValueReader& r) { c.truth_mesh_path = r.text; }},
      {"truth_extents", [](SessionConfig& c, const ValueReader& r) { c.truth_extents = r.vec3(); }},
      {"truth_center", [](SessionConfig& c, const ValueReader& r) { c.truth_center = r.vec3(); }},
      {"truth_corner_radius", [](SessionConfig& c, const ValueReader& r) { c.truth_corner_radius = r.number(); }},
      {"truth_resolution",
       [](SessionConfig& c, const ValueReader& r) { c.truth_resolution = static_cast<int>(r.integer()); }},
      {"template_subdivisions",
       [](SessionConfig& c, const ValueReader& r) { c.template_subdivisions = static_cast<int>(r.integer()); }},
      {"probe_travel_d", [](SessionConfig& c, const ValueReader& r) { c.probe_travel_d = r.number(); }},
      {"failure_threshold", [](SessionConfig& c, const ValueReader& r) { c.failure_threshold = r.number(); }},
      {"max_iterations",
       [](SessionConfig& c, const ValueReader& r) { c.max_iterations = static_cast<int>(r.integer()); }},
      {"seed", [](SessionConfig& c, const ValueReader& r) { c.seed = r.unsigned_integer(); }},
      {"chamfer_samples", [](SessionConfig& c, const ValueReader& r) { c.chamfer_samples = r.unsigned_integer(); }},
      {"fit_learning_rate", [](SessionConfig& c, const ValueReader& r) { c.fit.learning_rate = r.number(); }},
      {"fit_max_iterations",
       [](SessionConfig& c, const ValueReader& r) { c.fit.max_iterations = static_cast<int>(r.integer()); }},
      {"fit_convergence_tol", [](SessionConfig& c, const ValueReader& r) { c.fit.convergence_tol = r.number(); }},
      {"fit_init_scale_factor",
       [](SessionConfig& c, const ValueReader& r) { c.fit.init_scale_factor = r.number(); }},
      {"fit_confidence_weighting",
       [](SessionConfig& c, const ValueReader& r) { c.fit.confidence_weighting = r.boolean(); }},
      {"fit_max_halvings",
       [](SessionConfig& c, const ValueReader& r) { c.fit.max_halvings = static_cast<int>(r.integer()); }},
      {"visual_view_direction", [](SessionConfig& c, const ValueReader& r) { c.visual.view_direction = r.vec3(); }},
      {"visual_cone_half_angle",
       [](SessionConfig& c, const ValueReader& r) { c.visual.cone_half_angle = r.number(); }},
      {"visual_n_points", [](SessionConfig& c, const ValueReader& r) { c.visual.n_points = r.unsigned_integer(); }},
      {"visual_noise_sigma",
       [](SessionConfig& c, const ValueReader& r) { c.visual.position_noise_sigma = r.number(); }},
      {"visual_uncertainty",
       [](SessionConfig& c, const ValueReader& r) { c.visual.visual_uncertainty = r.number(); }},
      {"visual_seed", [](SessionConfig& c, const ValueReader& r) { c.visual.seed = r.unsigned_integer(); }},
      {"sensor_u_max", [](SessionConfig& c, const ValueReader& r) { c.sensor.u_max = r.number(); }},
      {"sensor_pad_radius", [](SessionConfig& c, const ValueReader& r) { c.sensor.pad_radius = r.number(); }},
      {"sensor_nominal_force", [](SessionConfig& c, const ValueReader& r) { c.sensor.nominal_force = r.number(); }},
      {"sensor_offset_noise_seed",
       [](SessionConfig& c, const ValueReader& r) { c.sensor.offset_noise_seed = r.unsigned_integer(); }},
      {"strategy",
       [](SessionConfig& c, const ValueReader& r) { c.exploration.strategy = r.parsed(parse_strategy); }},
      {"alpha_g", [](SessionConfig& c, const ValueReader& r) { c.exploration.alpha_g = r.number(); }},
      {"alpha_u", [](SessionConfig& c, const ValueReader& r) { c.exploration.alpha_u = r.number(); }},
      {"u_prime_min", [](SessionConfig& c, const ValueReader& r) { c.exploration.u_prime_min = r.number(); }},
      {"u_prime_max", [](SessionConfig& c, const ValueReader& r) { c.exploration.u_prime_max = r.number(); }},
      {"rbf_regularization",
       [](SessionConfig& c, const ValueReader& r) {
         if (r.text == "auto") {
           c.rbf_regularization.reset();
         } else {
           c.rbf_regularization = r.number();
         }
       }},
      {"max_displacement_ratio",
       [](SessionConfig& c, const ValueReader& r) { c.max_displacement_ratio = r.number(); }},
      {"traverse_threshold",
       [](SessionConfig& c, const ValueReader& r) { c.traverse_threshold = static_cast<int>(r.integer()); }},
      {"propagation_mode",
       [](SessionConfig& c, const ValueReader& r) { c.propagation_mode = r.parsed(parse_propagation_mode); }},
      {"fit_warm_start", [](SessionConfig& c, const ValueReader& r) { c.fit_warm_start = r.boolean(); }},
      {"exclude_failed_vertices",
       [](SessionConfig& c, const ValueReader& r) { c.exclude_failed_vertices = r.boolean(); }},
  };
  return table;
}

}  // namespace

SessionConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  SessionConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(cfg, ValueReader{key, value});
  }
  if (!cfg.truth_mesh_path.empty() && cfg.truth_mesh_path.is_relative() && !base_dir.empty()) {
    cfg.truth_mesh_path = base_dir / cfg.truth_mesh_path;
  }
  cfg.validate();
  return cfg;
}

SessionConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file " + path.string());
  }
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& out, const SessionConfig& c) {
  auto vec = [](const Vec3& v) {
    std::ostringstream s;
    s << std::setprecision(17) << v.x() << ' ' << v.y() << ' ' << v.z();
    return s.str();
  };
  out << std::setprecision(17) << std::boolalpha;
  out << "name = " << c.name << '\n'
      << "truth_shape = " << to_string(c.truth_shape) << '\n';
  if (!c.truth_mesh_path.empty()) {
    out << "truth_mesh_path = " << c.truth_mesh_path.string() << '\n';
  }
  out << "truth_extents = " << vec(c.truth_extents) << '\n'
      << "truth_center = " << vec(c.truth_center) << '\n'
      << "truth_corner_radius = " << c.truth_corner_radius << '\n'
      << "truth_resolution = " << c.truth_resolution << '\n'
      << "template_subdivisions = " << c.template_subdivisions << '\n'
      << "probe_travel_d = " << c.probe_travel_d << '\n'
      << "failure_threshold = " << c.failure_threshold << '\n'
      << "max_iterations = " << c.max_iterations << '\n'
      << "seed = " << c.seed << '\n'
      << "chamfer_samples = " << c.chamfer_samples << '\n'
      << "fit_learning_rate = " << c.fit.learning_rate << '\n'
      << "fit_max_iterations = " << c.fit.max_iterations << '\n'
      << "fit_convergence_tol = " << c.fit.convergence_tol << '\n'
      << "fit_init_scale_factor = " << c.fit.init_scale_factor << '\n'
      << "fit_confidence_weighting = " << c.fit.confidence_weighting << '\n'
      << "fit_max_halvings = " << c.fit.max_halvings << '\n'
      << "visual_view_direction = " << vec(c.visual.view_direction) << '\n'
      << "visual_cone_half_angle = " << c.visual.cone_half_angle << '\n'
      << "visual_n_points = " << c.visual.n_points << '\n'
      << "visual_noise_sigma = " << c.visual.position_noise_sigma << '\n'
      << "visual_uncertainty = " << c.visual.visual_uncertainty << '\n'
      << "visual_seed = " << c.visual.seed << '\n'
      << "sensor_u_max = " << c.sensor.u_max << '\n'
      << "sensor_pad_radius = " << c.sensor.pad_radius << '\n'
      << "sensor_nominal_force = " << c.sensor.nominal_force << '\n'
      << "sensor_offset_noise_seed = " << c.sensor.offset_noise_seed << '\n'
      << "strategy = " << to_string(c.exploration.strategy) << '\n'
      << "alpha_g = " << c.exploration.alpha_g << '\n'
      << "alpha_u = " << c.exploration.alpha_u << '\n'
      << "u_prime_min = " << c.exploration.u_prime_min << '\n'
      << "u_prime_max = " << c.exploration.u_prime_max << '\n';
  if (c.rbf_regularization) {
    out << "rbf_regularization = " << *c.rbf_regularization << '\n';
  } else {
    out << "rbf_regularization = auto\n";
  }
  out << "max_displacement_ratio = " << c.max_displacement_ratio << '\n'
      << "traverse_threshold = " << c.traverse_threshold << '\n'
      << "propagation_mode = " << to_string(c.propagation_mode) << '\n'
      << "exclude_failed_vertices = " << c.exclude_failed_vertices << '\n'
      << "fit_warm_start = " << c.fit_warm_start << '\n';
}

TriangleMesh make_truth_mesh(const SessionConfig& cfg) {
  TriangleMesh mesh;
  switch (cfg.truth_shape) {
    case TruthShape::mesh_file:
      return load_obj(cfg.truth_mesh_path);
    case TruthShape::sphere:
      mesh = make_icosphere(cfg.truth_extents.x(), cfg.truth_resolution);
      break;
    case TruthShape::ellipsoid:
      mesh = make_ellipsoid(cfg.truth_extents, cfg.truth_resolution);
      break;
    case TruthShape::rounded_box:
      mesh = make_rounded_box(cfg.truth_extents, cfg.truth_corner_radius, cfg.truth_resolution);
      break;
  }
  if (!cfg.truth_center.isZero()) {
    mesh = translated(mesh, cfg.truth_center);
  }
  mesh.validate();
  return mesh;
}

// ---------------------------------------------------------------------------
// Probing

std::string_view to_string(ProbeOutcome outcome) {
  return outcome == ProbeOutcome::contact ? "contact" : "failure";
}

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::no_intersection:
      return "no_intersection";
    case FailureReason::threshold_exceeded:
      return "threshold_exceeded";
    case FailureReason::pad_miss:
      return "pad_miss";
  }
  return "no_intersection";
}

namespace {

// Orthonormal pair spanning the plane perpendicular to `n`.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
  int axis = 0;
  n.cwiseAbs().minCoeff(&axis);
  const Vec3 e1 = n.cross(Vec3::Unit(axis)).normalized();
  const Vec3 e2 = n.cross(e1);
  return {e1, e2};
}

}  // namespace

ProbeResult simulate_probe(const SurfaceIndex& truth, const CandidatePose& pose, const SessionConfig& cfg,
                           std::mt19937_64& rng) {
  const Vec3 n = pose.normal.normalized();
  const Vec3 start = pose.point + cfg.probe_travel_d * n;
  const Vec3 end = pose.point - cfg.probe_travel_d * n;

  ProbeResult result;
  const auto hit = truth.intersect(start, end);
  if (!hit) {
    result.failure_reason = FailureReason::no_intersection;
    return result;
  }
  result.deviation = (hit->point - pose.point).norm();
  if (result.deviation > cfg.failure_threshold) {
    result.failure_reason = FailureReason::threshold_exceeded;
    return result;
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double angle = 2.0 * std::numbers::pi * unit(rng);
  const double magnitude = cfg.sensor.pad_radius * (result.deviation / cfg.failure_threshold) * unit(rng);
  const Eigen::Vector2d offset(magnitude * std::cos(angle), magnitude * std::sin(angle));
  const auto reading = simulate_reading(offset, cfg.sensor);
  if (!reading) {
    result.failure_reason = FailureReason::pad_miss;
    return result;
  }

  const auto [e1, e2] = tangent_basis(n);
  Attractor a;
  a.position = hit->point + offset.x() * e1 + offset.y() * e2;
  a.uncertainty = attractor_uncertainty(*reading, cfg.sensor);
  a.source = AttractorSource::tactile;

  result.outcome = ProbeOutcome::contact;
  result.contact_point = hit->point;
  result.reading = reading;
  result.attractor = a;
  return result;
}

// ---------------------------------------------------------------------------
// Session loop

namespace {

void rebuild_estimate(SessionState& s, bool warm_start) {
  const SessionConfig& cfg = s.config;
  const EllipsoidParams init = warm_start ? s.params : initial_params(s.attractors, cfg.fit);
  s.params = fit_ellipsoid(s.attractors, init, cfg.fit).params;
  s.global_mesh = instantiate_template(s.unit_template, s.params);

  const auto samples = compute_displacement_samples(s.global_mesh, s.attractors);
  const double reg = cfg.rbf_regularization ? *cfg.rbf_regularization : default_regularization(samples);
  const RbfInterpolant interpolant = fit_interpolant(samples, reg);
  const double clamp = cfg.max_displacement_ratio * s.params.semi_axes().minCoeff();
  s.estimate = apply_deformation(s.global_mesh, interpolant, clamp);

  s.field = propagate(s.field, s.estimate, s.attractors);

  const auto est_samples =
      sample_surface(s.estimate, cfg.chamfer_samples, derive_seed(cfg.seed, kEstimateSampleStream));
  const PointKdTree est_tree(est_samples);
  s.chamfer = chamfer_distance(est_samples, est_tree, s.truth_samples, *s.truth_tree);
}

}  // namespace

SessionState run_init(const SessionConfig& cfg) {
  cfg.validate();
  SessionState s;
  s.config = cfg;
  s.truth = make_truth_mesh(cfg);
  s.truth_index.emplace(s.truth);
  s.truth_samples = sample_surface(s.truth, cfg.chamfer_samples, derive_seed(cfg.seed, kTruthSampleStream));
  s.truth_tree.emplace(s.truth_samples);

  s.unit_template = make_icosphere(1.0, cfg.template_subdivisions);
  s.field = init_field(s.unit_template, cfg.traverse_threshold, cfg.propagation_mode);

  VisualPriorConfig visual = cfg.visual;
  visual.seed = derive_seed(cfg.seed, kVisualStream, cfg.visual.seed);
  s.attractors = sample_visual_prior(s.truth, visual);
  if (s.attractors.empty()) {
    throw ConfigError("visual prior is empty");
  }
  rebuild_estimate(s, false);

  IterationRecord rec;
  rec.iteration = 0;
  rec.chamfer = s.chamfer;
  rec.n_attractors = s.attractors.size();
  s.records.push_back(rec);
  return s;
}

std::optional<IterationRecord> run_iteration(SessionState& s) {
  if (s.records.empty()) {
    throw ParameterError("run_iteration called before run_init");
  }
  if (s.exploration_complete) {
    return std::nullopt;
  }
  const SessionConfig& cfg = s.config;
  const std::span<const VertexIndex> excluded =
      cfg.exclude_failed_vertices ? std::span<const VertexIndex>(s.failed_vertices) : std::span<const VertexIndex>();

  std::optional<VertexIndex> target;
  if (cfg.exploration.strategy == Strategy::ours) {
    s.last_selection = select_next_ours(s.estimate, s.field, cfg.exploration, excluded);
    if (s.last_selection) {
      target = s.last_selection->vertex;
    }
  } else {
    s.last_selection.reset();
    target = select_next_min_u(s.field.values, excluded);
  }
  if (!target) {
    s.exploration_complete = true;
    return std::nullopt;
  }

  const int iteration = static_cast<int>(s.records.size());
  std::mt19937_64 rng(derive_seed(cfg.seed ^ cfg.sensor.offset_noise_seed, kProbeStream,
                                  static_cast<std::uint64_t>(iteration)));
  const ProbeResult probe = simulate_probe(*s.truth_index, candidate_pose(s.estimate, *target), cfg, rng);

  if (probe.outcome == ProbeOutcome::contact) {
    ++s.contacts;
    s.attractors.push_back(*probe.attractor);
    rebuild_estimate(s, cfg.fit_warm_start);
  } else {
    ++s.failures;
    if (cfg.exclude_failed_vertices) {
      s.failed_vertices.push_back(*target);
    }
  }

  IterationRecord rec;
  rec.iteration = iteration;
  rec.chamfer = probe.outcome == ProbeOutcome::contact ? s.chamfer : s.records.back().chamfer;
  rec.cumulative_failures = s.failures;
  rec.n_attractors = s.attractors.size();
  rec.selected_vertex = *target;
  rec.outcome = probe.outcome;
  s.records.push_back(rec);
  return rec;
}

SessionResult run_session(const SessionConfig& cfg, const IterationObserver& observer) {
  SessionState s = run_init(cfg);
  if (observer) {
    observer(s, s.records.back());
  }
  SessionResult result;
  for (int i = 0; i < cfg.max_iterations; ++i) {
    const auto rec = run_iteration(s);
    if (!rec) {
      result.terminated_early = true;
      break;
    }
    if (observer) {
      observer(s, *rec);
    }
  }
  result.records = std::move(s.records);
  result.final_estimate = std::move(s.estimate);
  result.final_field = std::move(s.field);
  result.attractors = std::move(s.attractors);
  result.params = s.params;
  return result;
}

void write_metrics_csv(std::ostream& out, std::span<const IterationRecord> records) {
  out << "iteration,chamfer_mm,cumulative_failures,n_attractors,selected_vertex,outcome\n";
  for (const IterationRecord& r : records) {
    char chamfer[64];
    std::snprintf(chamfer, sizeof chamfer, "%.6f", r.chamfer * 1000.0);
    out << r.iteration << ',' << chamfer << ',' << r.cumulative_failures << ',' << r.n_attractors << ',';
    if (r.selected_vertex) {
      out << *r.selected_vertex;
    } else {
      out << -1;
    }
    out << ',' << (r.outcome ? to_string(*r.outcome) : std::string_view("init")) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Strategy comparison

namespace {

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) {
    return {0.0, 0.0};
  }
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

void add_rows(ComparisonSummary& summary, const StrategyStats& stats) {
  const auto [cm, cs] = mean_std(stats.final_chamfer_mm);
  std::vector<double> failures(stats.failures.begin(), stats.failures.end());
  const auto [fm, fs] = mean_std(failures);
  summary.rows.push_back({"chamfer_mm", stats.strategy, cm, cs, stats.final_chamfer_mm.size()});
  summary.rows.push_back({"failures", stats.strategy, fm, fs, stats.failures.size()});
}

}  // namespace

ComparisonSummary compare_strategies(const SessionConfig& cfg, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) {
    throw ParameterError("compare_strategies needs at least one seed");
  }
  cfg.validate();

  std::vector<std::future<SessionResult>> ours;
  std::vector<std::future<SessionResult>> min_u;
  for (std::uint64_t seed : seeds) {
    SessionConfig a = cfg;
    a.seed = seed;
    a.exploration.strategy = Strategy::ours;
    SessionConfig b = a;
    b.exploration.strategy = Strategy::min_u;
    ours.push_back(std::async(std::launch::async, [a] { return run_session(a); }));
    min_u.push_back(std::async(std::launch::async, [b] { return run_session(b); }));
  }

  ComparisonSummary summary;
  summary.object = cfg.name;
  summary.seeds.assign(seeds.begin(), seeds.end());
  summary.ours.strategy = Strategy::ours;
  summary.min_u.strategy = Strategy::min_u;
  auto collect = [](StrategyStats& stats, SessionResult r) {
    stats.initial_chamfer_mm.push_back(r.records.front().chamfer * 1000.0);
    stats.final_chamfer_mm.push_back(r.records.back().chamfer * 1000.0);
    stats.failures.push_back(r.records.back().cumulative_failures);
    stats.iterations.push_back(r.records.back().iteration);
  };
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    collect(summary.ours, ours[i].get());
    collect(summary.min_u, min_u[i].get());
  }
  add_rows(summary, summary.ours);
  add_rows(summary, summary.min_u);
  return summary;
}

void write_summary_csv(std::ostream& out, const ComparisonSummary& summary) {
  out << "object,metric,strategy,mean,std,runs\n";
  for (const SummaryRow& r : summary.rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%zu", r.mean, r.stddev, r.runs);
    out << summary.object << ',' << r.metric << ',' << to_string(r.strategy) << ',' << buf << '\n';
  }
}

void write_summary_table(std::ostream& out, const ComparisonSummary& summary) {
  out << "object: " << summary.object << " (" << summary.seeds.size() << " paired runs)\n";
  for (const std::string metric : {"chamfer_mm", "failures"}) {
    for (const SummaryRow& r : summary.rows) {
      if (r.metric != metric) {
        continue;
      }
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-11s %-6s %8.2f ± %.2f\n", r.metric.c_str(),
                    r.strategy == Strategy::ours ? "OURS" : "minU", r.mean, r.stddev);
      out << buf;
    }
  }
}

}  // namespace vtrecon
