#include "vtrecon/exploration.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <string>

#include "vtrecon/errors.hpp"
#include "vtrecon/geodesic.hpp"

namespace vtrecon {

std::string_view to_string(Strategy strategy) { return strategy == Strategy::ours ? "ours" : "min_u"; }

Strategy parse_strategy(std::string_view text) {
  if (text == "ours") {
    return Strategy::ours;
  }
  if (text == "min_u" || text == "minU") {
    return Strategy::min_u;
  }
  throw ParameterError("unknown strategy '" + std::string(text) + "'");
}

void ExplorationConfig::validate() const {
  if (alpha_g < 0.0 || alpha_u < 0.0 || !(alpha_g + alpha_u > 0.0)) {
    throw ParameterError("alpha_g and alpha_u must be non-negative with a positive sum");
  }
  if (u_prime_min < 0.0 || u_prime_min > 1.0 || u_prime_max < 0.0 || u_prime_max > 1.0) {
    throw ParameterError("u_prime_min and u_prime_max must lie in [0, 1]");
  }
}

namespace {

std::vector<char> exclusion_mask(std::size_t n, std::span<const VertexIndex> excluded) {
  std::vector<char> mask(n, 0);
  for (VertexIndex v : excluded) {
    if (v < n) {
      mask[v] = 1;
    }
  }
  return mask;
}

}  // namespace

std::optional<Selection> select_next_ours(EdgeGraphView graph, std::span<const double> uncertainty,
                                          const ExplorationConfig& cfg, std::span<const VertexIndex> excluded) {
  cfg.validate();
  const std::size_t n = graph.size();
  if (uncertainty.size() != n) {
    throw ParameterError("uncertainty values do not match the graph size");
  }
  const std::vector<char> skip = exclusion_mask(n, excluded);

  std::vector<VertexIndex> confident;
  for (std::size_t v = 0; v < n; ++v) {
    if (uncertainty[v] <= cfg.u_prime_max) {
      confident.push_back(static_cast<VertexIndex>(v));
    }
  }

  std::vector<CandidateScore> scores;
  for (std::size_t j = 0; j < n; ++j) {
    if (skip[j] || uncertainty[j] < cfg.u_prime_min) {
      continue;
    }
    const auto& nbrs = graph.neighbors[j];
    const bool has_confident_neighbor = std::any_of(
        nbrs.begin(), nbrs.end(), [&](VertexIndex i) { return uncertainty[i] <= cfg.u_prime_max; });
    if (!has_confident_neighbor) {
      continue;
    }
    CandidateScore s;
    s.vertex = static_cast<VertexIndex>(j);
    s.u = uncertainty[j];
    scores.push_back(s);
  }
  if (scores.empty()) {
    return std::nullopt;
  }

  // Mean geodesic distance from each candidate to the confident set.
  double g_max = 0.0;
  for (CandidateScore& s : scores) {
    const VertexIndex src[] = {s.vertex};
    const std::vector<double> dist = geodesic_distances(graph, src);
    double sum = 0.0;
    for (VertexIndex c : confident) {
      sum += dist[c];
    }
    s.g = sum / static_cast<double>(confident.size());
    g_max = std::max(g_max, s.g);
  }

  Selection sel;
  double best = -1.0;
  for (CandidateScore& s : scores) {
    s.g = g_max > 0.0 ? s.g / g_max : 0.0;
    s.total = cfg.alpha_g * s.g + cfg.alpha_u * s.u;
    if (s.total > best) {
      best = s.total;
      sel.vertex = s.vertex;
    }
  }
  sel.scores = std::move(scores);
  return sel;
}

std::optional<Selection> select_next_ours(const TriangleMesh& mesh, const UncertaintyField& field,
                                          const ExplorationConfig& cfg, std::span<const VertexIndex> excluded) {
  return select_next_ours(mesh.graph(), field.values, cfg, excluded);
}

VertexIndex select_next_min_u(const TriangleMesh& mesh, const UncertaintyField& field) {
  if (field.values.empty() || field.values.size() != mesh.vertex_count()) {
    throw ParameterError("uncertainty field does not match the mesh");
  }
  return *select_next_min_u(field.values, {});
}

std::optional<VertexIndex> select_next_min_u(std::span<const double> uncertainty,
                                             std::span<const VertexIndex> excluded) {
  const std::vector<char> skip = exclusion_mask(uncertainty.size(), excluded);
  std::optional<VertexIndex> best;
  for (std::size_t v = 0; v < uncertainty.size(); ++v) {
    if (!skip[v] && (!best || uncertainty[v] > uncertainty[*best])) {
      best = static_cast<VertexIndex>(v);
    }
  }
  return best;
}

CandidatePose candidate_pose(const TriangleMesh& mesh, VertexIndex vertex) {
  if (vertex >= mesh.vertex_count()) {
    throw ParameterError("candidate vertex index out of range");
  }
  return {mesh.vertex(vertex), mesh.vertex_normal(vertex)};
}

void write_scores_csv(std::ostream& out, std::span<const CandidateScore> scores) {
  out << "vertex,G,U,total\n" << std::setprecision(17);
  for (const CandidateScore& s : scores) {
    out << s.vertex << ',' << s.g << ',' << s.u << ',' << s.total << '\n';
  }
}

}  // namespace vtrecon
