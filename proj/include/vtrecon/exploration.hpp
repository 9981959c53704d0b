#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vtrecon/mesh.hpp"
#include "vtrecon/uncertainty_field.hpp"

namespace vtrecon {

enum class Strategy { ours, min_u };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);

struct ExplorationConfig {
  double alpha_g = 0.5;
  double alpha_u = 0.5;
  double u_prime_min = 0.6;   // a candidate must be at least this uncertain
  double u_prime_max = 0.45;  // "confident" means at most this uncertain
  Strategy strategy = Strategy::ours;

  void validate() const;
  /// True when the confident band overlaps the candidate band.
  bool bands_overlap() const { return u_prime_max >= u_prime_min; }
};

struct CandidateScore {
  VertexIndex vertex = 0;
  double g = 0.0;  // normalized mean geodesic distance to the confident set
  double u = 0.0;
  double total = 0.0;
};

struct Selection {
  VertexIndex vertex = 0;
  std::vector<CandidateScore> scores;  // every admissible candidate, by vertex
};

/// Frontier-seeking choice: among vertices with u >= u_prime_min that have a
/// neighbor with u <= u_prime_max, maximize alpha_g * G + alpha_u * U where G
/// is the mean geodesic distance to all confident vertices, normalized by its
/// maximum over the candidates, and U is the vertex uncertainty. Vertices in
/// `excluded` are skipped. Returns nullopt when no candidate remains.
std::optional<Selection> select_next_ours(EdgeGraphView graph, std::span<const double> uncertainty,
                                          const ExplorationConfig& cfg,
                                          std::span<const VertexIndex> excluded = {});
std::optional<Selection> select_next_ours(const TriangleMesh& mesh, const UncertaintyField& field,
                                          const ExplorationConfig& cfg,
                                          std::span<const VertexIndex> excluded = {});

/// Most uncertain vertex, lowest index on ties.
VertexIndex select_next_min_u(const TriangleMesh& mesh, const UncertaintyField& field);

/// Same, skipping `excluded`; nullopt only when every vertex is excluded.
std::optional<VertexIndex> select_next_min_u(std::span<const double> uncertainty,
                                             std::span<const VertexIndex> excluded);

struct CandidatePose {
  Vec3 point;
  Vec3 normal;
};

/// Vertex position and vertex normal on the current estimate.
CandidatePose candidate_pose(const TriangleMesh& mesh, VertexIndex vertex);

/// CSV with header `vertex,G,U,total`.
void write_scores_csv(std::ostream& out, std::span<const CandidateScore> scores);

}  // namespace vtrecon
