#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "vtrecon/mesh.hpp"
#include "vtrecon/sensing.hpp"

namespace vtrecon {

/// How an attractor's uncertainty u spreads to a vertex at normalized
/// distance t, with proximity weight w = 1 / (1 + t^2):
///   literal:    u * w
///   complement: 1 - (1 - u) * w   (grows back toward 1 with distance)
enum class PropagationMode { literal, complement };

std::string_view to_string(PropagationMode mode);
PropagationMode parse_propagation_mode(std::string_view text);

/// Per-vertex uncertainty of the estimated mesh; 1 means unexplored.
struct UncertaintyField {
  std::vector<double> values;
  int traverse_threshold = 5;  // edges
  PropagationMode mode = PropagationMode::literal;
};

UncertaintyField init_field(const TriangleMesh& mesh, int traverse_threshold = 5,
                            PropagationMode mode = PropagationMode::literal);

/// Nearest mesh vertex to `p`; lowest index on ties.
VertexIndex closest_vertex(const TriangleMesh& mesh, const Vec3& p);

/// Recomputes the field from scratch: every vertex within
/// `traverse_threshold` edges of an attractor's closest vertex receives the
/// attractor's candidate value, distances being normalized by the mesh's
/// mean edge length, and each vertex keeps the minimum over attractors.
UncertaintyField propagate(const UncertaintyField& field, const TriangleMesh& mesh,
                           std::span<const Attractor> attractors);

/// CSV with header `vertex,x,y,z,uncertainty`.
void write_field_csv(std::ostream& out, const TriangleMesh& mesh, const UncertaintyField& field);

}  // namespace vtrecon
