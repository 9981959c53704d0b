#include "vtrecon/uncertainty_field.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "vtrecon/errors.hpp"
#include "vtrecon/geodesic.hpp"

namespace vtrecon {

std::string_view to_string(PropagationMode mode) {
  return mode == PropagationMode::literal ? "literal" : "complement";
}

PropagationMode parse_propagation_mode(std::string_view text) {
  if (text == "literal") {
    return PropagationMode::literal;
  }
  if (text == "complement") {
    return PropagationMode::complement;
  }
  throw ParameterError("unknown propagation mode '" + std::string(text) + "'");
}

UncertaintyField init_field(const TriangleMesh& mesh, int traverse_threshold, PropagationMode mode) {
  if (traverse_threshold < 0) {
    throw ParameterError("traverse_threshold must be non-negative");
  }
  UncertaintyField field;
  field.values.assign(mesh.vertex_count(), 1.0);
  field.traverse_threshold = traverse_threshold;
  field.mode = mode;
  return field;
}

VertexIndex closest_vertex(const TriangleMesh& mesh, const Vec3& p) {
  VertexIndex best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const double d2 = (mesh.vertex(i) - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<VertexIndex>(i);
    }
  }
  return best;
}

UncertaintyField propagate(const UncertaintyField& field, const TriangleMesh& mesh,
                           std::span<const Attractor> attractors) {
  if (field.values.size() != mesh.vertex_count()) {
    throw ParameterError("uncertainty field does not match the mesh vertex count");
  }
  UncertaintyField out = field;
  std::fill(out.values.begin(), out.values.end(), 1.0);
  if (attractors.empty()) {
    return out;
  }
  const double edge = mesh.mean_edge_length();
  const double unit = edge > 0.0 ? edge : 1.0;
  const EdgeGraphView graph = mesh.graph();
  for (const Attractor& a : attractors) {
    const VertexIndex start = closest_vertex(mesh, a.position);
    const std::vector<int> hops = hop_distances(graph, start, field.traverse_threshold);
    for (std::size_t v = 0; v < hops.size(); ++v) {
      if (hops[v] < 0) {
        continue;
      }
      const double t = (mesh.vertex(v) - a.position).norm() / unit;
      const double weight = 1.0 / (1.0 + t * t);
      const double candidate = field.mode == PropagationMode::literal ? a.uncertainty * weight
                                                                      : 1.0 - (1.0 - a.uncertainty) * weight;
      out.values[v] = std::min(out.values[v], std::clamp(candidate, 0.0, 1.0));
    }
  }
  return out;
}

void write_field_csv(std::ostream& out, const TriangleMesh& mesh, const UncertaintyField& field) {
  out << "vertex,x,y,z,uncertainty\n" << std::setprecision(17);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3& v = mesh.vertex(i);
    out << i << ',' << v.x() << ',' << v.y() << ',' << v.z() << ',' << field.values[i] << '\n';
  }
}

}  // namespace vtrecon
