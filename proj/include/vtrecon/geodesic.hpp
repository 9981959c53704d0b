#pragma once

#include <span>
#include <vector>

#include "vtrecon/mesh.hpp"

namespace vtrecon {

/// Multi-source shortest-path distances over the edge graph with Euclidean
/// edge weights. Sources sit at distance 0; unreachable vertices get
/// +infinity. Throws ParameterError on an empty or out-of-range source set.
std::vector<double> geodesic_distances(EdgeGraphView graph, std::span<const VertexIndex> sources);
std::vector<double> geodesic_distances(const TriangleMesh& mesh, std::span<const VertexIndex> sources);

/// Breadth-first hop counts from `source`, stopping after `max_hops`.
/// Vertices farther away are left at -1.
std::vector<int> hop_distances(EdgeGraphView graph, VertexIndex source, int max_hops);

}  // namespace vtrecon
