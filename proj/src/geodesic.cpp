#include "vtrecon/geodesic.hpp"

#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include "vtrecon/errors.hpp"

namespace vtrecon {

std::vector<double> geodesic_distances(EdgeGraphView graph, std::span<const VertexIndex> sources) {
  if (sources.empty()) {
    throw ParameterError("geodesic_distances needs at least one source");
  }
  const std::size_t n = graph.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Entry = std::pair<double, VertexIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (VertexIndex s : sources) {
    if (s >= n) {
      throw ParameterError("geodesic source index out of range");
    }
    dist[s] = 0.0;
    queue.emplace(0.0, s);
  }
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) {
      continue;
    }
    for (VertexIndex w : graph.neighbors[v]) {
      const double nd = d + (graph.positions[v] - graph.positions[w]).norm();
      if (nd < dist[w]) {
        dist[w] = nd;
        queue.emplace(nd, w);
      }
    }
  }
  return dist;
}

std::vector<double> geodesic_distances(const TriangleMesh& mesh, std::span<const VertexIndex> sources) {
  return geodesic_distances(mesh.graph(), sources);
}

std::vector<int> hop_distances(EdgeGraphView graph, VertexIndex source, int max_hops) {
  std::vector<int> hops(graph.size(), -1);
  if (source >= graph.size()) {
    throw ParameterError("hop_distances source index out of range");
  }
  std::queue<VertexIndex> frontier;
  hops[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const VertexIndex v = frontier.front();
    frontier.pop();
    if (hops[v] >= max_hops) {
      continue;
    }
    for (VertexIndex w : graph.neighbors[v]) {
      if (hops[w] < 0) {
        hops[w] = hops[v] + 1;
        frontier.push(w);
      }
    }
  }
  return hops;
}

}  // namespace vtrecon
