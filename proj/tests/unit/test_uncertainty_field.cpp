#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "vtrecon/errors.hpp"
#include "vtrecon/geodesic.hpp"
#include "vtrecon/mesh.hpp"
#include "vtrecon/uncertainty_field.hpp"

using namespace vtrecon;

namespace {

TriangleMesh tetrahedron() {
  return TriangleMesh({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
}

std::vector<Attractor> random_attractors(const TriangleMesh& m, std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> vert(0, m.vertex_count() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.02);
  std::vector<Attractor> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = m.vertex(vert(rng)) + Vec3(jitter(rng), jitter(rng), jitter(rng));
    out.push_back({p, u(rng), i % 2 == 0 ? AttractorSource::visual : AttractorSource::tactile});
  }
  return out;
}

}  // namespace

TEST(InitField, AllOnes) {
  const TriangleMesh m = make_icosphere(1.0, 3);
  const UncertaintyField f = init_field(m);
  ASSERT_EQ(f.values.size(), 642u);
  EXPECT_EQ(std::accumulate(f.values.begin(), f.values.end(), 0.0), 642.0);
  EXPECT_EQ(*std::min_element(f.values.begin(), f.values.end()), 1.0);
  EXPECT_EQ(f.traverse_threshold, 5);
  EXPECT_EQ(f.mode, PropagationMode::literal);
  EXPECT_THROW(init_field(m, -1), ParameterError);
}

TEST(Propagate, ZeroUncertaintySourceAndCutoff) {
  const TriangleMesh m = make_icosphere(1.0, 3);
  const UncertaintyField f0 = init_field(m);
  const std::vector<Attractor> a = {{m.vertex(10), 0.0, AttractorSource::tactile}};
  const UncertaintyField f = propagate(f0, m, a);
  EXPECT_EQ(f.values[10], 0.0);
  const auto hops = hop_distances(m.graph(), 10, 1000);
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    if (hops[v] > 5) {
      EXPECT_EQ(f.values[v], 1.0);
    } else {
      EXPECT_EQ(f.values[v], 0.0);
    }
  }
}

TEST(Propagate, HeavyTailedWeight) {
  const TriangleMesh m = tetrahedron();
  const std::vector<Attractor> a = {{m.vertex(0), 0.4, AttractorSource::visual}};
  const UncertaintyField f = propagate(init_field(m), m, a);
  EXPECT_EQ(f.values[0], 0.4);
  for (std::size_t v = 1; v < 4; ++v) {
    // every edge of a regular tetrahedron is one mean edge length long
    EXPECT_NEAR(f.values[v], 0.2, 1e-12);
  }
  const UncertaintyField g = propagate(init_field(m, 5, PropagationMode::complement), m, a);
  EXPECT_EQ(g.values[0], 0.4);
  for (std::size_t v = 1; v < 4; ++v) {
    EXPECT_NEAR(g.values[v], 1.0 - 0.6 * 0.5, 1e-12);
  }
}

TEST(Propagate, MinimumAcrossAttractorsIsKept) {
  const TriangleMesh m = tetrahedron();
  const std::vector<Attractor> a = {{m.vertex(2), 0.3, AttractorSource::visual},
                                    {m.vertex(2), 0.1, AttractorSource::tactile}};
  EXPECT_EQ(propagate(init_field(m), m, a).values[2], 0.1);
  const std::vector<Attractor> b = {a[1], a[0]};
  EXPECT_EQ(propagate(init_field(m), m, b).values[2], 0.1);
}

TEST(Propagate, MatchesDirectFormula) {
  std::mt19937_64 rng(1);
  const TriangleMesh m = make_icosphere(0.1, 3);
  const auto atts = random_attractors(m, rng, 8);
  const double edge = m.mean_edge_length();
  for (PropagationMode mode : {PropagationMode::literal, PropagationMode::complement}) {
    const UncertaintyField f = propagate(init_field(m, 3, mode), m, atts);
    std::vector<double> want(m.vertex_count(), 1.0);
    for (const Attractor& a : atts) {
      const auto hops = hop_distances(m.graph(), closest_vertex(m, a.position), 3);
      for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        if (hops[v] < 0) {
          continue;
        }
        const double t = (m.vertex(v) - a.position).norm() / edge;
        const double w = 1.0 / (1.0 + t * t);
        want[v] = std::min(want[v], mode == PropagationMode::literal ? a.uncertainty * w : 1.0 - (1.0 - a.uncertainty) * w);
      }
    }
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
      EXPECT_NEAR(f.values[v], want[v], 1e-15);
    }
  }
}

TEST(Propagate, PropertiesOnRandomAttractorSets) {
  std::mt19937_64 rng(2);
  const TriangleMesh m = make_icosphere(1.0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto atts = random_attractors(m, rng, 1 + trial % 7);
    for (PropagationMode mode : {PropagationMode::literal, PropagationMode::complement}) {
      const UncertaintyField f0 = init_field(m, 5, mode);
      const UncertaintyField once = propagate(f0, m, atts);
      EXPECT_EQ(propagate(once, m, atts).values, once.values);

      auto more = atts;
      more.push_back(random_attractors(m, rng, 1)[0]);
      const UncertaintyField extra = propagate(f0, m, more);
      std::vector<int> nearest(m.vertex_count(), -1);
      for (const Attractor& a : atts) {
        const auto hops = hop_distances(m.graph(), closest_vertex(m, a.position), 5);
        for (std::size_t v = 0; v < m.vertex_count(); ++v) {
          if (hops[v] >= 0) {
            nearest[v] = 1;
          }
        }
      }
      for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        EXPECT_LE(extra.values[v], once.values[v]);
        EXPECT_GE(once.values[v], 0.0);
        EXPECT_LE(once.values[v], 1.0);
        if (nearest[v] < 0) {
          EXPECT_EQ(once.values[v], 1.0);
        }
      }
    }
  }
}

TEST(Propagate, EmptyAttractorSetResetsField) {
  const TriangleMesh m = make_icosphere(1.0, 1);
  UncertaintyField f = init_field(m);
  f.values[3] = 0.2;
  const UncertaintyField g = propagate(f, m, std::span<const Attractor>{});
  EXPECT_EQ(g.values, std::vector<double>(m.vertex_count(), 1.0));
}

TEST(Propagate, ThresholdZeroTouchesOnlyTheClosestVertex) {
  const TriangleMesh m = make_icosphere(1.0, 2);
  const std::vector<Attractor> a = {{m.vertex(5) * 1.01, 0.2, AttractorSource::tactile}};
  const UncertaintyField f = propagate(init_field(m, 0), m, a);
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    if (v == 5) {
      EXPECT_LT(f.values[v], 0.2);
    } else {
      EXPECT_EQ(f.values[v], 1.0);
    }
  }
}

TEST(Propagate, RejectsMismatchedField) {
  const TriangleMesh m = make_icosphere(1.0, 1);
  EXPECT_THROW(propagate(init_field(make_icosphere(1.0, 0)), m, std::span<const Attractor>{}), ParameterError);
}

TEST(ClosestVertex, LowestIndexOnTies) {
  const TriangleMesh m = tetrahedron();
  EXPECT_EQ(closest_vertex(m, Vec3::Zero()), 0u);
  EXPECT_EQ(closest_vertex(m, Vec3(-1, -1, 0.9)), 3u);
}

TEST(PropagationMode, Names) {
  EXPECT_EQ(parse_propagation_mode("literal"), PropagationMode::literal);
  EXPECT_EQ(parse_propagation_mode(to_string(PropagationMode::complement)), PropagationMode::complement);
  EXPECT_THROW(parse_propagation_mode("inverse"), ParameterError);
}

TEST(FieldCsv, HeaderAndRows) {
  const TriangleMesh m = tetrahedron();
  const UncertaintyField f = init_field(m);
  std::ostringstream out;
  write_field_csv(out, m, f);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "vertex,x,y,z,uncertainty");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1,1,1,1");
  int rows = 1;
  while (std::getline(in, line)) {
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}
