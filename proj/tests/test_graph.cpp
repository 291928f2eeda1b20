#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "advcongest/graph.hpp"
#include "advcongest/rng.hpp"
#include "oracles.hpp"

using namespace advcongest;

namespace {

Graph path3() { return Graph(3, {{0, 1}, {1, 2}}); }
Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

EdgeSet random_faults(const Graph& g, std::size_t k, Rng& rng) {
  std::vector<EdgeId> ids(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) ids[e] = e;
  rng.shuffle(ids.begin(), ids.end());
  ids.resize(std::min(k, ids.size()));
  return EdgeSet(ids);
}

}  // namespace

TEST(Graph, RejectsMalformedEdges) {
  EXPECT_THROW(Graph(3, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{0, 3}}), std::invalid_argument);
}

TEST(Graph, EdgeIdsFollowSortedPairs) {
  Graph g(4, {{3, 2}, {0, 1}, {2, 0}});
  ASSERT_EQ(g.m(), 3u);
  EXPECT_EQ(g.edge(0).u, 0u);
  EXPECT_EQ(g.edge(0).v, 1u);
  EXPECT_EQ(g.edge(1).u, 0u);
  EXPECT_EQ(g.edge(1).v, 2u);
  EXPECT_EQ(g.edge(2).u, 2u);
  EXPECT_EQ(g.edge(2).v, 3u);
  EXPECT_EQ(g.find_edge(3, 2), EdgeId{2});
  EXPECT_FALSE(g.find_edge(1, 3).has_value());
}

TEST(Graph, DirectionIds) {
  Graph g = triangle();
  for (EdgeId e = 0; e < g.m(); ++e) {
    const auto d0 = g.dir(e, g.edge(e).u);
    const auto d1 = g.dir(e, g.edge(e).v);
    EXPECT_EQ(d0, 2 * e);
    EXPECT_EQ(d1, 2 * e + 1);
    EXPECT_EQ(g.dir_tail(d0), g.edge(e).u);
    EXPECT_EQ(g.dir_head(d0), g.edge(e).v);
    EXPECT_EQ(g.dir_tail(d1), g.edge(e).v);
  }
}

TEST(Bfs, PathGraph) {
  auto d = bfs_dist(path3(), 0);
  EXPECT_EQ(d[2], 2u);
}

TEST(Bfs, TriangleDetour) {
  Graph g = triangle();
  auto d = bfs_dist(g, 0, EdgeSet{*g.find_edge(0, 1)});
  EXPECT_EQ(d[1], 2u);
}

TEST(Bfs, UnreachableIsAValue) {
  Graph g = path3();
  auto d = bfs_dist(g, 0, EdgeSet{*g.find_edge(1, 2)});
  EXPECT_EQ(d[2], kUnreachable);
}

TEST(Bfs, MatchesMatrixOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = oracle::random_connected(20, 10 + rng.below(20), 100 + trial);
    auto f = random_faults(g, 1 + rng.below(6), rng);
    const NodeId src = static_cast<NodeId>(rng.below(g.n()));
    auto got = bfs_dist(g, src, f);
    auto want = oracle::matrix_distances(g, src, f);
    for (NodeId v = 0; v < g.n(); ++v) EXPECT_EQ(got[v], want[v] == oracle::kInf ? kUnreachable : want[v]);
  }
}

TEST(Diameter, Fixtures) {
  EXPECT_EQ(diameter(make_complete(4)), 1u);
  EXPECT_EQ(diameter(make_cycle(8)), 4u);
  EXPECT_EQ(diameter(make_circulant(16, {1, 2})), 4u);
  for (std::uint32_t d = 2; d <= 6; ++d) EXPECT_EQ(diameter(make_hypercube(d)), d);
}

TEST(Diameter, DisconnectedThrows) {
  EXPECT_THROW(diameter(Graph(3, {{0, 1}})), std::invalid_argument);
}

TEST(EdgeConnectivity, Fixtures) {
  EXPECT_EQ(edge_connectivity(make_complete(4)), 3u);
  EXPECT_EQ(edge_connectivity(make_cycle(8)), 2u);
  EXPECT_EQ(edge_connectivity(make_hypercube(4)), 4u);
  EXPECT_EQ(edge_connectivity(Graph(4, {{0, 1}, {2, 3}})), 0u);
  for (std::size_t n = 5; n <= 20; ++n) EXPECT_EQ(edge_connectivity(make_circulant(n, {1, 2})), 4u) << n;
}

TEST(EdgeConnectivity, MatchesCutEnumeration) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Graph g = oracle::random_connected(10, s % 15, 500 + s);
    EXPECT_EQ(edge_connectivity(g), oracle::min_edge_cut(g));
  }
}

TEST(EdgeConnectivity, SurvivesSmallFaultSets) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    Graph g = oracle::random_connected(12, 20, 900 + trial);
    const auto c = edge_connectivity(g);
    if (c < 2) continue;
    auto f = random_faults(g, c - 1, rng);
    EXPECT_TRUE(is_connected(g, f));
  }
}

TEST(Conductance, SmallExamples) {
  auto k4 = conductance(make_complete(4));
  EXPECT_EQ(k4.conductance, make_rational(2, 3));
  auto c4 = conductance(make_cycle(4));
  EXPECT_EQ(c4.conductance, make_rational(1, 2));
  auto k2 = conductance(Graph(2, {{0, 1}}));
  EXPECT_EQ(k2.conductance, make_rational(1, 1));
}

TEST(Conductance, ReportedCutIsConsistent) {
  Graph g = make_circulant(12, {1, 3});
  auto c = conductance(g);
  EXPECT_EQ(c.conductance, make_rational(c.boundary, std::min(c.volS, c.volComp)));
  std::vector<char> in(g.n(), 0);
  for (auto v : c.side) in[v] = 1;
  auto again = cut_stats(g, in);
  EXPECT_EQ(again.boundary, c.boundary);
  EXPECT_EQ(again.volS, c.volS);
}

TEST(Conductance, MatchesCutEnumeration) {
  for (std::uint64_t s = 0; s < 25; ++s) {
    Graph g = oracle::random_connected(4 + s % 9, s % 12, 60 + s);
    auto [num, den] = oracle::min_conductance(g);
    EXPECT_EQ(conductance(g).conductance, make_rational(num, den)) << "seed " << s;
  }
}

TEST(Conductance, Guards) {
  EXPECT_THROW(conductance(make_cycle(21)), std::invalid_argument);
  EXPECT_THROW(conductance(Graph(3, {{0, 1}})), std::invalid_argument);
}

TEST(Conductance, EstimateBracketsExactValue) {
  for (auto g : {make_hypercube(4), make_circulant(16, {1, 2}), make_cycle(10), make_complete(8)}) {
    auto est = conductance_estimate(g);
    const double phi = conductance(g).conductance.value();
    EXPECT_LE(est.lower, phi + 1e-9);
    EXPECT_GE(est.upper, phi - 1e-9);
  }
}

TEST(BallVolume, SmallExamples) {
  auto c8 = ball_volume_profile(make_cycle(8), 3);
  EXPECT_EQ(c8[0], 2u);
  EXPECT_EQ(c8[1], 6u);
  EXPECT_EQ(c8.back(), 16u);
  auto k4 = ball_volume_profile(make_complete(4), 0);
  ASSERT_EQ(k4.size(), 2u);
  EXPECT_EQ(k4[1], 12u);
}

TEST(BallVolume, GrowthOnExpanders) {
  for (auto g : {make_hypercube(4), make_circulant(16, {1, 2, 5}), make_random_regular(16, 6, 3)}) {
    const double phi = conductance(g).conductance.value();
    for (NodeId w = 0; w < g.n(); ++w) {
      auto vol = ball_volume_profile(g, w);
      for (std::size_t k = 0; k + 1 < vol.size(); ++k) {
        EXPECT_LE(vol[k], vol[k + 1]);
        if (2 * vol[k + 1] <= 2 * g.m()) EXPECT_GE(static_cast<double>(vol[k + 1]), (1 + phi) * vol[k] - 1e-9);
      }
    }
  }
}

TEST(Generate, PureFunction) {
  nlohmann::json p = {{"n", 48}, {"d", 6}};
  EXPECT_EQ(generate("random_regular", p, 5).edge_pairs(), generate("random_regular", p, 5).edge_pairs());
  EXPECT_NE(generate("random_regular", p, 5).edge_pairs(), generate("random_regular", p, 6).edge_pairs());
}

TEST(Generate, RandomRegularIsRegularAndConnected) {
  Graph g = make_random_regular(256, 16, 1);
  EXPECT_TRUE(is_connected(g));
  EXPECT_EQ(g.min_degree(), 16u);
  EXPECT_EQ(g.max_degree(), 16u);
}

TEST(Generate, RejectsInfeasible) {
  EXPECT_THROW(make_random_regular(7, 3, 1), std::invalid_argument);
  EXPECT_THROW(generate("petersen", {}), std::invalid_argument);
  EXPECT_THROW(make_cycle(2), std::invalid_argument);
}

TEST(Generate, Torus) {
  Graph g = make_torus(4, 5);
  EXPECT_EQ(g.n(), 20u);
  EXPECT_EQ(g.m(), 40u);
  EXPECT_EQ(diameter(g), 4u);
}

TEST(Serialization, EdgeListRoundTrip) {
  Graph g = make_circulant(10, {1, 3});
  EXPECT_EQ(from_edge_list(to_edge_list(g)), g);
  EXPECT_THROW(from_edge_list("3"), std::invalid_argument);
  EXPECT_THROW(from_edge_list("3 2\n0 1\n"), std::invalid_argument);
}

TEST(Serialization, JsonKeepsProvenance) {
  Graph g = generate("hypercube", {{"dim", 3}});
  auto j = to_json(g);
  Graph back = graph_from_json(j);
  EXPECT_EQ(back, g);
  ASSERT_TRUE(back.provenance().has_value());
  EXPECT_EQ(back.provenance()->kind, "hypercube");
  EXPECT_EQ(graph_from_json({{"kind", "cycle"}, {"params", {{"n", 6}}}}), make_cycle(6));
}

TEST(Observation, DetourBound) {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Graph g = oracle::random_connected(8 + rng.below(20), rng.below(30), 3000 + trial);
    auto f = random_faults(g, 1 + rng.below(4), rng);
    if (!is_connected(g, f)) continue;
    const auto D = diameter(g);
    const NodeId u = static_cast<NodeId>(rng.below(g.n()));
    auto d = bfs_dist(g, u, f);
    for (NodeId v = 0; v < g.n(); ++v) EXPECT_LE(d[v], 2 * (f.size() + 1) * D + f.size());
    ++checked;
  }
  EXPECT_GT(checked, 50);
}
