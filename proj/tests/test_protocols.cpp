#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "advcongest/adversary.hpp"
#include "advcongest/engine.hpp"
#include "advcongest/protocols.hpp"
#include "advcongest/rng.hpp"
#include "oracles.hpp"

using namespace advcongest;

namespace {

EdgeKey k(NodeId a, NodeId b) { return edge_key(a, b); }

bool all_output(const RunReport& r, std::uint8_t m0) {
  for (const auto& o : r.outputs)
    if (!o || *o != m0) return false;
  return true;
}

}  // namespace

TEST(Mincut, DisjointPaths) {
  std::vector<std::vector<EdgeKey>> p{{k(0, 1), k(1, 5)}, {k(0, 2), k(2, 5)}, {k(0, 3), k(3, 4), k(4, 5)}};
  EXPECT_EQ(mincut_value(p), 3u);
  EXPECT_TRUE(mincut_paths(p, 3).meets_threshold);
  EXPECT_FALSE(mincut_paths(p, 4).meets_threshold);
  EXPECT_EQ(mincut_paths(p, 2, true).value, 3u);
}

TEST(Mincut, SharedEdge) {
  std::vector<std::vector<EdgeKey>> p{{k(0, 1), k(1, 2)}, {k(0, 1), k(1, 3), k(3, 2)}, {k(0, 1), k(1, 4)}};
  EXPECT_EQ(mincut_value(p), 1u);
  EXPECT_TRUE(mincut_paths(p, 1).meets_threshold);
  EXPECT_FALSE(mincut_paths(p, 2).meets_threshold);
}

TEST(Mincut, EmptyCollection) {
  EXPECT_EQ(mincut_value({}), 0u);
  EXPECT_FALSE(mincut_paths({}, 1).meets_threshold);
}

TEST(Mincut, Guard) { EXPECT_THROW(mincut_paths({{k(0, 1)}}, 5), std::invalid_argument); }

TEST(Mincut, MatchesHittingSetOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Graph g = oracle::random_connected(12, 8, trial);
    std::vector<std::vector<EdgeKey>> paths(1 + rng.below(5));
    for (auto& p : paths) {
      NodeId v = static_cast<NodeId>(rng.below(g.n()));
      const auto len = 1 + rng.below(8);
      for (std::uint64_t i = 0; i < len; ++i) {
        auto inc = g.incident(v);
        auto next = inc[rng.below(inc.size())].neighbor;
        p.push_back(k(v, next));
        v = next;
      }
    }
    EXPECT_EQ(mincut_value(paths), oracle::hitting_set(paths)) << "trial " << trial;
  }
}

TEST(Bb1Known, FaultFreeOnC8) {
  Graph g = make_cycle(8);
  const std::uint32_t L = 7 * diameter(g);
  // The cycle has many long detours, so use the full-size hash family and
  // check it first.
  auto fam = std::make_shared<const CoveringFamily>(build_hash_family(g, L, 1));
  ASSERT_TRUE(verify_strict(*fam, g, L, 1).ok);
  auto adv = make_silent();
  for (std::uint8_t m0 : {0, 1}) {
    auto p = bb1_known(g, fam, 2, m0, diameter(g));
    auto r = run(g, *p, *adv, {}, {});
    EXPECT_TRUE(all_output(r.report, m0));
    EXPECT_TRUE(r.report.liveness);
  }
}

TEST(Bb1Known, BudgetArithmetic) {
  Graph g = make_circulant(16, {1, 2});
  BB1Config cfg;
  auto fam = build_hash_family(g, 28, 1, cfg.family);
  const auto w = width(fam, g);
  const Round r1 = static_cast<Round>(std::ceil(cfg.c1 * (28.0 * w + fam.ell())));
  EXPECT_GE(bb1_budget(fam, w, cfg), r1);
}

TEST(Bb1Known, RejectsMismatchedFamily) {
  Graph g = make_circulant(16, {1, 2});
  auto fam = std::make_shared<const CoveringFamily>(build_hash_family(g, 20, 1));
  EXPECT_THROW(bb1_known(g, fam, 0, 1, 4), std::invalid_argument);
}

TEST(Bb1Known, SafeUnderSuiteOnC32) {
  Graph g = make_circulant(32, {1, 2});
  const auto D = diameter(g);
  Rng rng(4);
  for (const auto& name : strategy_names()) {
    if (name == "scripted") continue;
    for (int rep = 0; rep < 3; ++rep) {
      EdgeSet f{static_cast<EdgeId>(rng.below(g.m()))};
      auto adv = make_strategy(name, {{"bit", 0}, {"source", 0}}, g, f);
      BB1Config cfg;
      cfg.seed = 100 + rep;
      auto p = bb1_known(g, 0, 1, D, cfg);
      auto r = run(g, *p, *adv, f, {}, rep);
      EXPECT_TRUE(r.report.safety) << name;
      EXPECT_TRUE(r.report.liveness) << name;
    }
  }
}

TEST(Bb1Known, SilentSourceMeansNoAccepts) {
  Graph g = make_circulant(16, {1, 2});
  BB1Config cfg;
  cfg.source_active = false;
  for (const auto& name : {"forge_flood", "forge_accept", "bit_flip"}) {
    EdgeSet f{3};
    auto adv = make_strategy(name, {{"bit", 0}, {"spontaneous", true}}, g, f);
    auto p = bb1_known(g, 0, 1, diameter(g), cfg);
    auto r = run(g, *p, *adv, f, {}, 1);
    for (const auto& o : r.report.outputs) EXPECT_FALSE(o.has_value()) << name;
    EXPECT_FALSE(r.report.expected.has_value());
  }
}

TEST(Bb1Known, PipelineDelayWithHonestTraffic) {
  for (auto g : {make_circulant(16, {1, 2}), make_hypercube(5)}) {
    EdgeSet f{5};
    BB1Config cfg;
    cfg.instrument.queue_delay = true;
    cfg.instrument.audit_faults = f;
    auto fam = std::make_shared<const CoveringFamily>(build_hash_family(g, 7 * diameter(g), cfg.seed, cfg.family));
    const auto w = width(*fam, g);
    for (const auto& name : {"silent", "echo"}) {
      auto adv = make_strategy(name, {}, g, f);
      auto p = bb1_known(g, fam, 0, 1, diameter(g), cfg);
      auto r = run(g, *p, *adv, f, {}, 2);
      std::size_t clean = 0;
      for (const auto& q : r.report.queue_delay) {
        if (!q.clean) continue;
        ++clean;
        EXPECT_LE(q.delay, std::uint64_t{q.eta} * w);
        EXPECT_EQ(q.arrival, q.index + q.eta + q.delay);
      }
      EXPECT_GT(clean, 0u);
    }
  }
}

TEST(Bb1Known, PipelineArrivalUnderDelayStress) {
  Graph g = make_circulant(16, {1, 2});
  EdgeSet f{5};
  BB1Config cfg;
  cfg.instrument.queue_delay = true;
  cfg.instrument.audit_faults = f;
  auto adv = make_delay_stress(0);
  auto fam = std::make_shared<const CoveringFamily>(build_hash_family(g, 7 * diameter(g), cfg.seed, cfg.family));
  auto p = bb1_known(g, fam, 0, 1, diameter(g), cfg);
  auto r = run(g, *p, *adv, f, {}, 2);
  const auto r1 = r.report.details.at("R1").get<Round>();
  for (const auto& q : r.report.queue_delay) {
    if (!q.clean) continue;
    EXPECT_EQ(q.arrival, q.index + q.eta + q.delay);
    EXPECT_LE(q.arrival, r1);
  }
  EXPECT_TRUE(r.report.liveness);
}

TEST(Bb1Unknown, EstimateWindowAndLocality) {
  for (auto g : {make_circulant(16, {1, 2}), make_hypercube(4), make_circulant(32, {1, 2})}) {
    const auto D = diameter(g);
    EdgeSet f{2};
    auto adv = make_forge_flood(0);
    auto p = bb1_unknown(g, 0, 1);
    auto r = run(g, *p, *adv, f, {}, 3);
    EXPECT_TRUE(r.report.safety);
    EXPECT_TRUE(r.report.liveness);
    ASSERT_TRUE(r.report.diameter_estimate.has_value());
    const auto est = *r.report.diameter_estimate;
    EXPECT_LE(D, 28 * est);
    EXPECT_LE(est, 2 * D);
    auto dist = bfs_dist(g, 0, f);
    for (const auto& app : r.report.details.at("applications")) {
      const auto Di = app.at("D_i").get<std::uint32_t>();
      for (auto v : app.at("acceptors")) EXPECT_LE(dist[v.get<NodeId>()], 14 * Di);
      if (!app.at("uninformed").empty()) EXPECT_TRUE(app.at("source_accepted_M").get<bool>());
    }
  }
}

TEST(Bb1Unknown, SpontaneousRunAcceptsNothing) {
  Graph g = make_circulant(16, {1, 2});
  BB1Config cfg;
  cfg.source_active = false;
  DoublingConfig dcfg;
  dcfg.max_applications = 3;
  EdgeSet f{0};
  auto adv = make_forge_accept(0, true);
  auto p = bb1_unknown(g, 0, 1, cfg, dcfg);
  auto r = run(g, *p, *adv, f, {}, 4);
  for (const auto& o : r.report.outputs) EXPECT_FALSE(o.has_value());
  EXPECT_EQ(r.report.details.at("spontaneous_accepts").get<std::uint64_t>(), 0u);
}

TEST(Bbt, FaultFreeOnC16) {
  Graph g = make_circulant(16, {1, 2});
  const std::uint32_t L = 8 * diameter(g);
  auto fam = std::make_shared<const CoveringFamily>(build_sampled_family(g, L, 2, 1, {1.0, 2'000'000, 0.5}));
  auto adv = make_silent();
  auto p = bbt(g, fam, 0, 0, L, 1);
  auto r = run(g, *p, *adv, {}, {});
  EXPECT_TRUE(all_output(r.report, 0));
}

TEST(Bbt, BudgetGrowsWithFamily) {
  BBTConfig cfg;
  EXPECT_LT(bbt_budget(10, 20, cfg, false), bbt_budget(20, 20, cfg, false));
  EXPECT_LE(bbt_budget(20, 20, cfg, true), bbt_budget(20, 20, cfg, false));
}

TEST(BbtUnknown, TwoFaultsOnHypercube) {
  Graph g = make_hypercube(5);
  const auto D = diameter(g);
  EngineConfig ec;
  ec.t = 2;
  for (const auto& name : {"silent", "forge_path", "forge_accept"}) {
    EdgeSet f{1, 40};
    auto adv = make_strategy(name, {{"bit", 0}, {"source", 0}}, g, f);
    auto p = bbt_unknown(g, 0, 1, 2);
    auto r = run(g, *p, *adv, f, ec, 8);
    EXPECT_TRUE(r.report.safety) << name;
    EXPECT_TRUE(r.report.liveness) << name;
    ASSERT_TRUE(r.report.details.contains("i_star"));
    EXPECT_LE(r.report.details.at("i_star").get<double>(), std::log2(D) + 1);
  }
}

TEST(ExpanderBroadcast, FaultFree) {
  Graph g = make_random_regular(64, 12, 3);
  const double phi = conductance_estimate(g).lower;
  auto adv = make_silent();
  auto p = expander_broadcast(g, 0, 1, 1, phi, 5);
  auto r = run(g, *p, *adv, {}, {});
  EXPECT_TRUE(all_output(r.report, 1));
}

TEST(ExpanderBroadcast, PathBound) {
  EXPECT_EQ(expander_path_bound(256, 0.5, 1.0), 16u);
  EXPECT_GE(expander_path_bound(100, 0.3, 2.0), static_cast<std::uint32_t>(2 * std::log2(100.0) / 0.3));
}
