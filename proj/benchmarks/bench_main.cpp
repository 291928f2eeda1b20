#include <benchmark/benchmark.h>

#include <memory>

#include "advcongest/adversary.hpp"
#include "advcongest/covering.hpp"
#include "advcongest/engine.hpp"
#include "advcongest/graph.hpp"
#include "advcongest/protocols.hpp"
#include "advcongest/rng.hpp"

using namespace advcongest;

static void BM_BfsDist(benchmark::State& st) {
  Graph g = make_random_regular(static_cast<std::size_t>(st.range(0)), 8, 1);
  EdgeSet f{0, 1, 2};
  for (auto _ : st) benchmark::DoNotOptimize(bfs_dist(g, 0, f));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.m()));
}
BENCHMARK(BM_BfsDist)->Arg(256)->Arg(4096);

static void BM_HashContains(benchmark::State& st) {
  Graph g = make_circulant(64, {1, 2});
  auto fam = build_hash_family(g, 7 * diameter(g), 1);
  std::size_t i = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(fam.contains(static_cast<EdgeId>(i % g.m()), i % fam.ell()));
    ++i;
  }
}
BENCHMARK(BM_HashContains);

static void BM_Mincut(benchmark::State& st) {
  Graph g = make_hypercube(6);
  Rng rng(5);
  std::vector<std::vector<EdgeKey>> paths(static_cast<std::size_t>(st.range(0)));
  for (auto& p : paths) {
    NodeId v = 0;
    for (int i = 0; i < 12; ++i) {
      auto inc = g.incident(v);
      NodeId next = inc[rng.below(inc.size())].neighbor;
      p.push_back(edge_key(v, next));
      v = next;
    }
  }
  for (auto _ : st) benchmark::DoNotOptimize(mincut_paths(paths, 3));
}
BENCHMARK(BM_Mincut)->Arg(8)->Arg(64);

static void BM_Bb1KnownRun(benchmark::State& st) {
  Graph g = make_circulant(static_cast<std::size_t>(st.range(0)), {1, 2});
  const auto D = diameter(g);
  EdgeSet f{3};
  for (auto _ : st) {
    auto adv = make_forge_flood(0);
    auto p = bb1_known(g, 0, 1, D);
    auto r = run(g, *p, *adv, f, {}, 1);
    st.counters["rounds"] = static_cast<double>(r.report.rounds_used);
  }
}
BENCHMARK(BM_Bb1KnownRun)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_BbtRun(benchmark::State& st) {
  Graph g = make_hypercube(5);
  const std::uint32_t L = 8 * diameter(g);
  auto fam = std::make_shared<const CoveringFamily>(build_sampled_family(g, L, 2, 1, {1.0, 2'000'000, 0.5}));
  EdgeSet f{7};
  for (auto _ : st) {
    auto adv = make_forge_path(0, 0);
    auto p = bbt(g, fam, 0, 1, L, 1);
    benchmark::DoNotOptimize(run(g, *p, *adv, f, {}, 1));
  }
}
BENCHMARK(BM_BbtRun)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
