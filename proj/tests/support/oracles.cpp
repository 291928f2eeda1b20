#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "advcongest/rng.hpp"

namespace oracle {

std::vector<std::uint32_t> matrix_distances(const Graph& g, NodeId src, const EdgeSet& forbidden) {
  const std::size_t n = g.n();
  std::vector<std::vector<char>> a(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1;
  for (EdgeId e = 0; e < g.m(); ++e) {
    if (forbidden.contains(e)) continue;
    a[g.edge(e).u][g.edge(e).v] = 1;
    a[g.edge(e).v][g.edge(e).u] = 1;
  }
  std::vector<char> reach(n, 0);
  reach[src] = 1;
  std::vector<std::uint32_t> dist(n, kInf);
  dist[src] = 0;
  for (std::uint32_t k = 1; k < n; ++k) {
    std::vector<char> next(n, 0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n && !next[j]; ++i) next[j] = reach[i] && a[i][j];
    for (std::size_t j = 0; j < n; ++j)
      if (next[j] && dist[j] == kInf) dist[j] = k;
    reach = next;
  }
  return dist;
}

std::uint32_t hitting_set(const std::vector<std::vector<EdgeKey>>& paths) {
  const std::size_t p = paths.size();
  if (p == 0) return 0;
  std::map<EdgeKey, std::uint32_t> sig;
  for (std::size_t i = 0; i < p; ++i)
    for (auto e : paths[i]) sig[e] |= 1u << i;
  std::set<std::uint32_t> masks;
  for (const auto& [e, m] : sig) masks.insert(m);
  const std::uint32_t full = (1u << p) - 1;
  std::vector<std::uint32_t> best(full + 1, kInf);
  best[0] = 0;
  for (std::uint32_t s = 0; s <= full; ++s) {
    if (best[s] == kInf) continue;
    for (auto m : masks) best[s | m] = std::min(best[s | m], best[s] + 1);
  }
  // An empty path cannot be hit.
  return best[full];
}

Cut cut(const Graph& g, std::uint64_t mask, const std::vector<std::uint32_t>& mult) {
  Cut c;
  for (EdgeId e = 0; e < g.m(); ++e) {
    const std::uint64_t w = mult.empty() ? 1 : mult[e];
    const bool a = (mask >> g.edge(e).u) & 1u;
    const bool b = (mask >> g.edge(e).v) & 1u;
    if (a != b) c.boundary += w;
    c.vol_s += w * (a + b);
    c.vol_c += w * (2 - a - b);
  }
  return c;
}

std::pair<std::uint64_t, std::uint64_t> min_conductance(const Graph& g) {
  std::pair<std::uint64_t, std::uint64_t> best{1, 0};
  const std::uint64_t all = (std::uint64_t{1} << g.n()) - 1;
  for (std::uint64_t s = 1; s < all; ++s) {
    const auto c = cut(g, s);
    const auto den = std::min(c.vol_s, c.vol_c);
    if (den == 0) continue;
    if (best.second == 0 || c.boundary * best.second < best.first * den) best = {c.boundary, den};
  }
  return best;
}

std::uint64_t min_edge_cut(const Graph& g) {
  std::uint64_t best = ~std::uint64_t{0};
  const std::uint64_t all = (std::uint64_t{1} << g.n()) - 1;
  for (std::uint64_t s = 1; s < all; ++s) best = std::min(best, cut(g, s).boundary);
  return best;
}

bool cover_strict(const advcongest::CoveringFamily& fam, const Graph& g, std::uint32_t L, std::uint32_t k) {
  std::vector<std::vector<EdgeId>> fault_sets{{}};
  for (std::uint32_t size = 1; size <= k; ++size) {
    std::vector<EdgeId> cur;
    std::function<void(EdgeId)> rec = [&](EdgeId from) {
      if (cur.size() == size) {
        fault_sets.push_back(cur);
        return;
      }
      for (EdgeId e = from; e < g.m(); ++e) {
        cur.push_back(e);
        rec(e + 1);
        cur.pop_back();
      }
    };
    rec(0);
  }
  // All simple paths (as edge lists) between ordered pairs u < v, length <= L.
  std::vector<std::vector<EdgeId>> paths;
  std::vector<char> on(g.n(), 0);
  std::vector<EdgeId> path;
  std::function<void(NodeId, NodeId)> dfs = [&](NodeId start, NodeId x) {
    if (x > start && !path.empty()) paths.push_back(path);
    if (path.size() == L) return;
    for (const auto& inc : g.incident(x)) {
      if (on[inc.neighbor]) continue;
      on[inc.neighbor] = 1;
      path.push_back(inc.edge);
      dfs(start, inc.neighbor);
      path.pop_back();
      on[inc.neighbor] = 0;
    }
  };
  for (NodeId s = 0; s < g.n(); ++s) {
    on[s] = 1;
    dfs(s, s);
    on[s] = 0;
  }
  for (const auto& f : fault_sets) {
    for (const auto& p : paths) {
      bool hits = false;
      for (auto e : p) hits = hits || std::find(f.begin(), f.end(), e) != f.end();
      if (hits) continue;
      bool found = false;
      for (std::size_t i = 0; i < fam.ell() && !found; ++i) {
        bool ok = true;
        for (auto e : p) ok = ok && fam.contains(e, i);
        for (auto e : f) ok = ok && !fam.contains(e, i);
        found = ok;
      }
      if (!found) return false;
    }
  }
  return true;
}

Graph random_connected(std::size_t n, std::size_t extra, std::uint64_t seed) {
  advcongest::Rng rng(seed);
  std::set<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 1; v < n; ++v) {
    auto u = static_cast<NodeId>(rng.below(v));
    edges.insert({u, v});
  }
  std::size_t tries = 0;
  while (edges.size() < n - 1 + extra && tries++ < 100 * (extra + 1)) {
    auto a = static_cast<NodeId>(rng.below(n));
    auto b = static_cast<NodeId>(rng.below(n));
    if (a == b) continue;
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  return Graph(n, {edges.begin(), edges.end()});
}

}  // namespace oracle
