#include "advcongest/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace advcongest {

Graph::Graph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) : n_(n) {
  for (auto& [a, b] : edges) {
    if (a >= n || b >= n) throw std::invalid_argument("edge endpoint out of range");
    if (a == b) throw std::invalid_argument("self-loop");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge");

  edges_.reserve(edges.size());
  for (auto [a, b] : edges) edges_.push_back({a, b});

  std::vector<std::uint32_t> deg(n, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offset_[v + 1] = offset_[v] + deg[v];
  adj_.resize(offset_[n]);
  std::vector<std::uint32_t> fill(offset_.begin(), offset_.end() - 1);
  // Edges are visited in id order, so every incidence list is sorted by id.
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    adj_[fill[e.u]++] = {e.v, id};
    adj_[fill[e.v]++] = {e.u, id};
  }
}

std::size_t Graph::min_degree() const {
  std::size_t best = n_ ? degree(0) : 0;
  for (NodeId v = 1; v < n_; ++v) best = std::min(best, degree(v));
  return best;
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (NodeId v = 0; v < n_; ++v) best = std::max(best, degree(v));
  return best;
}

std::optional<EdgeId> Graph::find_edge(NodeId a, NodeId b) const {
  if (a == b || a >= n_ || b >= n_) return std::nullopt;
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{a, b}, [](const Edge& x, const Edge& y) {
    return x.u != y.u ? x.u < y.u : x.v < y.v;
  });
  if (it == edges_.end() || it->u != a || it->v != b) return std::nullopt;
  return static_cast<EdgeId>(it - edges_.begin());
}

std::vector<std::pair<NodeId, NodeId>> Graph::edge_pairs() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.emplace_back(e.u, e.v);
  return out;
}

EdgeSet::EdgeSet(std::vector<EdgeId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool EdgeSet::contains(EdgeId e) const { return std::binary_search(ids_.begin(), ids_.end(), e); }

void EdgeSet::insert(EdgeId e) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), e);
  if (it == ids_.end() || *it != e) ids_.insert(it, e);
}

std::vector<char> EdgeSet::mask(std::size_t m) const {
  std::vector<char> out(m, 0);
  for (auto e : ids_)
    if (e < m) out[e] = 1;
  return out;
}

std::vector<std::uint32_t> bfs_dist_multi(const Graph& g, std::span<const NodeId> sources,
                                          std::span<const char> usable) {
  std::vector<std::uint32_t> dist(g.n(), kUnreachable);
  std::vector<NodeId> queue;
  queue.reserve(g.n());
  for (auto s : sources) {
    if (dist[s] == kUnreachable) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId x = queue[head];
    for (const auto& inc : g.incident(x)) {
      if (!usable.empty() && !usable[inc.edge]) continue;
      if (dist[inc.neighbor] != kUnreachable) continue;
      dist[inc.neighbor] = dist[x] + 1;
      queue.push_back(inc.neighbor);
    }
  }
  return dist;
}

std::vector<std::uint32_t> bfs_dist_masked(const Graph& g, NodeId src, std::span<const char> usable) {
  NodeId s[1] = {src};
  return bfs_dist_multi(g, s, usable);
}

std::vector<std::uint32_t> bfs_dist(const Graph& g, NodeId src, const EdgeSet& forbidden) {
  if (src >= g.n()) throw std::out_of_range("bfs source out of range");
  if (forbidden.empty()) return bfs_dist_masked(g, src, {});
  auto mask = forbidden.mask(g.m());
  for (auto& c : mask) c = !c;
  return bfs_dist_masked(g, src, mask);
}

bool is_connected(const Graph& g, const EdgeSet& forbidden) {
  if (g.n() == 0) return true;
  auto d = bfs_dist(g, 0, forbidden);
  return std::none_of(d.begin(), d.end(), [](auto x) { return x == kUnreachable; });
}

std::uint32_t diameter(const Graph& g, const EdgeSet& forbidden) {
  if (g.n() == 0) throw std::invalid_argument("diameter of empty graph");
  std::uint32_t best = 0;
  for (NodeId v = 0; v < g.n(); ++v) {
    auto d = bfs_dist(g, v, forbidden);
    for (auto x : d) {
      if (x == kUnreachable) throw std::invalid_argument("diameter of disconnected graph");
      best = std::max(best, x);
    }
  }
  return best;
}

std::uint32_t diameter(const Graph& g) { return diameter(g, EdgeSet{}); }

namespace {

// Unit-capacity max flow between s and t on the undirected graph, stopping
// once `limit` augmenting paths are found.
std::uint32_t unit_max_flow(const Graph& g, NodeId s, NodeId t, std::uint32_t limit) {
  // flow[d] for each directed edge id: 1 if one unit is pushed along d.
  std::vector<std::int8_t> flow(2 * g.m(), 0);
  std::vector<DirId> via(g.n());
  std::vector<char> seen(g.n());
  std::vector<NodeId> queue;
  std::uint32_t total = 0;
  while (total < limit) {
    std::fill(seen.begin(), seen.end(), 0);
    queue.clear();
    queue.push_back(s);
    seen[s] = 1;
    bool found = false;
    for (std::size_t head = 0; head < queue.size() && !found; ++head) {
      NodeId x = queue[head];
      for (const auto& inc : g.incident(x)) {
        DirId d = g.dir(inc.edge, x);
        // residual capacity of d: 1 - flow[d] + flow[reverse]
        int residual = 1 - flow[d] + flow[d ^ 1u];
        if (residual <= 0 || seen[inc.neighbor]) continue;
        seen[inc.neighbor] = 1;
        via[inc.neighbor] = d;
        if (inc.neighbor == t) {
          found = true;
          break;
        }
        queue.push_back(inc.neighbor);
      }
    }
    if (!found) break;
    for (NodeId x = t; x != s;) {
      DirId d = via[x];
      if (flow[d ^ 1u]) {
        flow[d ^ 1u] = 0;
      } else {
        flow[d] = 1;
      }
      x = g.dir_tail(d);
    }
    ++total;
  }
  return total;
}

}  // namespace

std::uint32_t edge_connectivity(const Graph& g) {
  if (g.n() <= 1) return 0;
  if (!is_connected(g)) return 0;
  auto best = static_cast<std::uint32_t>(g.min_degree());
  for (NodeId t = 1; t < g.n() && best > 0; ++t) best = std::min(best, unit_max_flow(g, 0, t, best));
  return best;
}

Rational make_rational(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  auto d = std::gcd(num, den);
  if (d == 0) d = 1;
  return {num / d, den / d};
}

CutStats cut_stats(const Graph& g, std::span<const char> in_s, std::span<const std::uint32_t> mult) {
  CutStats st;
  for (EdgeId e = 0; e < g.m(); ++e) {
    std::uint64_t w = mult.empty() ? 1 : mult[e];
    const auto& ed = g.edge(e);
    bool a = in_s[ed.u], b = in_s[ed.v];
    if (a != b) st.boundary += w;
    st.volS += w * (a + b);
    st.volComp += w * (2 - a - b);
  }
  for (NodeId v = 0; v < g.n(); ++v)
    if (in_s[v]) st.side.push_back(v);
  auto small = std::min(st.volS, st.volComp);
  st.conductance = small ? make_rational(st.boundary, small) : Rational{0, 1};
  return st;
}

CutStats conductance(const Graph& g, std::span<const std::uint32_t> mult, std::size_t max_n) {
  const std::size_t n = g.n();
  if (n < 2) throw std::invalid_argument("conductance needs at least two nodes");
  if (n > max_n) throw std::invalid_argument("graph too large for exact conductance");
  std::vector<std::uint64_t> wdeg(n, 0);
  for (EdgeId e = 0; e < g.m(); ++e) {
    std::uint64_t w = mult.empty() ? 1 : mult[e];
    wdeg[g.edge(e).u] += w;
    wdeg[g.edge(e).v] += w;
  }
  for (auto d : wdeg)
    if (d == 0) throw std::invalid_argument("conductance undefined with an isolated node");
  const std::uint64_t total = std::accumulate(wdeg.begin(), wdeg.end(), std::uint64_t{0});

  // Gray-code walk over subsets of nodes 0..n-2; node n-1 stays outside S,
  // which loses nothing because phi(S) = phi(V \ S).
  std::vector<char> in(n, 0);
  std::uint64_t boundary = 0, vol = 0;
  Rational best{1, 0};
  std::uint64_t best_code = 0;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  std::uint64_t code = 0;
  for (std::uint64_t step = 1; step < count; ++step) {
    auto bit = static_cast<NodeId>(__builtin_ctzll(step));
    code ^= std::uint64_t{1} << bit;
    std::uint64_t inside = 0;
    for (const auto& inc : g.incident(bit)) {
      if (in[inc.neighbor]) inside += mult.empty() ? 1 : mult[inc.edge];
    }
    if (in[bit]) {
      in[bit] = 0;
      vol -= wdeg[bit];
      boundary = boundary + 2 * inside - wdeg[bit];
    } else {
      in[bit] = 1;
      vol += wdeg[bit];
      boundary = boundary + wdeg[bit] - 2 * inside;
    }
    std::uint64_t small = std::min(vol, total - vol);
    // boundary/small < best.num/best.den
    if (static_cast<u128>(boundary) * best.den < static_cast<u128>(best.num) * small ||
        best.den == 0) {
      best = {boundary, small};
      best_code = code;
    }
  }
  std::vector<char> side(n, 0);
  for (NodeId v = 0; v + 1 < n; ++v) side[v] = (best_code >> v) & 1u;
  return cut_stats(g, side, mult);
}

CutStats conductance(const Graph& g, std::size_t max_n) { return conductance(g, {}, max_n); }

std::vector<std::uint64_t> ball_volume_profile(const Graph& g, NodeId w) {
  auto d = bfs_dist(g, w);
  std::uint32_t radius = 0;
  for (auto x : d)
    if (x != kUnreachable) radius = std::max(radius, x);
  std::vector<std::uint64_t> vol(radius + 1, 0);
  for (NodeId v = 0; v < g.n(); ++v)
    if (d[v] != kUnreachable) vol[d[v]] += g.degree(v);
  for (std::size_t k = 1; k < vol.size(); ++k) vol[k] += vol[k - 1];
  return vol;
}

}  // namespace advcongest
