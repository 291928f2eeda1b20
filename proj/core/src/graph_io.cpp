#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "advcongest/graph.hpp"
#include "advcongest/rng.hpp"

namespace advcongest {

namespace {

using Pairs = std::vector<std::pair<NodeId, NodeId>>;

void add_unique(std::set<std::pair<NodeId, NodeId>>& s, NodeId a, NodeId b) {
  if (a == b) return;
  if (a > b) std::swap(a, b);
  s.emplace(a, b);
}

Graph from_set(std::size_t n, const std::set<std::pair<NodeId, NodeId>>& s) {
  return Graph(n, Pairs(s.begin(), s.end()));
}

// Pairing model with rejection of loops and parallel edges at each step
// (Steger-Wormald style), restarted when it gets stuck.
std::optional<Pairs> try_regular(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<NodeId> points;
  points.reserve(n * d);
  for (NodeId v = 0; v < n; ++v)
    for (std::size_t k = 0; k < d; ++k) points.push_back(v);
  std::set<std::pair<NodeId, NodeId>> used;
  Pairs out;
  out.reserve(n * d / 2);
  while (!points.empty()) {
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      auto i = rng.below(points.size());
      auto j = rng.below(points.size());
      if (i == j) continue;
      NodeId a = points[i], b = points[j];
      if (a == b) continue;
      auto key = std::minmax(a, b);
      if (used.count({key.first, key.second})) continue;
      used.emplace(key.first, key.second);
      out.emplace_back(key.first, key.second);
      if (i < j) std::swap(i, j);
      points[i] = points.back();
      points.pop_back();
      points[j] = points.back();
      points.pop_back();
      placed = true;
    }
    if (!placed) return std::nullopt;
  }
  return out;
}

std::uint32_t get_u32(const nlohmann::json& p, const char* key) {
  if (!p.contains(key)) throw std::invalid_argument(std::string("missing generator parameter '") + key + "'");
  auto v = p.at(key).get<std::int64_t>();
  if (v < 0) throw std::invalid_argument(std::string("negative generator parameter '") + key + "'");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

Graph make_cycle(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  return make_circulant(n, {1});
}

Graph make_circulant(std::size_t n, const std::vector<std::uint32_t>& offsets) {
  if (n < 3) throw std::invalid_argument("circulant needs n >= 3");
  if (offsets.empty()) throw std::invalid_argument("circulant needs at least one offset");
  std::set<std::pair<NodeId, NodeId>> s;
  for (auto k : offsets) {
    if (k == 0 || k > n / 2) throw std::invalid_argument("circulant offset must lie in [1, n/2]");
    for (NodeId v = 0; v < n; ++v) add_unique(s, v, static_cast<NodeId>((v + k) % n));
  }
  return from_set(n, s);
}

Graph make_hypercube(std::uint32_t dim) {
  if (dim < 1 || dim > 20) throw std::invalid_argument("hypercube dimension must lie in [1, 20]");
  std::size_t n = std::size_t{1} << dim;
  Pairs p;
  for (NodeId v = 0; v < n; ++v)
    for (std::uint32_t b = 0; b < dim; ++b) {
      NodeId w = v ^ (NodeId{1} << b);
      if (v < w) p.emplace_back(v, w);
    }
  return Graph(n, std::move(p));
}

Graph make_torus(std::size_t a, std::size_t b, bool wrap_chords) {
  if (a < 3 || b < 3) throw std::invalid_argument("torus needs both sides >= 3");
  std::set<std::pair<NodeId, NodeId>> s;
  auto id = [b](std::size_t i, std::size_t j) { return static_cast<NodeId>(i * b + j); };
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      add_unique(s, id(i, j), id((i + 1) % a, j));
      add_unique(s, id(i, j), id(i, (j + 1) % b));
      if (wrap_chords) add_unique(s, id(i, j), id((i + 1) % a, (j + 1) % b));
    }
  return from_set(a * b, s);
}

Graph make_complete(std::size_t n) {
  if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
  Pairs p;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) p.emplace_back(u, v);
  return Graph(n, std::move(p));
}

Graph make_random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0 || d >= n) throw std::invalid_argument("random_regular needs 1 <= d < n");
  if ((n * d) % 2) throw std::invalid_argument("random_regular needs n*d even");
  Rng rng(mix64(seed, 0x7265677565ULL));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    auto pairs = try_regular(n, d, rng);
    if (!pairs) continue;
    Graph g(n, std::move(*pairs));
    if (is_connected(g)) return g;
  }
  throw std::runtime_error("random_regular: no simple connected graph found");
}

Graph generate(const std::string& kind, const nlohmann::json& params, std::uint64_t seed) {
  Graph g;
  if (kind == "cycle") {
    g = make_cycle(get_u32(params, "n"));
  } else if (kind == "circulant") {
    auto offsets = params.value("offsets", std::vector<std::uint32_t>{1, 2});
    g = make_circulant(get_u32(params, "n"), offsets);
  } else if (kind == "hypercube") {
    g = make_hypercube(get_u32(params, "dim"));
  } else if (kind == "torus") {
    g = make_torus(get_u32(params, "a"), get_u32(params, "b"), params.value("wrap_chords", false));
  } else if (kind == "random_regular") {
    g = make_random_regular(get_u32(params, "n"), get_u32(params, "d"), seed);
  } else if (kind == "complete") {
    g = make_complete(get_u32(params, "n"));
  } else {
    throw std::invalid_argument("unknown graph kind '" + kind + "'");
  }
  g.set_provenance({kind, params, seed});
  return g;
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  os << g.n() << ' ' << g.m() << '\n';
  for (const auto& e : g.edges()) os << e.u << ' ' << e.v << '\n';
  return os.str();
}

Graph from_edge_list(const std::string& text) {
  std::istringstream is(text);
  std::size_t n = 0, m = 0;
  if (!(is >> n >> m)) throw std::invalid_argument("edge list: missing 'n m' header");
  Pairs p;
  p.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::int64_t a = 0, b = 0;
    if (!(is >> a >> b)) throw std::invalid_argument("edge list: expected " + std::to_string(m) + " edges");
    if (a < 0 || b < 0) throw std::invalid_argument("edge list: negative node id");
    p.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  return Graph(n, std::move(p));
}

nlohmann::json to_json(const Graph& g) {
  nlohmann::json j;
  j["n"] = g.n();
  j["m"] = g.m();
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  if (g.provenance()) {
    j["provenance"] = {{"kind", g.provenance()->kind},
                       {"params", g.provenance()->params},
                       {"seed", g.provenance()->seed}};
  }
  return j;
}

Graph graph_from_json(const nlohmann::json& j) {
  if (j.contains("edges")) {
    Pairs p;
    for (const auto& e : j.at("edges")) p.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
    Graph g(j.at("n").get<std::size_t>(), std::move(p));
    if (j.contains("provenance")) {
      const auto& pv = j.at("provenance");
      g.set_provenance({pv.at("kind").get<std::string>(), pv.value("params", nlohmann::json::object()),
                        pv.value("seed", std::uint64_t{0})});
    }
    return g;
  }
  return generate(j.at("kind").get<std::string>(), j.value("params", nlohmann::json::object()),
                  j.value("seed", std::uint64_t{0}));
}

}  // namespace advcongest
