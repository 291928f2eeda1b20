#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "advcongest/rng.hpp"

namespace advcongest {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
// Directed edge id: 2*e for the direction lo->hi, 2*e+1 for hi->lo.
using DirId = std::uint32_t;

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct Edge {
  NodeId u;  // u < v
  NodeId v;
};

struct Incidence {
  NodeId neighbor;
  EdgeId edge;
};

// How a graph was produced. Serialized next to the edge list so that a
// fixture can be regenerated from its description.
struct GraphProvenance {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
};

class Graph {
 public:
  Graph() = default;
  // Throws std::invalid_argument on self-loops, duplicate pairs or ids >= n.
  Graph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const Incidence> incident(NodeId v) const {
    return {adj_.data() + offset_[v], adj_.data() + offset_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offset_[v + 1] - offset_[v]; }
  std::size_t min_degree() const;
  std::size_t max_degree() const;

  std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;

  static DirId dir(EdgeId e, NodeId from, const Edge& ed) { return 2 * e + (from == ed.u ? 0u : 1u); }
  DirId dir(EdgeId e, NodeId from) const { return dir(e, from, edges_[e]); }
  NodeId dir_tail(DirId d) const { return (d & 1u) ? edges_[d >> 1].v : edges_[d >> 1].u; }
  NodeId dir_head(DirId d) const { return (d & 1u) ? edges_[d >> 1].u : edges_[d >> 1].v; }

  const std::optional<GraphProvenance>& provenance() const noexcept { return provenance_; }
  void set_provenance(GraphProvenance p) { provenance_ = std::move(p); }

  bool operator==(const Graph& o) const { return n_ == o.n_ && edge_pairs() == o.edge_pairs(); }
  std::vector<std::pair<NodeId, NodeId>> edge_pairs() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> offset_{0};
  std::vector<Incidence> adj_;
  std::optional<GraphProvenance> provenance_;
};

// Sorted set of edge ids.
class EdgeSet {
 public:
  EdgeSet() = default;
  EdgeSet(std::initializer_list<EdgeId> ids) : EdgeSet(std::vector<EdgeId>(ids)) {}
  explicit EdgeSet(std::vector<EdgeId> ids);

  bool contains(EdgeId e) const;
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::vector<EdgeId>& ids() const noexcept { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  void insert(EdgeId e);
  // Dense membership mask of length m.
  std::vector<char> mask(std::size_t m) const;
  bool operator==(const EdgeSet&) const = default;

 private:
  std::vector<EdgeId> ids_;
};

// Exact hop distances from src in g minus the forbidden edges.
std::vector<std::uint32_t> bfs_dist(const Graph& g, NodeId src, const EdgeSet& forbidden = {});

// Same with a dense "edge usable" mask (1 = usable); empty mask means all usable.
std::vector<std::uint32_t> bfs_dist_masked(const Graph& g, NodeId src, std::span<const char> usable);

// Multi-source variant.
std::vector<std::uint32_t> bfs_dist_multi(const Graph& g, std::span<const NodeId> sources,
                                          std::span<const char> usable = {});

bool is_connected(const Graph& g, const EdgeSet& forbidden = {});

// Throws std::invalid_argument if g is disconnected or empty.
std::uint32_t diameter(const Graph& g);
std::uint32_t diameter(const Graph& g, const EdgeSet& forbidden);

// Minimum number of edges whose removal disconnects g; 0 if disconnected.
std::uint32_t edge_connectivity(const Graph& g);

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<u128>(a.num) * b.den < static_cast<u128>(b.num) * a.den;
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<u128>(a.num) * b.den == static_cast<u128>(b.num) * a.den;
  }
};
Rational make_rational(std::uint64_t num, std::uint64_t den);

struct CutStats {
  std::uint64_t boundary = 0;
  std::uint64_t volS = 0;
  std::uint64_t volComp = 0;
  Rational conductance;
  std::vector<NodeId> side;  // the nodes of S
};

inline constexpr std::size_t kExactCutThreshold = 20;

// Exact minimum conductance by enumerating all cuts. Throws std::invalid_argument
// when n exceeds max_n or when some node has degree zero.
CutStats conductance(const Graph& g, std::size_t max_n = kExactCutThreshold);

// Same for a multigraph given as g with a multiplicity per edge id
// (multiplicity 0 removes the edge).
CutStats conductance(const Graph& g, std::span<const std::uint32_t> multiplicity,
                     std::size_t max_n = kExactCutThreshold);

// Conductance of one cut, side given as a node mask.
CutStats cut_stats(const Graph& g, std::span<const char> in_s,
                   std::span<const std::uint32_t> multiplicity = {});

// Spectral estimate for graphs too large for exhaustive cuts. lambda2 is the
// second smallest eigenvalue of the normalized Laplacian; Cheeger's inequality
// gives lambda2/2 <= phi <= sqrt(2*lambda2).
struct ConductanceEstimate {
  double lambda2 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  bool estimate = true;
};
ConductanceEstimate conductance_estimate(const Graph& g);

// vol(B_k(w)) for k = 0,1,... until the ball covers the (component of the) graph.
std::vector<std::uint64_t> ball_volume_profile(const Graph& g, NodeId w);

// Deterministic generators. kind is one of cycle, circulant, hypercube,
// torus, random_regular, complete. Throws std::invalid_argument on
// infeasible parameters.
Graph generate(const std::string& kind, const nlohmann::json& params, std::uint64_t seed = 0);

Graph make_cycle(std::size_t n);
Graph make_circulant(std::size_t n, const std::vector<std::uint32_t>& offsets);
Graph make_hypercube(std::uint32_t dim);
Graph make_torus(std::size_t a, std::size_t b, bool wrap_chords = false);
Graph make_complete(std::size_t n);
Graph make_random_regular(std::size_t n, std::size_t d, std::uint64_t seed);

// Edge-list text: "n m" header then one "u v" line per edge.
std::string to_edge_list(const Graph& g);
Graph from_edge_list(const std::string& text);
nlohmann::json to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

}  // namespace advcongest
