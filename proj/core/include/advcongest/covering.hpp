#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "advcongest/graph.hpp"

namespace advcongest {

enum class Flavor { hash, sampled, expander_undirected, expander_directed };

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);

struct HashFamilyParams {
  double a1 = 4.0;
  double a2 = 2.0;
};

struct SampledFamilyParams {
  double b = 3.0;
  std::size_t cap = 2'000'000;
  // When set, every edge is dropped with this probability and the family
  // size becomes ceil(b * drop^-k * k * ln n), independent of L.
  std::optional<double> drop;
};

struct ExpanderFamilyParams {
  double c_f = 6.0;
  double gamma = 0.5;
};

// An indexed family of subgraphs G_0..G_{ell-1}. Membership is a pure
// function of (seed, parameters, edge id, direction, index), so each
// endpoint of an edge evaluates it without communication.
class CoveringFamily {
 public:
  Flavor flavor() const noexcept { return flavor_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t ell() const noexcept { return ell_; }
  std::uint32_t L() const noexcept { return L_; }
  std::uint32_t k() const noexcept { return k_; }
  bool directed() const noexcept { return flavor_ == Flavor::expander_directed; }
  std::size_t edge_universe() const noexcept { return m_; }

  // Hash flavor only.
  std::size_t hash_count() const noexcept { return h_size_; }
  std::size_t hash_range() const noexcept { return q_; }
  std::uint32_t hash_value(std::size_t h, EdgeId e) const;

  double keep_probability() const noexcept { return keep_; }

  // Undirected membership. For the directed flavor an edge counts as present
  // only if both directions are.
  bool contains(EdgeId e, std::size_t i) const;
  // Membership of a direction (2*e or 2*e+1; see Graph::dir).
  bool contains_dir(DirId d, std::size_t i) const;
  // The value a given endpoint computes for edge e. Identical for both
  // endpoints by construction; exposed so tests can check that.
  bool evaluate_at(NodeId viewer, EdgeId e, std::size_t i) const;

  // Indices i, ascending, with e missing from G_i (either direction missing
  // for the directed flavor).
  std::vector<std::uint32_t> absent_indices(EdgeId e) const;

  // Public parameters visible to every node and to the adversary.
  nlohmann::json descriptor() const;

  bool operator==(const CoveringFamily& o) const { return descriptor() == o.descriptor(); }

 private:
  friend CoveringFamily build_hash_family(const Graph&, std::uint32_t, std::uint64_t, const HashFamilyParams&);
  friend CoveringFamily build_sampled_family(const Graph&, std::uint32_t, std::uint32_t, std::uint64_t,
                                             const SampledFamilyParams&);
  friend CoveringFamily build_expander_family(const Graph&, std::uint32_t, std::uint64_t, bool,
                                              const ExpanderFamilyParams&, std::uint32_t);
  friend CoveringFamily family_from_descriptor(const nlohmann::json&, const Graph&);
  friend CoveringFamily trivial_family(const Graph&);

  void build_head_table(const Graph& g);

  Flavor flavor_ = Flavor::sampled;
  std::uint64_t seed_ = 0;
  std::size_t ell_ = 1;
  std::uint32_t L_ = 0;
  std::uint32_t k_ = 0;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  nlohmann::json params_ = nlohmann::json::object();
  double keep_ = 1.0;
  std::uint64_t keep_threshold_ = ~std::uint64_t{0};
  bool keep_all_ = true;
  std::size_t h_size_ = 0;
  std::size_t q_ = 0;
  std::vector<std::uint32_t> hash_table_;  // h * m + e -> h(e), when small enough
  std::vector<NodeId> head_of_dir_;        // directed flavor: head node of each direction
};

CoveringFamily build_hash_family(const Graph& g, std::uint32_t L, std::uint64_t seed,
                                 const HashFamilyParams& p = {});
// (H_size, q) of the hash family for m edges, without building it.
std::pair<std::size_t, std::size_t> hash_family_shape(std::size_t m, std::uint32_t L, const HashFamilyParams& p = {});
CoveringFamily build_sampled_family(const Graph& g, std::uint32_t L, std::uint32_t k, std::uint64_t seed,
                                    const SampledFamilyParams& p = {});
// L is recorded for verification; the construction does not depend on it.
CoveringFamily build_expander_family(const Graph& g, std::uint32_t t, std::uint64_t seed, bool directed,
                                     const ExpanderFamilyParams& p = {}, std::uint32_t L = 0);
// The one-subgraph family {g}.
CoveringFamily trivial_family(const Graph& g);
CoveringFamily family_from_descriptor(const nlohmann::json& d, const Graph& g);

std::size_t width(const CoveringFamily& fam, const Graph& g);

struct CoverViolation {
  NodeId u = 0;
  NodeId v = 0;
  std::vector<EdgeId> faults;
  std::vector<EdgeId> path;  // empty for relaxed checks
};

struct CoverCheck {
  bool ok = true;
  std::optional<CoverViolation> counterexample;
  std::uint64_t cases = 0;
};

// Exhaustive check of path containment (P1) and fault avoidance (P2) over
// every (u, v, E') with |E'| <= k and every simple u-v path of length <= L in
// g minus E'. Throws std::invalid_argument when n > 10 or k > 2.
CoverCheck verify_strict(const CoveringFamily& fam, const Graph& g, std::uint32_t L, std::uint32_t k);

// Check of the distance form (P1'): for every E' with |E'| <= k and every pair
// whose distance in g minus E' is at most L, some G_i avoiding E' has
// dist_{G_i}(u,v) <= L (directed distance for the directed flavor).
// Throws std::invalid_argument if the number of fault sets exceeds budget.
CoverCheck verify_relaxed(const CoveringFamily& fam, const Graph& g, std::uint32_t L, std::uint32_t k,
                          std::uint64_t budget = 5'000'000);

}  // namespace advcongest
