#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "advcongest/covering.hpp"
#include "advcongest/engine.hpp"
#include "advcongest/graph.hpp"

namespace advcongest {

// Unordered node pair as carried by heard-edge messages.
using EdgeKey = std::uint64_t;
inline EdgeKey edge_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

struct MincutResult {
  bool meets_threshold = false;
  std::optional<std::uint32_t> value;
};

// Smallest number of edges meeting every path of the collection.
// meets_threshold is true iff no set of at most t-1 edges does.
// Throws std::invalid_argument when t > 4.
MincutResult mincut_paths(const std::vector<std::vector<EdgeKey>>& paths, std::uint32_t t,
                          bool compute_value = false);
// Exact value only (no threshold guard).
std::uint32_t mincut_value(const std::vector<std::vector<EdgeKey>>& paths);

// Measurement hooks that are not visible to nodes. The fault set is used
// only to label queue-delay records whose delivery path avoids F.
struct Instrumentation {
  bool queue_delay = false;
  EdgeSet audit_faults;
};

struct BB1Config {
  double c1 = 4.0;
  double c2 = 0.5;
  // Constants of the hash families that the protocol builds for itself.
  HashFamilyParams family{1.0 / 64.0, 0.25};
  std::uint64_t seed = 1;
  bool source_active = true;
  Instrumentation instrument;
};

struct BBTConfig {
  double c3 = 3.0;
  // Sizing of the (L, 2t) families built by the doubling variant.
  SampledFamilyParams family{1.0, 2'000'000, 0.5};
  // Step-2 and termination broadcasts run at scale c * t * L_i.
  double c = 12.0;
  std::uint64_t seed = 1;
  bool source_active = true;
};

struct DoublingConfig {
  // Applications are numbered 0.. with D_i = 2^i; at most this many run.
  std::uint32_t max_applications = 12;
  bool triggered_wakeup = false;
};

struct ExpanderBroadcastConfig {
  double c_L = 1.0;
  ExpanderFamilyParams family;
  BBTConfig bbt;
};

// BBalgo over an (L,1) family with L = 7 D'. Throws std::invalid_argument if
// the family was built for a different L.
std::unique_ptr<Protocol> bb1_known(const Graph& g, std::shared_ptr<const CoveringFamily> fam, NodeId s,
                                    std::uint8_t m0, std::uint32_t D_prime, const BB1Config& cfg = {});
// Same, building the hash family from cfg.
std::unique_ptr<Protocol> bb1_known(const Graph& g, NodeId s, std::uint8_t m0, std::uint32_t D_prime,
                                    const BB1Config& cfg = {});
// Diameter-oblivious variant with doubling estimates.
std::unique_ptr<Protocol> bb1_unknown(const Graph& g, NodeId s, std::uint8_t m0, const BB1Config& cfg = {},
                                      const DoublingConfig& dcfg = {});

// BBtalgo over an (L,2t) family.
std::unique_ptr<Protocol> bbt(const Graph& g, std::shared_ptr<const CoveringFamily> fam, NodeId s, std::uint8_t m0,
                              std::uint32_t L, std::uint32_t t, const BBTConfig& cfg = {});
std::unique_ptr<Protocol> bbt_unknown(const Graph& g, NodeId s, std::uint8_t m0, std::uint32_t t,
                                      const BBTConfig& cfg = {}, const DoublingConfig& dcfg = {});

// BBtalgo over a directed expander family with L = c_L * log2(n) / phi.
std::unique_ptr<Protocol> expander_broadcast(const Graph& g, NodeId s, std::uint8_t m0, std::uint32_t t,
                                             double phi_estimate, std::uint64_t seed,
                                             const ExpanderBroadcastConfig& cfg = {});
std::uint32_t expander_path_bound(std::size_t n, double phi_estimate, double c_L);

// Round budget of one BBalgo / BBtalgo execution, as computed by the nodes.
Round bb1_budget(const CoveringFamily& fam, std::size_t width, const BB1Config& cfg);
Round bbt_budget(std::size_t ell, std::uint32_t L, const BBTConfig& cfg, bool local_mode);

}  // namespace advcongest
