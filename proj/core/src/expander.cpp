#include "advcongest/expander.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "advcongest/rng.hpp"

namespace advcongest {

namespace {
constexpr std::uint64_t kKargerSalt = 0x6b61726765725f73ULL;
}

double karger_probability(std::size_t n, double rho, double kappa, double c) {
  if (!(rho > 0) || rho > 1) throw std::invalid_argument("karger_probability: rho must lie in (0, 1]");
  if (!(kappa >= 1)) throw std::invalid_argument("karger_probability: kappa must be at least 1");
  if (!(c > 0)) throw std::invalid_argument("karger_probability: c must be positive");
  const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  return std::min(1.0, (12.0 * c + 24.0) * ln_n / (rho * rho * kappa));
}

std::vector<std::uint32_t> karger_sample(const Graph& g, std::span<const std::uint32_t> multiplicity, double p,
                                         std::uint64_t seed) {
  if (multiplicity.size() != g.m()) throw std::invalid_argument("karger_sample: one multiplicity per edge expected");
  std::vector<std::uint32_t> out(g.m(), 0);
  for (EdgeId e = 0; e < g.m(); ++e)
    for (std::uint32_t c = 0; c < multiplicity[e]; ++c)
      if (to_unit(mix64(seed, kKargerSalt, e, c)) < p) ++out[e];
  return out;
}

Graph family_skeleton(const CoveringFamily& fam, const Graph& g, std::size_t i) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (EdgeId e = 0; e < g.m(); ++e)
    if (fam.contains_dir(2 * e, i) || fam.contains_dir(2 * e + 1, i)) edges.emplace_back(g.edge(e).u, g.edge(e).v);
  return Graph(g.n(), std::move(edges));
}

Graph support(const Graph& g, std::span<const std::uint32_t> multiplicity) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (EdgeId e = 0; e < g.m(); ++e)
    if (multiplicity[e] > 0) edges.emplace_back(g.edge(e).u, g.edge(e).v);
  return Graph(g.n(), std::move(edges));
}

}  // namespace advcongest
