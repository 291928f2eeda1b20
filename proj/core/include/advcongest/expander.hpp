#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "advcongest/covering.hpp"
#include "advcongest/graph.hpp"

namespace advcongest {

// Sampling probability of Karger-style edge sampling on a multigraph with
// minimum degree kappa*rho: min(1, (12c+24) ln n / (rho^2 kappa)).
double karger_probability(std::size_t n, double rho, double kappa, double c);

// Keeps every parallel copy independently with probability p. Returns the
// sampled multiplicity per edge id.
std::vector<std::uint32_t> karger_sample(const Graph& g, std::span<const std::uint32_t> multiplicity, double p,
                                         std::uint64_t seed);

// Undirected skeleton of subgraph i: edges present in at least one direction.
Graph family_skeleton(const CoveringFamily& fam, const Graph& g, std::size_t i);

// Sampled multigraph as a simple graph (edges with positive multiplicity).
Graph support(const Graph& g, std::span<const std::uint32_t> multiplicity);

}  // namespace advcongest
