#pragma once

#include <cstdint>

#include "cicmb/graph.hpp"

namespace cicmb {

// Preferential-attachment graph: nodes arrive one at a time and link to
// `edges_per_node` distinct existing nodes sampled proportionally to degree.
// Links point from the newcomer to its older targets, so the graph is acyclic
// and descending id order is a topological order. All edge probabilities are
// 1 until assigned.
DirectedGraph preferential_attachment(NodeId nodes, unsigned edges_per_node,
                                      std::uint64_t seed);

// Uniform directed G(n, m): m distinct non-loop ordered pairs.
DirectedGraph random_directed_gnm(NodeId nodes, std::size_t edges, std::uint64_t seed);

// Random acyclic digraph with heavy-tailed in-degrees: node i carries weight
// (i+1)^-exponent and each pair i < j holds the edge j -> i independently
// with probability min(1, c*w_i*w_j), with c calibrated so the expected edge
// count equals `edges`. Low ids act as hubs that later nodes feed into.
DirectedGraph powerlaw_random_dag(NodeId nodes, std::size_t edges, double exponent,
                                  std::uint64_t seed);

}  // namespace cicmb
