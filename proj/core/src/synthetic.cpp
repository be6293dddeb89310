#include "cicmb/synthetic.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "cicmb/rng.hpp"

namespace cicmb {

DirectedGraph preferential_attachment(NodeId nodes, unsigned edges_per_node,
                                      std::uint64_t seed) {
  if (nodes < 2 || edges_per_node == 0)
    throw std::invalid_argument("need at least 2 nodes and 1 edge per node");
  SeededRng rng(seed);

  // Sampling an element of `endpoints` is degree-proportional sampling: a
  // node appears once when created and once per incident edge.
  std::vector<NodeId> endpoints;
  endpoints.reserve(static_cast<std::size_t>(nodes) * (1 + 2 * edges_per_node));
  endpoints.push_back(0);

  std::unordered_set<std::uint64_t> present;
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(nodes) * edges_per_node);
  const auto pack = [](NodeId a, NodeId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };

  for (NodeId u = 1; u < nodes; ++u) {
    const unsigned want = std::min<unsigned>(edges_per_node, u);
    unsigned made = 0;
    for (unsigned attempt = 0; made < want && attempt < 32 * edges_per_node; ++attempt) {
      const NodeId t = endpoints[rng.below(endpoints.size())];
      if (t == u) continue;
      if (!present.insert(pack(u, t)).second) continue;
      edges.push_back(Edge{u, t, 1.0});
      endpoints.push_back(t);
      endpoints.push_back(u);
      ++made;
    }
    endpoints.push_back(u);
  }

  return DirectedGraph(nodes, std::move(edges));
}

DirectedGraph random_directed_gnm(NodeId nodes, std::size_t edges, std::uint64_t seed) {
  if (nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  const std::size_t max_edges =
      static_cast<std::size_t>(nodes) * (static_cast<std::size_t>(nodes) - 1);
  if (edges > max_edges) throw std::invalid_argument("edge count exceeds n*(n-1)");
  SeededRng rng(seed);

  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(edges * 2);
  std::vector<Edge> out;
  out.reserve(edges);
  while (out.size() < edges) {
    const NodeId a = static_cast<NodeId>(rng.below(nodes));
    const NodeId b = static_cast<NodeId>(rng.below(nodes));
    if (a == b) continue;
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (!chosen.insert(key).second) continue;
    out.push_back(Edge{a, b, 1.0});
  }

  return DirectedGraph(nodes, std::move(out));
}

DirectedGraph powerlaw_random_dag(NodeId nodes, std::size_t edges, double exponent,
                                  std::uint64_t seed) {
  if (nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  if (exponent < 0.0) throw std::invalid_argument("exponent must be non-negative");
  std::vector<double> weight(nodes);
  for (NodeId i = 0; i < nodes; ++i)
    weight[i] = std::pow(static_cast<double>(i) + 1.0, -exponent);
  double sum = 0.0, sum_sq = 0.0;
  for (double w : weight) {
    sum += w;
    sum_sq += w * w;
  }
  // sum over pairs i<j of w_i*w_j equals (sum^2 - sum_sq)/2.
  const double scale = 2.0 * static_cast<double>(edges) / (sum * sum - sum_sq);

  SeededRng rng(seed);
  std::vector<Edge> out;
  out.reserve(edges + edges / 8);
  for (NodeId i = 0; i + 1 < nodes; ++i)
    for (NodeId j = i + 1; j < nodes; ++j)
      if (rng.unit() < std::min(1.0, scale * weight[i] * weight[j]))
        out.push_back(Edge{j, i, 1.0});

  return DirectedGraph(nodes, std::move(out));
}

}  // namespace cicmb
