#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cicmb {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src{};
  NodeId dst{};
  double prob{1.0};

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable directed graph over dense ids 0..n-1 with CSR adjacency in both
// directions. Edges are stored sorted by (src, dst); every accessor that
// yields an edge sequence follows that canonical order. Safe for concurrent
// reads once constructed.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  // Edges may arrive in any order. Throws std::invalid_argument on self
  // loops, duplicate (src, dst) pairs, endpoints >= node_count, or
  // probabilities outside (0, 1]. `original_ids` maps dense ids back to the
  // dataset's labels; empty means the identity mapping.
  DirectedGraph(NodeId node_count, std::vector<Edge> edges,
                std::vector<std::uint64_t> original_ids = {});

  NodeId node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edge_dst_.size(); }

  std::span<const NodeId> out_neighbors(NodeId u) const {
    return {edge_dst_.data() + out_offsets_[u], edge_dst_.data() + out_offsets_[u + 1]};
  }
  std::span<const double> out_probs(NodeId u) const {
    return {edge_prob_.data() + out_offsets_[u], edge_prob_.data() + out_offsets_[u + 1]};
  }
  // Indexes into the canonical edge arrays for edges entering v, ascending
  // by source.
  std::span<const std::uint32_t> in_edge_ids(NodeId v) const {
    return {in_edge_ids_.data() + in_offsets_[v], in_edge_ids_.data() + in_offsets_[v + 1]};
  }

  NodeId edge_src(std::uint32_t edge_id) const { return edge_src_[edge_id]; }
  NodeId edge_dst(std::uint32_t edge_id) const { return edge_dst_[edge_id]; }
  double edge_prob(std::uint32_t edge_id) const { return edge_prob_[edge_id]; }

  std::size_t out_degree(NodeId u) const { return out_offsets_[u + 1] - out_offsets_[u]; }
  std::size_t in_degree(NodeId v) const { return in_offsets_[v + 1] - in_offsets_[v]; }

  std::vector<Edge> edges() const;

  // Dense ids are assigned by ascending original id, so a graph whose labels
  // are already 0..n-1 keeps them verbatim.
  std::uint64_t original_id(NodeId u) const { return original_ids_[u]; }
  std::span<const std::uint64_t> original_ids() const { return original_ids_; }
  std::optional<NodeId> dense_id(std::uint64_t original) const;

  // Copy with the same node set and probabilities but v isolated.
  DirectedGraph without_node(NodeId v) const;

  // Copy with per-edge probabilities replaced, given in canonical edge order.
  DirectedGraph with_probs(std::vector<double> probs) const;

 private:
  NodeId node_count_ = 0;
  std::vector<NodeId> edge_src_;
  std::vector<NodeId> edge_dst_;
  std::vector<double> edge_prob_;
  std::vector<std::uint32_t> out_offsets_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<std::uint32_t> in_edge_ids_;
  std::vector<std::uint64_t> original_ids_;
  std::unordered_map<std::uint64_t, NodeId> dense_by_original_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct LoadStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

struct LoadResult {
  DirectedGraph graph;
  LoadStats stats;
};

// Reads one "src dst" pair per line. Lines starting with '#' or '%' and
// blank lines are ignored; tokens beyond the first two are tolerated (many
// public datasets carry timestamps or weights). With directed=false each
// pair contributes both directions. Self loops register the node, are then
// dropped and counted; repeated pairs keep the first occurrence. A data line
// with fewer than two integer tokens throws ParseError with its 1-based line
// number.
LoadResult load_edge_list(std::istream& in, bool directed = true);
LoadResult load_edge_list_file(const std::string& path, bool directed = true);

// Writes edges as original-id pairs in canonical order, one per line.
// Isolated nodes are emitted as self loops so that load_edge_list
// reconstructs the exact same graph.
void serialize_edge_list(const DirectedGraph& g, std::ostream& out);

// Fresh copy with every edge probability drawn uniformly from (0, 1] in
// canonical edge order. Same seed, same graph: identical probabilities.
DirectedGraph assign_edge_probabilities(const DirectedGraph& g, std::uint64_t seed);

struct Dag {
  DirectedGraph graph;
  std::vector<std::pair<NodeId, NodeId>> removed_edges;
};

// Deterministic cycle removal: depth-first search rooted at every node in
// ascending id order, children scanned ascending, and every back edge (to a
// node on the current DFS path) dropped. Probabilities are preserved.
Dag build_dag(const DirectedGraph& g);

// Kahn's algorithm; nullopt when the graph has a cycle.
std::optional<std::vector<NodeId>> topological_order(const DirectedGraph& g);

struct DiameterOptions {
  // Largest-component size up to which the diameter is computed exactly by
  // all-pairs BFS; above it a repeated double-sweep lower bound is used.
  NodeId exact_threshold = 50000;
  int sweeps = 20;
  unsigned jobs = 1;
};

// Diameter of the largest connected component of the undirected projection.
unsigned undirected_diameter(const DirectedGraph& g, DiameterOptions opts = {});

}  // namespace cicmb
