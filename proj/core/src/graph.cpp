#include "cicmb/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <unordered_set>

#include "cicmb/parallel.hpp"
#include "cicmb/rng.hpp"

namespace cicmb {

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
    return splitmix64(splitmix64(p.first) ^ p.second);
  }
};

}  // namespace

DirectedGraph::DirectedGraph(NodeId node_count, std::vector<Edge> edges,
                             std::vector<std::uint64_t> original_ids)
    : node_count_(node_count) {
  if (!original_ids.empty() && original_ids.size() != node_count)
    throw std::invalid_argument("original id table size does not match node count");
  for (const Edge& e : edges) {
    if (e.src >= node_count || e.dst >= node_count)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.src == e.dst) throw std::invalid_argument("self loop not allowed");
    if (!(e.prob > 0.0) || e.prob > 1.0)
      throw std::invalid_argument("edge probability outside (0, 1]");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i - 1].src == edges[i].src && edges[i - 1].dst == edges[i].dst)
      throw std::invalid_argument("duplicate edge");
  }

  const std::size_t m = edges.size();
  edge_src_.resize(m);
  edge_dst_.resize(m);
  edge_prob_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    edge_src_[i] = edges[i].src;
    edge_dst_[i] = edges[i].dst;
    edge_prob_[i] = edges[i].prob;
  }

  out_offsets_.assign(node_count_ + 1, 0);
  for (std::size_t i = 0; i < m; ++i) ++out_offsets_[edge_src_[i] + 1];
  for (NodeId u = 0; u < node_count_; ++u) out_offsets_[u + 1] += out_offsets_[u];

  in_offsets_.assign(node_count_ + 1, 0);
  for (std::size_t i = 0; i < m; ++i) ++in_offsets_[edge_dst_[i] + 1];
  for (NodeId u = 0; u < node_count_; ++u) in_offsets_[u + 1] += in_offsets_[u];
  in_edge_ids_.resize(m);
  std::vector<std::uint32_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::uint32_t i = 0; i < m; ++i) in_edge_ids_[cursor[edge_dst_[i]]++] = i;

  if (original_ids.empty()) {
    original_ids_.resize(node_count_);
    std::iota(original_ids_.begin(), original_ids_.end(), 0ull);
  } else {
    original_ids_ = std::move(original_ids);
  }
  dense_by_original_.reserve(node_count_);
  for (NodeId u = 0; u < node_count_; ++u) {
    if (!dense_by_original_.emplace(original_ids_[u], u).second)
      throw std::invalid_argument("original ids must be distinct");
  }
}

std::vector<Edge> DirectedGraph::edges() const {
  std::vector<Edge> out(edge_count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = Edge{edge_src_[i], edge_dst_[i], edge_prob_[i]};
  return out;
}

std::optional<NodeId> DirectedGraph::dense_id(std::uint64_t original) const {
  const auto it = dense_by_original_.find(original);
  if (it == dense_by_original_.end()) return std::nullopt;
  return it->second;
}

DirectedGraph DirectedGraph::without_node(NodeId v) const {
  if (v >= node_count_) throw std::invalid_argument("node out of range");
  std::vector<Edge> kept;
  kept.reserve(edge_count());
  for (std::size_t i = 0; i < edge_count(); ++i) {
    if (edge_src_[i] == v || edge_dst_[i] == v) continue;
    kept.push_back(Edge{edge_src_[i], edge_dst_[i], edge_prob_[i]});
  }
  return DirectedGraph(node_count_, std::move(kept), original_ids_);
}

DirectedGraph DirectedGraph::with_probs(std::vector<double> probs) const {
  if (probs.size() != edge_count())
    throw std::invalid_argument("probability table size does not match edge count");
  std::vector<Edge> replaced(edge_count());
  for (std::size_t i = 0; i < replaced.size(); ++i)
    replaced[i] = Edge{edge_src_[i], edge_dst_[i], probs[i]};
  return DirectedGraph(node_count_, std::move(replaced), original_ids_);
}

LoadResult load_edge_list(std::istream& in, bool directed) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::vector<std::uint64_t> seen_ids;
  LoadStats stats;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#' || line[pos] == '%') continue;

    std::uint64_t ids[2];
    for (int t = 0; t < 2; ++t) {
      pos = line.find_first_not_of(" \t\r", pos);
      if (pos == std::string::npos)
        throw ParseError(line_no, "expected two integer ids");
      std::size_t end = line.find_first_of(" \t\r", pos);
      if (end == std::string::npos) end = line.size();
      const auto res = std::from_chars(line.data() + pos, line.data() + end, ids[t]);
      if (res.ec != std::errc{} || res.ptr != line.data() + end)
        throw ParseError(line_no, "invalid node id '" + line.substr(pos, end - pos) + "'");
      pos = end;
    }

    seen_ids.push_back(ids[0]);
    seen_ids.push_back(ids[1]);
    if (ids[0] == ids[1]) {
      ++stats.self_loops_dropped;
      continue;
    }
    pairs.emplace_back(ids[0], ids[1]);
    if (!directed) pairs.emplace_back(ids[1], ids[0]);
  }

  std::sort(seen_ids.begin(), seen_ids.end());
  seen_ids.erase(std::unique(seen_ids.begin(), seen_ids.end()), seen_ids.end());
  if (seen_ids.size() > static_cast<std::size_t>(std::numeric_limits<NodeId>::max()))
    throw std::invalid_argument("too many nodes");
  std::unordered_map<std::uint64_t, NodeId> dense;
  dense.reserve(seen_ids.size());
  for (NodeId u = 0; u < seen_ids.size(); ++u) dense.emplace(seen_ids[u], u);

  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, PairHash> unique_pairs;
  unique_pairs.reserve(pairs.size());
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!unique_pairs.insert(p).second) {
      ++stats.duplicates_dropped;
      continue;
    }
    edges.push_back(Edge{dense.at(p.first), dense.at(p.second), 1.0});
  }

  const NodeId node_count = static_cast<NodeId>(seen_ids.size());
  return LoadResult{DirectedGraph(node_count, std::move(edges), std::move(seen_ids)), stats};
}

LoadResult load_edge_list_file(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return load_edge_list(in, directed);
}

void serialize_edge_list(const DirectedGraph& g, std::ostream& out) {
  std::vector<std::uint8_t> has_edge(g.node_count(), 0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    auto nbrs = g.out_neighbors(u);
    if (!nbrs.empty()) has_edge[u] = 1;
    for (NodeId v : nbrs) {
      has_edge[v] = 1;
      out << g.original_id(u) << ' ' << g.original_id(v) << '\n';
    }
  }
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (!has_edge[u]) out << g.original_id(u) << ' ' << g.original_id(u) << '\n';
}

DirectedGraph assign_edge_probabilities(const DirectedGraph& g, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> probs(g.edge_count());
  for (double& p : probs) p = rng.open_unit();
  return g.with_probs(std::move(probs));
}

Dag build_dag(const DirectedGraph& g) {
  const NodeId n = g.node_count();
  enum : std::uint8_t { White = 0, Gray = 1, Black = 2 };
  std::vector<std::uint8_t> color(n, White);
  std::vector<Edge> kept;
  kept.reserve(g.edge_count());
  std::vector<std::pair<NodeId, NodeId>> removed;

  struct Frame {
    NodeId node;
    std::uint32_t next;
  };
  std::vector<Frame> stack;

  for (NodeId root = 0; root < n; ++root) {
    if (color[root] != White) continue;
    color[root] = Gray;
    stack.push_back(Frame{root, 0});
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto nbrs = g.out_neighbors(top.node);
      if (top.next >= nbrs.size()) {
        color[top.node] = Black;
        stack.pop_back();
        continue;
      }
      const NodeId parent = top.node;
      const NodeId child = nbrs[top.next];
      const double p = g.out_probs(parent)[top.next];
      ++top.next;
      if (color[child] == Gray) {
        removed.emplace_back(parent, child);
        continue;
      }
      kept.push_back(Edge{parent, child, p});
      if (color[child] == White) {
        color[child] = Gray;
        stack.push_back(Frame{child, 0});
      }
    }
  }

  std::vector<std::uint64_t> ids(g.original_ids().begin(), g.original_ids().end());
  return Dag{DirectedGraph(n, std::move(kept), std::move(ids)), std::move(removed)};
}

std::optional<std::vector<NodeId>> topological_order(const DirectedGraph& g) {
  const NodeId n = g.node_count();
  std::vector<std::uint32_t> indeg(n);
  for (NodeId v = 0; v < n; ++v) indeg[v] = static_cast<std::uint32_t>(g.in_degree(v));
  std::vector<NodeId> order;
  order.reserve(n);
  std::queue<NodeId> ready;
  for (NodeId v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  while (!ready.empty()) {
    const NodeId u = ready.front();
    ready.pop();
    order.push_back(u);
    for (NodeId v : g.out_neighbors(u))
      if (--indeg[v] == 0) ready.push(v);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

namespace {

// Undirected adjacency as CSR, deduplicated and sorted per node.
struct UndirectedView {
  std::vector<std::uint32_t> offsets;
  std::vector<NodeId> nbrs;

  explicit UndirectedView(const DirectedGraph& g) {
    const NodeId n = g.node_count();
    std::vector<std::vector<NodeId>> adj(n);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v : g.out_neighbors(u)) {
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
    }
    offsets.assign(n + 1, 0);
    for (NodeId u = 0; u < n; ++u) {
      auto& a = adj[u];
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
      offsets[u + 1] = offsets[u] + static_cast<std::uint32_t>(a.size());
    }
    nbrs.resize(offsets[n]);
    for (NodeId u = 0; u < n; ++u)
      std::copy(adj[u].begin(), adj[u].end(), nbrs.begin() + offsets[u]);
  }

  std::span<const NodeId> operator[](NodeId u) const {
    return {nbrs.data() + offsets[u], nbrs.data() + offsets[u + 1]};
  }
};

struct BfsScratch {
  std::vector<std::int32_t> dist;
  std::vector<NodeId> queue;

  explicit BfsScratch(NodeId n) : dist(n, -1) { queue.reserve(n); }

  // Returns (eccentricity, farthest node with the lowest id).
  std::pair<unsigned, NodeId> run(const UndirectedView& adj, NodeId start) {
    queue.clear();
    queue.push_back(start);
    dist[start] = 0;
    unsigned ecc = 0;
    NodeId farthest = start;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      const unsigned du = static_cast<unsigned>(dist[u]);
      if (du > ecc) {
        ecc = du;
        farthest = u;
      }
      for (NodeId v : adj[u]) {
        if (dist[v] >= 0) continue;
        dist[v] = static_cast<std::int32_t>(du + 1);
        queue.push_back(v);
      }
    }
    for (NodeId u : queue) dist[u] = -1;
    return {ecc, farthest};
  }
};

}  // namespace

unsigned undirected_diameter(const DirectedGraph& g, DiameterOptions opts) {
  const NodeId n = g.node_count();
  if (n == 0) throw std::invalid_argument("diameter of an empty graph");
  UndirectedView adj(g);

  // Largest connected component, lowest root on ties.
  std::vector<std::int32_t> comp(n, -1);
  std::vector<NodeId> stack;
  std::vector<std::size_t> comp_size;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const std::int32_t c = static_cast<std::int32_t>(comp_size.size());
    comp[s] = c;
    std::size_t size = 0;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId v : adj[u]) {
        if (comp[v] >= 0) continue;
        comp[v] = c;
        stack.push_back(v);
      }
    }
    comp_size.push_back(size);
  }
  std::int32_t best_comp = 0;
  for (std::size_t c = 1; c < comp_size.size(); ++c)
    if (comp_size[c] > comp_size[static_cast<std::size_t>(best_comp)])
      best_comp = static_cast<std::int32_t>(c);
  std::vector<NodeId> members;
  members.reserve(comp_size[static_cast<std::size_t>(best_comp)]);
  for (NodeId u = 0; u < n; ++u)
    if (comp[u] == best_comp) members.push_back(u);

  if (members.size() <= 1) return 0;

  if (members.size() <= opts.exact_threshold) {
    const unsigned jobs = opts.jobs == 0 ? 1 : opts.jobs;
    std::vector<unsigned> partial(jobs, 0);
    parallel_chunks(members.size(), jobs, jobs, [&](std::size_t p, std::size_t b, std::size_t e) {
      BfsScratch scratch(n);
      unsigned best = 0;
      for (std::size_t i = b; i < e; ++i)
        best = std::max(best, scratch.run(adj, members[i]).first);
      partial[p] = best;
    });
    unsigned diameter = 0;
    for (unsigned d : partial) diameter = std::max(diameter, d);
    return diameter;
  }

  // Lower bound: double sweeps from the highest-degree members.
  std::vector<NodeId> starts = members;
  std::stable_sort(starts.begin(), starts.end(), [&](NodeId a, NodeId b) {
    const std::size_t da = adj[a].size();
    const std::size_t db = adj[b].size();
    return da != db ? da > db : a < b;
  });
  const std::size_t sweeps = std::min<std::size_t>(
      starts.size(), static_cast<std::size_t>(std::max(opts.sweeps, 1)));
  BfsScratch scratch(n);
  unsigned bound = 0;
  for (std::size_t i = 0; i < sweeps; ++i) {
    const auto [ecc, far] = scratch.run(adj, starts[i]);
    bound = std::max(bound, ecc);
    bound = std::max(bound, scratch.run(adj, far).first);
  }
  return bound;
}

}  // namespace cicmb
