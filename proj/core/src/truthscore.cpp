#include "cicmb/truthscore.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cicmb/parallel.hpp"

namespace cicmb {

namespace {

// Frontier sweep shared by both schedules. Reusable across candidates: reset
// cost is proportional to the previously touched rows, not the graph.
struct SweepWorkspace {
  std::vector<double> values;     // node-major, width entries per node
  std::vector<double> prior_sum;  // per node: sum of entries for rounds < i
  std::vector<std::uint8_t> in_next;
  std::vector<std::uint8_t> in_touched;
  std::vector<NodeId> frontier;
  std::vector<NodeId> next;
  std::vector<NodeId> touched;
  NodeId n = 0;
  std::uint32_t width = 0;

  void prepare(NodeId node_count, std::uint32_t alpha) {
    n = node_count;
    width = alpha + 1;
    values.assign(static_cast<std::size_t>(n) * width, 0.0);
    prior_sum.assign(n, 0.0);
    in_next.assign(n, 0);
    in_touched.assign(n, 0);
  }

  // Clears only what the previous sweep dirtied.
  void reset(std::span<const NodeId> previous_sources) {
    for (NodeId u : touched) {
      std::fill_n(values.begin() + static_cast<std::size_t>(u) * width, width, 0.0);
      prior_sum[u] = 0.0;
      in_touched[u] = 0;
    }
    for (NodeId s : previous_sources) {
      std::fill_n(values.begin() + static_cast<std::size_t>(s) * width, width, 0.0);
      prior_sum[s] = 0.0;
      in_touched[s] = 0;
    }
    touched.clear();
  }

  // `blocked` nodes are never updated (used to keep rumor seeds out of truth
  // schedules); null means no exclusions.
  void run(const DirectedGraph& g, std::span<const NodeId> sources,
           const std::vector<double>& receiver_bias, std::uint32_t alpha, double theta,
           const std::vector<std::uint8_t>* blocked) {
    for (NodeId s : sources) values[static_cast<std::size_t>(s) * width] = 1.0;
    frontier.assign(sources.begin(), sources.end());
    std::sort(frontier.begin(), frontier.end());

    for (std::uint32_t i = 1; i <= alpha && !frontier.empty(); ++i) {
      next.clear();
      for (NodeId v : frontier) {
        const double pv = values[static_cast<std::size_t>(v) * width + (i - 1)];
        if (!(pv > theta)) continue;
        const auto nbrs = g.out_neighbors(v);
        const auto probs = g.out_probs(v);
        for (std::size_t e = 0; e < nbrs.size(); ++e) {
          const NodeId u = nbrs[e];
          if (blocked && (*blocked)[u]) continue;
          const double remaining = std::max(0.0, 1.0 - prior_sum[u]);
          double& cell = values[static_cast<std::size_t>(u) * width + i];
          cell += (1.0 - cell) * remaining * probs[e] * receiver_bias[u] * pv;
          if (!in_next[u]) {
            in_next[u] = 1;
            next.push_back(u);
          }
          if (!in_touched[u]) {
            in_touched[u] = 1;
            touched.push_back(u);
          }
        }
      }
      for (NodeId u : next) {
        prior_sum[u] += values[static_cast<std::size_t>(u) * width + i];
        in_next[u] = 0;
      }
      std::sort(next.begin(), next.end());
      frontier.swap(next);
    }
    std::sort(touched.begin(), touched.end());
  }

  ProbSchedule take_schedule(std::uint32_t alpha, ScheduleRole role) const {
    ProbSchedule s(n, alpha, role);
    for (NodeId u : touched)
      for (std::uint32_t i = 0; i < width; ++i)
        s.at(u, i) = values[static_cast<std::size_t>(u) * width + i];
    return s;
  }
};

void validate_sweep_args(const Dag& dag, const BiasTable& biases, std::uint32_t alpha,
                         double theta) {
  if (alpha == 0) throw std::invalid_argument("alpha must be at least 1");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be non-negative");
  biases.validate(dag.graph.node_count());
}

std::vector<std::uint8_t> flag_set(std::span<const NodeId> nodes, NodeId n, const char* label) {
  std::vector<std::uint8_t> flags(n, 0);
  for (NodeId v : nodes) {
    if (v >= n) throw std::invalid_argument(std::string(label) + " node out of range");
    if (flags[v]) throw std::invalid_argument(std::string(label) + " node repeated");
    flags[v] = 1;
  }
  return flags;
}

}  // namespace

MvalResult compute_mval(const Dag& dag, std::span<const NodeId> rumor_seeds,
                        const BiasTable& initial_biases, std::uint32_t alpha, double theta) {
  validate_sweep_args(dag, initial_biases, alpha, theta);
  if (rumor_seeds.empty()) throw std::invalid_argument("rumor seed set is empty");
  const NodeId n = dag.graph.node_count();
  flag_set(rumor_seeds, n, "rumor");

  SweepWorkspace ws;
  ws.prepare(n, alpha);
  ws.run(dag.graph, rumor_seeds, initial_biases.misinfo, alpha, theta, nullptr);
  ProbSchedule schedule = ws.take_schedule(alpha, ScheduleRole::Misinfo);
  for (NodeId r : rumor_seeds) schedule.at(r, 0) = 1.0;
  return MvalResult{std::move(schedule), std::move(ws.touched)};
}

TvalResult compute_tval(const Dag& dag, NodeId candidate, std::span<const NodeId> rumor_seeds,
                        const BiasTable& initial_biases, std::uint32_t alpha, double theta) {
  validate_sweep_args(dag, initial_biases, alpha, theta);
  const NodeId n = dag.graph.node_count();
  if (candidate >= n) throw std::invalid_argument("candidate out of range");
  auto blocked = flag_set(rumor_seeds, n, "rumor");
  if (blocked[candidate]) throw std::invalid_argument("candidate is a rumor seed");

  SweepWorkspace ws;
  ws.prepare(n, alpha);
  const NodeId sources[1] = {candidate};
  ws.run(dag.graph, sources, initial_biases.truth, alpha, theta, &blocked);
  ProbSchedule schedule = ws.take_schedule(alpha, ScheduleRole::Truth);
  schedule.at(candidate, 0) = 1.0;
  return TvalResult{std::move(schedule), std::move(ws.touched)};
}

double truth_score(const ProbSchedule& mval, std::span<const NodeId> a,
                   const ProbSchedule& tval, std::span<const NodeId> b) {
  if (mval.role() != ScheduleRole::Misinfo || tval.role() != ScheduleRole::Truth)
    throw std::invalid_argument("schedules passed in the wrong roles");
  if (mval.alpha() != tval.alpha())
    throw std::invalid_argument("schedules computed with different alpha");
  if (mval.node_count() != tval.node_count())
    throw std::invalid_argument("schedules cover different node counts");

  std::vector<NodeId> sa(a.begin(), a.end());
  std::vector<NodeId> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  double score = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa[i] < sb[j]) {
      ++i;
    } else if (sb[j] < sa[i]) {
      ++j;
    } else {
      const NodeId v = sa[i];
      for (std::uint32_t r = 1; r <= tval.alpha(); ++r) score += tval.at(v, r);
      ++i;
      ++j;
    }
  }
  return score;
}

std::vector<ScoredCandidate> select_top_k_truthscore(const Dag& dag,
                                                     std::span<const NodeId> rumor_seeds,
                                                     std::span<const NodeId> candidates,
                                                     std::uint32_t k,
                                                     const BiasTable& initial_biases,
                                                     std::uint32_t alpha, double theta,
                                                     unsigned jobs) {
  validate_sweep_args(dag, initial_biases, alpha, theta);
  if (k > candidates.size()) throw std::invalid_argument("k exceeds candidate pool size");
  const NodeId n = dag.graph.node_count();
  auto blocked = flag_set(rumor_seeds, n, "rumor");
  {
    std::vector<std::uint8_t> seen(n, 0);
    for (NodeId w : candidates) {
      if (w >= n) throw std::invalid_argument("candidate out of range");
      if (blocked[w]) throw std::invalid_argument("candidate pool overlaps rumor seeds");
      if (seen[w]) throw std::invalid_argument("candidate repeated");
      seen[w] = 1;
    }
  }

  const MvalResult m = compute_mval(dag, rumor_seeds, initial_biases, alpha, theta);
  std::vector<std::uint8_t> in_a(n, 0);
  for (NodeId v : m.touched) in_a[v] = 1;

  // Same recurrence as compute_tval, but scored in place against A so the
  // per-candidate schedule never needs materializing.
  std::vector<double> scores(candidates.size(), 0.0);
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, candidates.size()));
  std::vector<SweepWorkspace> spaces(workers);
  parallel_chunks(candidates.size(), workers, workers,
                  [&](std::size_t p, std::size_t begin, std::size_t end) {
                    SweepWorkspace& ws = spaces[p];
                    ws.prepare(n, alpha);
                    for (std::size_t c = begin; c < end; ++c) {
                      const NodeId w = candidates[c];
                      const NodeId sources[1] = {w};
                      ws.run(dag.graph, sources, initial_biases.truth, alpha, theta, &blocked);
                      double score = 0.0;
                      for (NodeId v : ws.touched) {
                        if (!in_a[v]) continue;
                        const double* row =
                            ws.values.data() + static_cast<std::size_t>(v) * ws.width;
                        for (std::uint32_t i = 1; i <= alpha; ++i) score += row[i];
                      }
                      scores[c] = score;
                      ws.reset(sources);
                    }
                  });

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scores[x] != scores[y]) return scores[x] > scores[y];
    return candidates[x] < candidates[y];
  });

  std::vector<ScoredCandidate> out;
  out.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i)
    out.push_back(ScoredCandidate{candidates[order[i]], scores[order[i]]});
  return out;
}

}  // namespace cicmb
