#include "cicmb/propagation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cicmb/parallel.hpp"

namespace cicmb {

char state_char(NodeState s) {
  switch (s) {
    case NodeState::Neutral: return 'N';
    case NodeState::Misinfo: return 'M';
    case NodeState::Truth: return 'T';
  }
  return '?';
}

BiasTable BiasTable::filled(NodeId n, double misinfo_value, double truth_value) {
  return BiasTable{std::vector<double>(n, misinfo_value), std::vector<double>(n, truth_value)};
}

void BiasTable::validate(NodeId n) const {
  if (misinfo.size() != n || truth.size() != n)
    throw std::invalid_argument("bias table size does not match node count");
  for (double b : misinfo)
    if (!(b >= 0.0) || b > 1.0) throw std::invalid_argument("misinfo bias outside [0, 1]");
  for (double b : truth)
    if (!(b >= 0.0) || b > 1.0) throw std::invalid_argument("truth bias outside [0, 1]");
}

BiasRule bias_rule_from_name(std::string_view name) {
  if (name == "linear") return BiasRule::LinearHalving;
  if (name == "quadratic") return BiasRule::Quadratic;
  throw std::invalid_argument("unknown bias rule: " + std::string(name));
}

std::string_view bias_rule_name(BiasRule rule) {
  return rule == BiasRule::LinearHalving ? "linear" : "quadratic";
}

double apply_bias_rule(BiasRule rule, double opposing_bias) {
  return rule == BiasRule::LinearHalving ? opposing_bias / 2.0 : opposing_bias * opposing_bias;
}

std::size_t CascadeResult::count(NodeState s) const {
  return static_cast<std::size_t>(std::count(final_state.begin(), final_state.end(), s));
}

namespace {

// Validates a seed set and marks it in `seed_flag`; ids must be in range and
// not yet flagged (catches both duplicates and overlap between camps).
void mark_seeds(std::span<const NodeId> seeds, NodeId n, std::vector<std::uint8_t>& seed_flag,
                const char* label) {
  for (NodeId v : seeds) {
    if (v >= n) throw std::invalid_argument(std::string(label) + " seed out of range");
    if (seed_flag[v])
      throw std::invalid_argument(std::string(label) + " seed repeated or in both camps");
    seed_flag[v] = 1;
  }
}

}  // namespace

CascadeResult run_cicmb(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                        std::span<const NodeId> truth_seeds, const BiasTable& biases,
                        BiasRule rule, std::uint32_t alpha, std::uint64_t seed) {
  const NodeId n = g.node_count();
  if (alpha == 0) throw std::invalid_argument("alpha must be at least 1");
  biases.validate(n);

  std::vector<std::uint8_t> is_seed(n, 0);
  mark_seeds(rumor_seeds, n, is_seed, "rumor");
  mark_seeds(truth_seeds, n, is_seed, "truth");

  CascadeResult result;
  result.final_state.assign(n, NodeState::Neutral);
  result.final_biases = biases;
  std::vector<double>& bias_m = result.final_biases.misinfo;
  std::vector<double>& bias_t = result.final_biases.truth;
  std::vector<NodeState>& state = result.final_state;

  std::vector<NodeId> frontier;
  frontier.reserve(rumor_seeds.size() + truth_seeds.size());
  for (NodeId v : rumor_seeds) {
    state[v] = NodeState::Misinfo;
    frontier.push_back(v);
  }
  for (NodeId v : truth_seeds) {
    state[v] = NodeState::Truth;
    frontier.push_back(v);
  }
  std::sort(frontier.begin(), frontier.end());
  for (NodeId v : frontier) result.activation_log.push_back({0, v, state[v]});

  // hit[v]: bit 0 set when misinfo succeeded on v this round, bit 1 truth.
  std::vector<std::uint8_t> hit(n, 0);
  std::vector<NodeId> touched;
  std::vector<NodeId> next;

  for (std::uint32_t t = 1; t <= alpha; ++t) {
    if (frontier.empty()) break;
    result.iterations_run = t;
    touched.clear();

    for (NodeId u : frontier) {
      const NodeState camp = state[u];
      const Camp coin_camp = camp == NodeState::Misinfo ? Camp::Misinfo : Camp::Truth;
      const auto nbrs = g.out_neighbors(u);
      const auto probs = g.out_probs(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const NodeId v = nbrs[i];
        if (state[v] == camp || is_seed[v]) continue;
        const double receptivity =
            camp == NodeState::Misinfo ? bias_m[v] : bias_t[v];
        if (attempt_coin(seed, u, v, t, coin_camp) < probs[i] * receptivity) {
          if (hit[v] == 0) touched.push_back(v);
          hit[v] |= camp == NodeState::Misinfo ? 1 : 2;
        }
      }
    }

    // State, bias and frontier changes all land after every attempt in the
    // round has been judged against the start-of-round snapshot.
    std::sort(touched.begin(), touched.end());
    next.clear();
    for (NodeId v : touched) {
      NodeState adopted;
      switch (hit[v]) {
        case 1: adopted = NodeState::Misinfo; break;
        case 2: adopted = NodeState::Truth; break;
        default:
          adopted = tie_coin(seed, v, t) < 0.5 ? NodeState::Misinfo : NodeState::Truth;
          break;
      }
      hit[v] = 0;
      state[v] = adopted;
      if (adopted == NodeState::Misinfo)
        bias_t[v] = apply_bias_rule(rule, bias_t[v]);
      else
        bias_m[v] = apply_bias_rule(rule, bias_m[v]);
      result.activation_log.push_back({t, v, adopted});
      next.push_back(v);
    }

    if (next.empty()) break;
    frontier.swap(next);
  }

  return result;
}

double StateFrequencies::mean_count(NodeState s) const {
  double sum = 0.0;
  for (const auto& row : freq) sum += row[static_cast<std::size_t>(s)];
  return sum;
}

StateFrequencies monte_carlo_states(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                                    std::span<const NodeId> truth_seeds, const BiasTable& biases,
                                    BiasRule rule, std::uint32_t alpha, std::uint32_t runs,
                                    std::uint64_t seed, unsigned jobs) {
  if (runs == 0) throw std::invalid_argument("runs must be at least 1");
  const NodeId n = g.node_count();
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, runs));

  std::vector<std::vector<std::array<std::uint32_t, 3>>> counts(
      workers, std::vector<std::array<std::uint32_t, 3>>(n, {0, 0, 0}));
  parallel_chunks(runs, workers, workers, [&](std::size_t p, std::size_t b, std::size_t e) {
    auto& mine = counts[p];
    for (std::size_t r = b; r < e; ++r) {
      const CascadeResult res =
          run_cicmb(g, rumor_seeds, truth_seeds, biases, rule, alpha, seed + r);
      for (NodeId v = 0; v < n; ++v)
        ++mine[v][static_cast<std::size_t>(res.final_state[v])];
    }
  });

  StateFrequencies out;
  out.freq.assign(n, {0.0, 0.0, 0.0});
  for (unsigned p = 0; p < workers; ++p)
    for (NodeId v = 0; v < n; ++v)
      for (int s = 0; s < 3; ++s) out.freq[v][s] += counts[p][v][s];
  const double inv = 1.0 / static_cast<double>(runs);
  for (NodeId v = 0; v < n; ++v)
    for (int s = 0; s < 3; ++s) out.freq[v][s] *= inv;
  return out;
}

}  // namespace cicmb
