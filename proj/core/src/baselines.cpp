#include "cicmb/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cicmb/parallel.hpp"
#include "cicmb/rng.hpp"

namespace cicmb {

namespace {

void validate_pool(std::span<const NodeId> candidates, std::uint32_t k, NodeId n) {
  if (k > candidates.size()) throw std::invalid_argument("k exceeds candidate pool size");
  std::vector<std::uint8_t> seen(n, 0);
  for (NodeId w : candidates) {
    if (w >= n) throw std::invalid_argument("candidate out of range");
    if (seen[w]) throw std::invalid_argument("candidate repeated");
    seen[w] = 1;
  }
}

std::vector<ScoredCandidate> top_k(std::span<const NodeId> candidates,
                                   const std::vector<double>& scores, std::uint32_t k) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return candidates[a] < candidates[b];
  });
  std::vector<ScoredCandidate> out;
  out.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i)
    out.push_back(ScoredCandidate{candidates[order[i]], scores[order[i]]});
  return out;
}

// Total misinformed-node count over `runs` misinformation-only cascades with
// run seeds seed+0..seed+runs-1. An integer, so estimates subtract exactly.
std::uint64_t total_misinformed(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                                const BiasTable& biases, BiasRule rule, std::uint32_t alpha,
                                std::uint32_t runs, std::uint64_t seed) {
  std::uint64_t total = 0;
  for (std::uint32_t r = 0; r < runs; ++r) {
    const CascadeResult res = run_cicmb(g, rumor_seeds, {}, biases, rule, alpha, seed + r);
    total += res.count(NodeState::Misinfo);
  }
  return total;
}

}  // namespace

std::vector<ScoredCandidate> tmb_select(const DirectedGraph& g,
                                        std::span<const NodeId> rumor_seeds,
                                        std::span<const NodeId> candidates, std::uint32_t k,
                                        const BiasTable& biases, BiasRule rule,
                                        std::uint32_t alpha, std::uint32_t runs,
                                        std::uint64_t seed, unsigned jobs) {
  if (runs == 0) throw std::invalid_argument("runs must be at least 1");
  validate_pool(candidates, k, g.node_count());

  const std::uint64_t baseline =
      total_misinformed(g, rumor_seeds, biases, rule, alpha, runs, seed);

  std::vector<double> reduction(candidates.size(), 0.0);
  parallel_for(candidates.size(), jobs, [&](std::size_t c) {
    const DirectedGraph pruned = g.without_node(candidates[c]);
    const std::uint64_t with_removed =
        total_misinformed(pruned, rumor_seeds, biases, rule, alpha, runs, seed);
    const std::uint64_t saved = baseline > with_removed ? baseline - with_removed : 0;
    reduction[c] = static_cast<double>(saved) / static_cast<double>(runs);
  });

  return top_k(candidates, reduction, k);
}

std::vector<ScoredCandidate> tib_select(const DirectedGraph& g,
                                        std::span<const NodeId> rumor_seeds,
                                        std::span<const NodeId> candidates, std::uint32_t k,
                                        const BiasTable& biases, std::uint32_t alpha,
                                        std::uint32_t samples, std::uint64_t seed,
                                        unsigned jobs) {
  if (samples == 0) throw std::invalid_argument("samples must be at least 1");
  const NodeId n = g.node_count();
  validate_pool(candidates, k, n);

  std::vector<std::uint8_t> is_rumor(n, 0);
  for (NodeId r : rumor_seeds) is_rumor[r] = 1;

  // Phase 1: any node misinformed at least once, rumor seeds excluded (they
  // are stubborn, not vulnerable).
  std::vector<std::uint8_t> vulnerable(n, 0);
  const std::uint64_t estimate_seed = derive_seed(seed, SeedStream::TibEstimate);
  for (std::uint32_t r = 0; r < samples; ++r) {
    const CascadeResult res =
        run_cicmb(g, rumor_seeds, {}, biases, BiasRule::LinearHalving, alpha, estimate_seed + r);
    for (NodeId v = 0; v < n; ++v)
      if (res.final_state[v] == NodeState::Misinfo && !is_rumor[v]) vulnerable[v] = 1;
  }

  // Phase 2: the candidate's raw reach into the vulnerable set. The method
  // ranks mitigators by reachable-node counts alone, so these cascades run
  // on edge probabilities with every bias pinned at 1; user receptivity is
  // deliberately invisible to the ranking. The bias rule is irrelevant
  // because a one-sided cascade never reads the opposing bias it decays.
  const std::uint64_t power_seed = derive_seed(seed, SeedStream::TibPower);
  const BiasTable unit = BiasTable::filled(n, 1.0, 1.0);
  std::vector<double> power(candidates.size(), 0.0);
  parallel_for(candidates.size(), jobs, [&](std::size_t c) {
    const NodeId w = candidates[c];
    const NodeId truth_seeds[1] = {w};
    std::uint64_t reached = 0;
    for (std::uint32_t r = 0; r < samples; ++r) {
      const CascadeResult res = run_cicmb(g, {}, truth_seeds, unit, BiasRule::LinearHalving,
                                          alpha, power_seed + r);
      for (NodeId v = 0; v < n; ++v)
        if (vulnerable[v] && res.final_state[v] == NodeState::Truth) ++reached;
    }
    power[c] = static_cast<double>(reached) / static_cast<double>(samples);
  });

  return top_k(candidates, power, k);
}

std::vector<ScoredCandidate> random_select(std::span<const NodeId> candidates, std::uint32_t k,
                                           std::uint64_t seed) {
  if (k > candidates.size()) throw std::invalid_argument("k exceeds candidate pool size");
  std::vector<NodeId> pool(candidates.begin(), candidates.end());
  SeededRng rng(seed);
  std::vector<ScoredCandidate> out;
  out.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    out.push_back(ScoredCandidate{pool[i], 0.0});
  }
  return out;
}

}  // namespace cicmb
