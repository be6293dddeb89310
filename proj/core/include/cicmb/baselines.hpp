#pragma once

#include <span>
#include <vector>

#include "cicmb/graph.hpp"
#include "cicmb/propagation.hpp"
#include "cicmb/truthscore.hpp"

namespace cicmb {

// Ranks candidates by influence reduction: the drop in the Monte-Carlo mean
// count of misinformed nodes when the candidate is removed from the graph.
// All estimates share one set of run seeds (common random numbers) so the
// differences are paired; sampling noise that would push a reduction
// negative is clamped at 0. Returns the k best, ties by ascending id.
std::vector<ScoredCandidate> tmb_select(const DirectedGraph& g,
                                        std::span<const NodeId> rumor_seeds,
                                        std::span<const NodeId> candidates, std::uint32_t k,
                                        const BiasTable& biases, BiasRule rule,
                                        std::uint32_t alpha, std::uint32_t runs,
                                        std::uint64_t seed, unsigned jobs = 1);

// Two-phase mitigation ranking. Phase 1 estimates the vulnerable set: nodes
// outside R that end misinformed in any of `samples` misinformation-only
// runs. Phase 2 scores each candidate by the mean number of vulnerable nodes
// its solo cascade reaches within alpha with every bias pinned at 1 — the
// ranking is raw reach and deliberately blind to user receptivity — reusing
// one set of run seeds across candidates. Returns the k best, ties by
// ascending id.
std::vector<ScoredCandidate> tib_select(const DirectedGraph& g,
                                        std::span<const NodeId> rumor_seeds,
                                        std::span<const NodeId> candidates, std::uint32_t k,
                                        const BiasTable& biases, std::uint32_t alpha,
                                        std::uint32_t samples, std::uint64_t seed,
                                        unsigned jobs = 1);

// Uniform control: k distinct candidates drawn without replacement.
std::vector<ScoredCandidate> random_select(std::span<const NodeId> candidates, std::uint32_t k,
                                           std::uint64_t seed);

}  // namespace cicmb
