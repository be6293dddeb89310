#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "cicmb/graph.hpp"
#include "cicmb/rng.hpp"

namespace cicmb {

enum class NodeState : std::uint8_t { Neutral = 0, Misinfo = 1, Truth = 2 };

char state_char(NodeState s);

// Per-node susceptibilities in [0, 1]: misinfo[v] scales attacks by the
// misinformation camp on v, truth[v] scales attacks by the truth camp.
struct BiasTable {
  std::vector<double> misinfo;
  std::vector<double> truth;

  static BiasTable filled(NodeId n, double misinfo_value, double truth_value);
  void validate(NodeId n) const;
};

enum class BiasRule : std::uint8_t { LinearHalving = 0, Quadratic = 1 };

BiasRule bias_rule_from_name(std::string_view name);  // "linear" | "quadratic"
std::string_view bias_rule_name(BiasRule rule);

// Decay of the opposing side's bias when a node adopts a state. The adopted
// side's bias is left unchanged by the caller.
double apply_bias_rule(BiasRule rule, double opposing_bias);

struct ActivationEvent {
  std::uint32_t round;
  NodeId node;
  NodeState state;

  friend bool operator==(const ActivationEvent&, const ActivationEvent&) = default;
};

struct CascadeResult {
  std::vector<NodeState> final_state;
  // Every adoption in order: by round, ascending node id within a round.
  // Round 0 holds the seeds. A node that switched camps appears once per
  // adoption.
  std::vector<ActivationEvent> activation_log;
  // Rounds actually executed, counting a final quiet round if one ran.
  std::uint32_t iterations_run = 0;
  BiasTable final_biases;

  std::size_t count(NodeState s) const;
};

// One synchronous competitive cascade of at most `alpha` rounds.
//
// Round t lets every node that adopted at round t-1 attack each out-neighbor
// not already in its camp; an attack by camp C on v succeeds with probability
// edge_prob * bias_C(v), evaluated on the bias snapshot taken at the start of
// the round. Seeds never change state; any other node adopts the attacking
// camp (several successes by one camp count once), with a fair coin deciding
// same-round two-camp conflicts. Each adoption halves or squares the opposing
// bias per `rule`, and the adopter attacks in the next round. Stops early on
// a round with no adoptions.
//
// Either camp's seed set may be empty (a one-sided cascade). Throws
// std::invalid_argument when seed sets overlap, contain out-of-range or
// repeated ids, alpha is 0, or biases are invalid.
CascadeResult run_cicmb(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                        std::span<const NodeId> truth_seeds, const BiasTable& biases,
                        BiasRule rule, std::uint32_t alpha, std::uint64_t seed);

struct StateFrequencies {
  // freq[v][s] is the fraction of runs that left v in state s; rows sum to 1.
  std::vector<std::array<double, 3>> freq;

  double mean_count(NodeState s) const;
};

// `runs` independent cascades seeded seed+0, seed+1, ... Deterministic for
// any job count: per-run counts are integers merged in a fixed order.
StateFrequencies monte_carlo_states(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                                    std::span<const NodeId> truth_seeds, const BiasTable& biases,
                                    BiasRule rule, std::uint32_t alpha, std::uint32_t runs,
                                    std::uint64_t seed, unsigned jobs = 1);

}  // namespace cicmb
