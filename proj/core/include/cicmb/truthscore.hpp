#pragma once

#include <span>
#include <vector>

#include "cicmb/graph.hpp"
#include "cicmb/propagation.hpp"

namespace cicmb {

enum class ScheduleRole : std::uint8_t { Misinfo = 0, Truth = 1 };

// Per-node array of alpha+1 entries in [0,1]; entry i estimates the chance
// of adopting the role's state exactly at round i. Index 0 is 1 for the
// owning seed set and 0 elsewhere.
class ProbSchedule {
 public:
  ProbSchedule(NodeId node_count, std::uint32_t alpha, ScheduleRole role)
      : node_count_(node_count),
        alpha_(alpha),
        role_(role),
        values_(static_cast<std::size_t>(node_count) * (alpha + 1), 0.0) {}

  NodeId node_count() const noexcept { return node_count_; }
  std::uint32_t alpha() const noexcept { return alpha_; }
  ScheduleRole role() const noexcept { return role_; }

  double at(NodeId u, std::uint32_t i) const { return values_[index(u, i)]; }
  double& at(NodeId u, std::uint32_t i) { return values_[index(u, i)]; }

  std::span<const double> row(NodeId u) const {
    return {values_.data() + index(u, 0), alpha_ + 1u};
  }

 private:
  std::size_t index(NodeId u, std::uint32_t i) const {
    return static_cast<std::size_t>(u) * (alpha_ + 1) + i;
  }

  NodeId node_count_;
  std::uint32_t alpha_;
  ScheduleRole role_;
  std::vector<double> values_;
};

struct MvalResult {
  ProbSchedule schedule;
  // Set A, ascending: every node that received a sweep update. A seed can
  // appear when it is a DAG descendant of another seed.
  std::vector<NodeId> touched;
};

struct TvalResult {
  ProbSchedule schedule;
  // Set B, ascending: every node that received a sweep update. Never holds
  // the candidate (no DAG node reaches itself) or a rumor seed.
  std::vector<NodeId> touched;
};

// Misinformation adoption schedule on the DAG. Sources r in R get entry 1 at
// index 0; rounds i=1..alpha propagate from every frontier node v whose
// round-(i-1) entry exceeds theta to each DAG child u:
//
//   mval_u[i] += (1 - mval_u[i]) * max(0, 1 - sum_{j<i} mval_u[j])
//                * P(v,u) * B_m(u) * mval_v[i-1]
//
// using the node's initial misinformation bias throughout. Touched children
// join the next frontier and the returned set. The remaining-probability
// factor is clamped at 0 so entries stay within [0,1] even when earlier
// rounds already account for the full probability mass.
MvalResult compute_mval(const Dag& dag, std::span<const NodeId> rumor_seeds,
                        const BiasTable& initial_biases, std::uint32_t alpha, double theta);

// Truth adoption schedule for one candidate: the same sweep seeded at the
// candidate, scaled by B_t(u), and never updating nodes in R.
TvalResult compute_tval(const Dag& dag, NodeId candidate, std::span<const NodeId> rumor_seeds,
                        const BiasTable& initial_biases, std::uint32_t alpha, double theta);

// Sum of tval entries over rounds 1..alpha for every node in A ∩ B. The
// node sets may be given in any order. Throws when the schedules disagree on
// alpha or node count, or the roles are not (misinfo, truth).
double truth_score(const ProbSchedule& mval, std::span<const NodeId> a,
                   const ProbSchedule& tval, std::span<const NodeId> b);

struct ScoredCandidate {
  NodeId node;
  double score;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

// Scores every candidate and returns the k best, highest score first, equal
// scores broken by ascending id. The misinformation schedule is computed
// once; candidate schedules are independent and run on up to `jobs` threads.
std::vector<ScoredCandidate> select_top_k_truthscore(const Dag& dag,
                                                     std::span<const NodeId> rumor_seeds,
                                                     std::span<const NodeId> candidates,
                                                     std::uint32_t k,
                                                     const BiasTable& initial_biases,
                                                     std::uint32_t alpha, double theta,
                                                     unsigned jobs = 1);

}  // namespace cicmb
