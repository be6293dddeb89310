#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "cicmb/propagation.hpp"
#include "cicmb/synthetic.hpp"
#include "oracles.hpp"

using namespace cicmb;

namespace {

DirectedGraph chain3() {
  return DirectedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
}

}  // namespace

TEST_CASE("bias rule arithmetic") {
  CHECK(apply_bias_rule(BiasRule::LinearHalving, 0.8) == doctest::Approx(0.4));
  CHECK(apply_bias_rule(BiasRule::Quadratic, 0.8) == doctest::Approx(0.64));
  CHECK(bias_rule_from_name("linear") == BiasRule::LinearHalving);
  CHECK(bias_rule_from_name("quadratic") == BiasRule::Quadratic);
  CHECK_THROWS_AS(bias_rule_from_name("cubic"), std::invalid_argument);
  CHECK(bias_rule_name(BiasRule::Quadratic) == "quadratic");
}

TEST_CASE("deterministic chain becomes fully misinformed") {
  const std::vector<NodeId> rumor{0};
  const BiasTable biases = BiasTable::filled(3, 1.0, 1.0);
  const CascadeResult res =
      run_cicmb(chain3(), rumor, {}, biases, BiasRule::LinearHalving, 2, 123);
  CHECK(res.final_state[0] == NodeState::Misinfo);
  CHECK(res.final_state[1] == NodeState::Misinfo);
  CHECK(res.final_state[2] == NodeState::Misinfo);
  CHECK(res.iterations_run == 2);
  CHECK(res.count(NodeState::Misinfo) == 3);
}

TEST_CASE("adoption halves the opposing bias under the linear rule") {
  // one neutral node with (B_m, B_t) = (0.6, 0.8) adopting misinformation
  const DirectedGraph g(2, {{0, 1, 1.0}});
  BiasTable biases = BiasTable::filled(2, 1.0, 1.0);
  biases.misinfo[1] = 0.6;
  biases.truth[1] = 0.8;
  // success needs coin < 1.0 * 0.6; retry seeds until the attempt lands
  for (std::uint64_t seed = 0;; ++seed) {
    const CascadeResult res =
        run_cicmb(g, std::vector<NodeId>{0}, {}, biases, BiasRule::LinearHalving, 1, seed);
    if (res.final_state[1] != NodeState::Misinfo) continue;
    CHECK(res.final_biases.misinfo[1] == doctest::Approx(0.6));
    CHECK(res.final_biases.truth[1] == doctest::Approx(0.4));
    break;
  }
}

TEST_CASE("two-camp conflict resolves by a fair coin") {
  const DirectedGraph g(3, {{0, 1, 1.0}, {2, 1, 1.0}});
  const BiasTable biases = BiasTable::filled(3, 1.0, 1.0);
  const StateFrequencies freq = monte_carlo_states(g, std::vector<NodeId>{0},
                                                   std::vector<NodeId>{2}, biases,
                                                   BiasRule::LinearHalving, 1, 10000, 99);
  CHECK(freq.freq[1][1] == doctest::Approx(0.5).epsilon(0.04));
  CHECK(freq.freq[1][1] + freq.freq[1][2] == doctest::Approx(1.0));
}

TEST_CASE("seeds are fixed points and never re-logged") {
  const DirectedGraph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}, {1, 3, 1.0}});
  const BiasTable biases = BiasTable::filled(4, 1.0, 1.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CascadeResult res = run_cicmb(g, std::vector<NodeId>{0}, std::vector<NodeId>{3},
                                        biases, BiasRule::LinearHalving, 6, seed);
    CHECK(res.final_state[0] == NodeState::Misinfo);
    CHECK(res.final_state[3] == NodeState::Truth);
    for (const ActivationEvent& ev : res.activation_log)
      if (ev.node == 0 || ev.node == 3) CHECK(ev.round == 0);
  }
}

TEST_CASE("activation log is ordered and consistent with final states") {
  const DirectedGraph g = assign_edge_probabilities(random_directed_gnm(30, 120, 5), 6);
  BiasTable biases = BiasTable::filled(30, 0.9, 0.9);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const CascadeResult res = run_cicmb(g, std::vector<NodeId>{0, 1}, std::vector<NodeId>{2},
                                        biases, BiasRule::LinearHalving, 5, seed);
    CHECK(res.iterations_run <= 5);
    // rounds never decrease along the log
    for (std::size_t i = 1; i < res.activation_log.size(); ++i)
      CHECK(res.activation_log[i - 1].round <= res.activation_log[i].round);
    // replaying the log gives the final state
    std::vector<NodeState> replay(30, NodeState::Neutral);
    for (const ActivationEvent& ev : res.activation_log) replay[ev.node] = ev.state;
    CHECK(replay == res.final_state);
    // state counts conserve the population
    CHECK(res.count(NodeState::Neutral) + res.count(NodeState::Misinfo) +
              res.count(NodeState::Truth) ==
          30);
  }
}

TEST_CASE("final biases never exceed their initial values") {
  const DirectedGraph g = assign_edge_probabilities(random_directed_gnm(25, 100, 8), 9);
  BiasTable biases;
  SeededRng rng(17);
  for (int i = 0; i < 25; ++i) {
    biases.misinfo.push_back(rng.open_unit());
    biases.truth.push_back(rng.open_unit());
  }
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (BiasRule rule : {BiasRule::LinearHalving, BiasRule::Quadratic}) {
      const CascadeResult res =
          run_cicmb(g, std::vector<NodeId>{0}, std::vector<NodeId>{1}, biases, rule, 6, seed);
      for (int v = 0; v < 25; ++v) {
        CHECK(res.final_biases.misinfo[v] <= biases.misinfo[v]);
        CHECK(res.final_biases.truth[v] <= biases.truth[v]);
        CHECK(res.final_biases.misinfo[v] >= 0.0);
        CHECK(res.final_biases.truth[v] >= 0.0);
      }
    }
  }
}

TEST_CASE("equal seeds give equal activation logs") {
  const DirectedGraph g = assign_edge_probabilities(random_directed_gnm(40, 200, 2), 3);
  const BiasTable biases = BiasTable::filled(40, 0.8, 0.7);
  const auto a = run_cicmb(g, std::vector<NodeId>{5, 6}, std::vector<NodeId>{7}, biases,
                           BiasRule::Quadratic, 8, 4242);
  const auto b = run_cicmb(g, std::vector<NodeId>{5, 6}, std::vector<NodeId>{7}, biases,
                           BiasRule::Quadratic, 8, 4242);
  CHECK(a.activation_log == b.activation_log);
  CHECK(a.final_state == b.final_state);
  const auto c = run_cicmb(g, std::vector<NodeId>{5, 6}, std::vector<NodeId>{7}, biases,
                           BiasRule::Quadratic, 8, 4243);
  CHECK(a.activation_log != c.activation_log);
}

TEST_CASE("a non-seed node can switch camps") {
  // 0 (M) infects 1 at round 1; 2..4 (T chain) can flip it later. Search a
  // seed where node 1 appears twice in the log with different states.
  const DirectedGraph g(4, {{0, 1, 1.0}, {2, 1, 0.9}, {3, 2, 1.0}});
  BiasTable biases = BiasTable::filled(4, 1.0, 1.0);
  bool saw_switch = false;
  for (std::uint64_t seed = 0; seed < 200 && !saw_switch; ++seed) {
    const CascadeResult res = run_cicmb(g, std::vector<NodeId>{0}, std::vector<NodeId>{3},
                                        biases, BiasRule::LinearHalving, 4, seed);
    int adoptions_of_1 = 0;
    for (const ActivationEvent& ev : res.activation_log)
      if (ev.node == 1) ++adoptions_of_1;
    saw_switch = saw_switch || adoptions_of_1 >= 2;
  }
  CHECK(saw_switch);
}

TEST_CASE("validation errors") {
  const DirectedGraph g = chain3();
  const BiasTable ok = BiasTable::filled(3, 1.0, 1.0);
  CHECK_THROWS_AS(run_cicmb(g, std::vector<NodeId>{0}, std::vector<NodeId>{0}, ok,
                            BiasRule::LinearHalving, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_cicmb(g, std::vector<NodeId>{9}, {}, ok, BiasRule::LinearHalving, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_cicmb(g, std::vector<NodeId>{0}, {}, ok, BiasRule::LinearHalving, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_cicmb(g, std::vector<NodeId>{0}, {}, BiasTable::filled(2, 1, 1),
                            BiasRule::LinearHalving, 2, 1),
                  std::invalid_argument);
  BiasTable bad = ok;
  bad.misinfo[1] = 1.5;
  CHECK_THROWS_AS(run_cicmb(g, std::vector<NodeId>{0}, {}, bad, BiasRule::LinearHalving, 2, 1),
                  std::invalid_argument);
}

TEST_CASE("monte carlo frequencies are well formed") {
  const DirectedGraph g = chain3();
  const BiasTable biases = BiasTable::filled(3, 1.0, 1.0);
  const StateFrequencies one =
      monte_carlo_states(g, std::vector<NodeId>{0}, {}, biases, BiasRule::LinearHalving, 2, 1, 5);
  for (const auto& row : one.freq) {
    for (double f : row) CHECK((f == 0.0 || f == 1.0));
  }
  const StateFrequencies many = monte_carlo_states(g, std::vector<NodeId>{0}, {}, biases,
                                                   BiasRule::LinearHalving, 2, 100, 5);
  CHECK(many.freq[2][1] == 1.0);  // deterministic chain: node 2 always misinformed
  CHECK(many.mean_count(NodeState::Misinfo) == doctest::Approx(3.0));
  CHECK_THROWS_AS(monte_carlo_states(g, std::vector<NodeId>{0}, {}, biases,
                                     BiasRule::LinearHalving, 2, 0, 5),
                  std::invalid_argument);
}

TEST_CASE("monte carlo is identical for any job count") {
  const DirectedGraph g = assign_edge_probabilities(random_directed_gnm(20, 80, 4), 11);
  const BiasTable biases = BiasTable::filled(20, 0.7, 0.7);
  const auto a = monte_carlo_states(g, std::vector<NodeId>{0}, std::vector<NodeId>{1}, biases,
                                    BiasRule::LinearHalving, 4, 500, 77, 1);
  const auto b = monte_carlo_states(g, std::vector<NodeId>{0}, std::vector<NodeId>{1}, biases,
                                    BiasRule::LinearHalving, 4, 500, 77, 4);
  CHECK(a.freq == b.freq);
}

TEST_CASE("attempt coins are order independent and paired across variants") {
  // the same (seed, edge, round, camp) tuple gives the same coin regardless
  // of anything else that happened
  CHECK(attempt_coin(1, 2, 3, 4, Camp::Misinfo) == attempt_coin(1, 2, 3, 4, Camp::Misinfo));
  CHECK(attempt_coin(1, 2, 3, 4, Camp::Misinfo) != attempt_coin(1, 2, 3, 4, Camp::Truth));
  CHECK(attempt_coin(1, 2, 3, 4, Camp::Misinfo) != attempt_coin(1, 3, 2, 4, Camp::Misinfo));
  CHECK(attempt_coin(1, 2, 3, 4, Camp::Misinfo) != attempt_coin(2, 2, 3, 4, Camp::Misinfo));
}

TEST_CASE("misinfo-only cascades agree exactly across campaign variants until contact") {
  // with-campaign and without-campaign runs share coins, so a campaign with
  // no influence at all leaves the misinformation spread untouched
  const DirectedGraph g = assign_edge_probabilities(random_directed_gnm(30, 90, 6), 13);
  // node never reached: add an isolated campaigner by using an id with no
  // in/out edges in most draws; verify equality when the campaigner stays idle
  const BiasTable biases = BiasTable::filled(30, 0.8, 0.8);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto base =
        run_cicmb(g, std::vector<NodeId>{0}, {}, biases, BiasRule::LinearHalving, 5, seed);
    const auto with = run_cicmb(g, std::vector<NodeId>{0}, std::vector<NodeId>{1}, biases,
                                BiasRule::LinearHalving, 5, seed);
    if (with.count(NodeState::Truth) == 1) {
      // campaigner never spread: misinformation outcome must match exactly
      for (NodeId v = 0; v < 30; ++v) {
        if (v == 1) continue;
        CHECK(base.final_state[v] == with.final_state[v]);
      }
    }
  }
}

TEST_CASE("early stop reports the quiet round") {
  // 0 -> 1 with probability 1: round 1 infects, round 2 is quiet
  const DirectedGraph g(2, {{0, 1, 1.0}});
  const BiasTable biases = BiasTable::filled(2, 1.0, 1.0);
  const CascadeResult res =
      run_cicmb(g, std::vector<NodeId>{0}, {}, biases, BiasRule::LinearHalving, 10, 3);
  CHECK(res.iterations_run == 2);
  CHECK(res.activation_log.size() == 2);
}

TEST_CASE("monte carlo matches exhaustive enumeration on small graphs") {
  const std::uint32_t runs = 20000;
  for (std::uint64_t gseed = 0; gseed < 6; ++gseed) {
    const DirectedGraph g =
        assign_edge_probabilities(random_directed_gnm(5, 7, gseed + 50), gseed);
    BiasTable biases;
    SeededRng rng(gseed * 31 + 7);
    for (int i = 0; i < 5; ++i) {
      biases.misinfo.push_back(rng.open_unit());
      biases.truth.push_back(rng.open_unit());
    }
    const std::vector<NodeId> rumor{0};
    const std::vector<NodeId> truth{1};
    const BiasRule rule = gseed % 2 ? BiasRule::Quadratic : BiasRule::LinearHalving;

    const auto exact = oracle::enumerate_cicmb(g, rumor, truth, biases, rule, 3);
    const auto mc = monte_carlo_states(g, rumor, truth, biases, rule, 3, runs, gseed * 1000 + 1);
    for (NodeId v = 0; v < 5; ++v) {
      for (int s = 0; s < 3; ++s) {
        // per-leaf rounding can push an exact sum a few ulps past 1
        const double p =
            std::clamp(exact[v][static_cast<std::size_t>(s)], 0.0, 1.0);
        const double se = std::sqrt(p * (1.0 - p) / runs);
        const double tolerance = 3.0 * se;
        CHECK(std::abs(mc.freq[v][static_cast<std::size_t>(s)] - p) <= tolerance + 1e-12);
      }
    }
  }
}

TEST_CASE("one-sided cascade with full bias equals the classic cascade model") {
  for (std::uint64_t gseed = 0; gseed < 8; ++gseed) {
    const DirectedGraph g =
        assign_edge_probabilities(random_directed_gnm(5, 8, gseed + 10), gseed + 3);
    const BiasTable biases = BiasTable::filled(5, 1.0, 1.0);
    const std::vector<NodeId> rumor{0, 1};
    const std::uint32_t alpha = 3;

    const auto icm = oracle::enumerate_icm(g, rumor, alpha);
    const auto cicmb =
        oracle::enumerate_cicmb(g, rumor, {}, biases, BiasRule::LinearHalving, alpha);
    for (NodeId v = 0; v < 5; ++v)
      CHECK(cicmb[v][1] == doctest::Approx(icm[v]).epsilon(1e-9));

    // and the simulator itself agrees within sampling error
    const std::uint32_t runs = 20000;
    const auto mc = monte_carlo_states(g, rumor, {}, biases, BiasRule::LinearHalving, alpha,
                                       runs, gseed * 77 + 5);
    // 40 correlated comparisons share one run set, so allow 3.5 standard errors
    for (NodeId v = 0; v < 5; ++v) {
      const double p = std::clamp(icm[v], 0.0, 1.0);
      const double se = std::sqrt(p * (1.0 - p) / runs);
      CHECK(std::abs(mc.freq[v][1] - p) <= 3.5 * se + 1e-12);
    }
  }
}
