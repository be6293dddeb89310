// Microbenchmarks for the hot paths: single cascades, Monte-Carlo batches,
// schedule sweeps, selector runs, and diameter computation.

#include <benchmark/benchmark.h>

#include "cicmb/baselines.hpp"
#include "cicmb/experiments.hpp"
#include "cicmb/synthetic.hpp"
#include "cicmb/truthscore.hpp"

namespace {

using namespace cicmb;

struct Fixture {
  DirectedGraph graph;
  Dag dag;
  std::vector<NodeId> rumor;
  std::vector<NodeId> prospects;
  BiasTable biases;
  std::uint32_t alpha;

  explicit Fixture(NodeId n, unsigned edges_per_node) {
    graph = assign_edge_probabilities(preferential_attachment(n, edges_per_node, 1), 2);
    dag = build_dag(graph);
    auto seeds = pick_seed_sets(graph, 10, 50, 3);
    rumor = std::move(seeds.first);
    prospects = std::move(seeds.second);
    biases = assign_biases(graph, rumor, prospects, 4);
    alpha = undirected_diameter(graph);
    if (alpha == 0) alpha = 1;
  }
};

Fixture& fixture() {
  static Fixture f(2000, 3);
  return f;
}

void BM_SingleCascade(benchmark::State& state) {
  Fixture& f = fixture();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const CascadeResult r =
        run_cicmb(f.graph, f.rumor, {}, f.biases, BiasRule::LinearHalving, f.alpha, seed++);
    benchmark::DoNotOptimize(r.final_state.data());
  }
}
BENCHMARK(BM_SingleCascade);

void BM_MonteCarlo100(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    const StateFrequencies freq = monte_carlo_states(f.graph, f.rumor, {}, f.biases,
                                                     BiasRule::LinearHalving, f.alpha, 100, 7);
    benchmark::DoNotOptimize(freq.freq.data());
  }
}
BENCHMARK(BM_MonteCarlo100);

void BM_MvalSweep(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    const MvalResult m = compute_mval(f.dag, f.rumor, f.biases, f.alpha, 1e-6);
    benchmark::DoNotOptimize(m.touched.data());
  }
}
BENCHMARK(BM_MvalSweep);

void BM_SelectTruthScore(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    const auto picked =
        select_top_k_truthscore(f.dag, f.rumor, f.prospects, 5, f.biases, f.alpha, 1e-6);
    benchmark::DoNotOptimize(picked.data());
  }
}
BENCHMARK(BM_SelectTruthScore);

void BM_SelectTmb(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    const auto picked = tmb_select(f.graph, f.rumor, f.prospects, 5, f.biases,
                                   BiasRule::LinearHalving, f.alpha, 20, 11);
    benchmark::DoNotOptimize(picked.data());
  }
}
BENCHMARK(BM_SelectTmb);

void BM_SelectTib(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    const auto picked =
        tib_select(f.graph, f.rumor, f.prospects, 5, f.biases, f.alpha, 20, 11);
    benchmark::DoNotOptimize(picked.data());
  }
}
BENCHMARK(BM_SelectTib);

void BM_ExactDiameter(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(undirected_diameter(f.graph));
  }
}
BENCHMARK(BM_ExactDiameter);

}  // namespace

BENCHMARK_MAIN();
