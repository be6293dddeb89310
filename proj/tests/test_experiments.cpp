#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cicmb/experiments.hpp"
#include "cicmb/synthetic.hpp"

using namespace cicmb;

namespace {

bool metrics_equal(const SavedMetrics& a, const SavedMetrics& b) {
  return a.saved_pct == b.saved_pct && a.reduction_pct == b.reduction_pct &&
         a.mean_s == b.mean_s && a.mean_it == b.mean_it &&
         a.stddev_saved == b.stddev_saved && a.included_runs == b.included_runs &&
         a.skipped_runs == b.skipped_runs;
}

bool rows_equal(const SweepRow& a, const SweepRow& b) {
  return a.selector == b.selector && a.sweep_value == b.sweep_value &&
         a.resample == b.resample && a.rule == b.rule && a.alpha == b.alpha &&
         a.runtime_ms == b.runtime_ms && metrics_equal(a.metrics, b.metrics);
}

std::string csv_text(const SuiteResult& result) {
  std::ostringstream out;
  write_suite_csv(result, out);
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExperimentConfig small_suite_config() {
  ExperimentConfig cfg;
  cfg.selectors = {Selector::Random, Selector::Tib};
  cfg.k = 2;
  cfg.rumor_count = 3;
  cfg.prospect_count = 6;
  cfg.alpha = 3;
  cfg.repetitions = 8;
  cfg.resamples = 2;
  cfg.tib_samples = 20;
  cfg.master_seed = 424242;
  cfg.timing = false;
  return cfg;
}

}  // namespace

TEST_CASE("bias assignment follows the three node roles") {
  const DirectedGraph g = preferential_attachment(500, 2, 1);
  const std::vector<NodeId> rumor{3, 50, 71};
  const std::vector<NodeId> prospects{5, 9, 200, 301};
  const BiasTable biases = assign_biases(g, rumor, prospects, 77);

  std::set<NodeId> special(rumor.begin(), rumor.end());
  special.insert(prospects.begin(), prospects.end());
  for (NodeId r : rumor) {
    CHECK(biases.misinfo[r] >= 0.7);
    CHECK(biases.misinfo[r] <= 1.0);
    CHECK(biases.truth[r] == 1.0 - biases.misinfo[r]);
  }
  for (NodeId p : prospects) {
    CHECK(biases.truth[p] >= 0.7);
    CHECK(biases.truth[p] <= 1.0);
    CHECK(biases.misinfo[p] == 1.0 - biases.truth[p]);
  }
  for (NodeId u = 0; u < 500; ++u) {
    if (special.count(u)) continue;
    CHECK(biases.misinfo[u] > 0.0);
    CHECK(biases.misinfo[u] <= 1.0);
    CHECK(biases.truth[u] > 0.0);
    CHECK(biases.truth[u] <= 1.0);
  }

  const BiasTable again = assign_biases(g, rumor, prospects, 77);
  CHECK(biases.misinfo == again.misinfo);
  CHECK(biases.truth == again.truth);
  const BiasTable other = assign_biases(g, rumor, prospects, 78);
  CHECK(biases.misinfo != other.misinfo);

  CHECK_THROWS_AS(assign_biases(g, rumor, std::vector<NodeId>{3}, 1),
                  std::invalid_argument);
}

TEST_CASE("ordinary-node bias draws are uniform on average") {
  const DirectedGraph g(100000, {});
  const BiasTable biases = assign_biases(g, {}, {}, 5);
  double sum_m = 0.0, sum_t = 0.0;
  for (NodeId u = 0; u < 100000; ++u) {
    sum_m += biases.misinfo[u];
    sum_t += biases.truth[u];
  }
  CHECK(sum_m / 100000.0 > 0.49);
  CHECK(sum_m / 100000.0 < 0.51);
  CHECK(sum_t / 100000.0 > 0.49);
  CHECK(sum_t / 100000.0 < 0.51);
}

TEST_CASE("seed sets are disjoint, sorted, and reproducible") {
  const DirectedGraph g = preferential_attachment(200, 2, 3);
  const auto [rumor, prospects] = pick_seed_sets(g, 10, 25, 99);
  CHECK(rumor.size() == 10);
  CHECK(prospects.size() == 25);
  CHECK(std::is_sorted(rumor.begin(), rumor.end()));
  CHECK(std::is_sorted(prospects.begin(), prospects.end()));
  std::set<NodeId> all(rumor.begin(), rumor.end());
  for (NodeId p : prospects) CHECK(all.insert(p).second);

  const auto [r2, p2] = pick_seed_sets(g, 10, 25, 99);
  CHECK(rumor == r2);
  CHECK(prospects == p2);

  // The rumor draw is a prefix stream: growing the count keeps prior picks.
  const auto [bigger, ignored] = pick_seed_sets(g, 20, 25, 99);
  (void)ignored;
  std::set<NodeId> big(bigger.begin(), bigger.end());
  for (NodeId r : rumor) CHECK(big.count(r) == 1);

  CHECK_THROWS_AS(pick_seed_sets(g, 150, 100, 1), std::invalid_argument);
}

TEST_CASE("a three-node graph forces the prospect set") {
  const DirectedGraph g(3, {{0, 1, 0.5}});
  const auto [rumor, prospects] = pick_seed_sets(g, 1, 2, 7);
  REQUIRE(rumor.size() == 1);
  REQUIRE(prospects.size() == 2);
  std::set<NodeId> all(rumor.begin(), rumor.end());
  all.insert(prospects.begin(), prospects.end());
  CHECK(all == std::set<NodeId>{0, 1, 2});
}

TEST_CASE("no campaigners means nothing saved") {
  const DirectedGraph g(4, {{0, 1, 0.8}, {1, 2, 0.8}});
  const BiasTable biases = BiasTable::filled(4, 0.9, 0.9);
  const auto m = percent_saved(g, std::vector<NodeId>{0}, {}, biases,
                               BiasRule::LinearHalving, 3, 50, 11);
  CHECK(m.saved_pct == 0.0);
  CHECK(m.reduction_pct == 0.0);
  CHECK(m.mean_it == 0.0);
  CHECK(m.included_runs == 50);
  CHECK(m.skipped_runs == 0);
}

TEST_CASE("a campaigner outside the cascade changes nothing") {
  // Common run seeds: the misinformation coins are identical with and
  // without the idle campaigner, so both percentages are exactly zero.
  const DirectedGraph g(10, {{0, 1, 0.7}, {1, 2, 0.7}, {9, 8, 1.0}});
  const BiasTable biases = BiasTable::filled(10, 0.8, 0.8);
  const auto m = percent_saved(g, std::vector<NodeId>{0}, std::vector<NodeId>{9}, biases,
                               BiasRule::LinearHalving, 3, 40, 21);
  CHECK(m.saved_pct == 0.0);
  CHECK(m.reduction_pct == 0.0);
  CHECK(m.mean_it > 0.0);  // the campaigner itself counts as truth-state
}

TEST_CASE("a fixed quarter of the at-risk set yields exactly 25 percent") {
  // Node 0 seeds 32 direct children plus a hub; the hub would misinform ten
  // more. Campaigning on the hub turns it and its ten children to truth:
  // 11 of the 44 at-risk nodes, i.e. 25% saved in every run.
  std::vector<Edge> edges;
  edges.push_back(Edge{0, 1, 1.0});
  for (NodeId s = 2; s <= 11; ++s) edges.push_back(Edge{1, s, 1.0});
  for (NodeId pad = 12; pad < 44; ++pad) edges.push_back(Edge{0, pad, 1.0});
  const DirectedGraph g(44, std::move(edges));
  const BiasTable biases = BiasTable::filled(44, 1.0, 1.0);

  const auto m = percent_saved(g, std::vector<NodeId>{0}, std::vector<NodeId>{1}, biases,
                               BiasRule::LinearHalving, 2, 30, 5);
  CHECK(m.saved_pct == 25.0);
  CHECK(m.reduction_pct == 25.0);
  CHECK(m.mean_s == 44.0);
  CHECK(m.mean_it == 11.0);
  CHECK(m.stddev_saved == 0.0);
  CHECK(m.included_runs == 30);
}

TEST_CASE("evaluation without any rumor seed cannot measure savings") {
  const DirectedGraph g(4, {{0, 1, 0.8}});
  const BiasTable biases = BiasTable::filled(4, 0.9, 0.9);
  CHECK_THROWS_WITH_AS(percent_saved(g, {}, std::vector<NodeId>{2}, biases,
                                     BiasRule::LinearHalving, 2, 10, 3),
                       "rumor never spread", std::runtime_error);
}

TEST_CASE("paired evaluation is thread-count independent") {
  const DirectedGraph g = assign_edge_probabilities(preferential_attachment(80, 2, 31), 32);
  const auto [rumor, prospects] = pick_seed_sets(g, 4, 10, 33);
  const BiasTable biases = assign_biases(g, rumor, prospects, 34);
  const std::vector<NodeId> campaign(prospects.begin(), prospects.begin() + 3);

  const auto a = percent_saved(g, rumor, campaign, biases, BiasRule::LinearHalving,
                               4, 60, 35, 1);
  const auto b = percent_saved(g, rumor, campaign, biases, BiasRule::LinearHalving,
                               4, 60, 35, 4);
  CHECK(metrics_equal(a, b));
  CHECK(a.saved_pct >= 0.0);
  CHECK(a.saved_pct <= 100.0);
}

TEST_CASE("config text parses defaults and overrides") {
  {
    std::istringstream in("");
    const ExperimentConfig cfg = parse_config(in);
    CHECK(cfg.selectors == std::vector<Selector>{Selector::KTruthScore});
    CHECK(cfg.k == 5);
    CHECK(cfg.rumor_count == 10);
    CHECK(cfg.prospect_count == 50);
    CHECK(cfg.alpha == 0);
    CHECK(cfg.theta == 1e-6);
    CHECK(cfg.bias_rule == BiasRule::LinearHalving);
    CHECK(cfg.repetitions == 100);
    CHECK(cfg.resamples == 5);
    CHECK(!cfg.master_seed.has_value());
    CHECK(cfg.timing);
    CHECK(!cfg.redraw_probabilities);
  }
  {
    std::istringstream in(
        "# suite setup\n"
        "graph_path = data/net.txt\n"
        "selector = ktruthscore, tmb ,random\n"
        "\n"
        "k=4\n"
        "rumor_count=8\n"
        "prospect_count=20\n"
        "alpha=6\n"
        "theta=0.001\n"
        "bias_rule=quadratic\n"
        "repetitions=50\n"
        "resamples=3\n"
        "master_seed=123456789\n"
        "sweep_param=k\n"
        "sweep_values=2,4,6\n"
        "tmb_runs=40\n"
        "tib_samples=30\n"
        "redraw_probabilities=true\n"
        "timing=off\n");
    const ExperimentConfig cfg = parse_config(in);
    CHECK(cfg.graph_path == "data/net.txt");
    CHECK(cfg.selectors ==
          std::vector<Selector>{Selector::KTruthScore, Selector::Tmb, Selector::Random});
    CHECK(cfg.k == 4);
    CHECK(cfg.rumor_count == 8);
    CHECK(cfg.prospect_count == 20);
    CHECK(cfg.alpha == 6);
    CHECK(cfg.theta == 0.001);
    CHECK(cfg.bias_rule == BiasRule::Quadratic);
    CHECK(cfg.repetitions == 50);
    CHECK(cfg.resamples == 3);
    CHECK(cfg.master_seed == 123456789ull);
    CHECK(cfg.sweep_param == "k");
    CHECK(cfg.sweep_values == std::vector<std::string>{"2", "4", "6"});
    CHECK(cfg.tmb_runs == 40);
    CHECK(cfg.tib_samples == 30);
    CHECK(cfg.redraw_probabilities);
    CHECK(!cfg.timing);
  }
  {
    std::istringstream in("k=4\nbogus_key=1\n");
    CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
  }
  {
    std::istringstream in("k=not_a_number\n");
    CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
  }
  {
    std::istringstream in("just a line\n");
    CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
  }
}

TEST_CASE("config hashes track result-relevant fields only") {
  ExperimentConfig a = small_suite_config();
  ExperimentConfig b = a;
  CHECK(config_hash_hex(a) == config_hash_hex(b));

  b.timing = !a.timing;  // excluded from the canonical form
  CHECK(config_hash_hex(a) == config_hash_hex(b));

  b = a;
  b.k = a.k + 1;
  CHECK(config_hash_hex(a) != config_hash_hex(b));

  b = a;
  b.master_seed = *a.master_seed + 1;
  CHECK(config_hash_hex(a) != config_hash_hex(b));
}

TEST_CASE("a k sweep emits rows for every value, selector, and resample") {
  const DirectedGraph g = preferential_attachment(60, 2, 8);
  ExperimentConfig cfg = small_suite_config();
  cfg.sweep_param = "k";
  cfg.sweep_values = {"1", "2"};

  const SuiteResult result = run_suite(cfg, g);
  REQUIRE(result.rows.size() == 2 * 2 * 2);
  REQUIRE(result.aggregates.size() == 2 * 2);

  // Order: sweep value, then selector, then resample.
  std::size_t idx = 0;
  for (const char* value : {"1", "2"}) {
    for (Selector sel : {Selector::Random, Selector::Tib}) {
      for (std::uint32_t r = 0; r < 2; ++r, ++idx) {
        CHECK(result.rows[idx].sweep_value == value);
        CHECK(result.rows[idx].selector == sel);
        CHECK(result.rows[idx].resample == r);
        CHECK(result.rows[idx].alpha == 3);
        CHECK(result.rows[idx].runtime_ms == 0);
      }
    }
  }
  CHECK(result.aggregates[0].sweep_value == "1");
  CHECK(result.aggregates[0].selector == Selector::Random);
  CHECK(result.aggregates[3].sweep_value == "2");
  CHECK(result.aggregates[3].selector == Selector::Tib);
}

TEST_CASE("suite runs are deterministic and thread-count independent") {
  const DirectedGraph g = preferential_attachment(60, 2, 8);
  ExperimentConfig cfg = small_suite_config();
  cfg.sweep_param = "k";
  cfg.sweep_values = {"1", "2"};

  const SuiteResult a = run_suite(cfg, g, 1);
  const SuiteResult b = run_suite(cfg, g, 3);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(rows_equal(a.rows[i], b.rows[i]));
  CHECK(csv_text(a) == csv_text(b));

  const SuiteResult c = run_suite(cfg, g, 1);
  CHECK(csv_text(a) == csv_text(c));
}

TEST_CASE("csv output carries the pinned header and one line per row") {
  const DirectedGraph g = preferential_attachment(60, 2, 8);
  ExperimentConfig cfg = small_suite_config();
  const SuiteResult result = run_suite(cfg, g);
  const std::string text = csv_text(result);

  std::istringstream lines(text);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line.rfind("# cicmb ", 0) == 0);
  CHECK(line.find("config=" + config_hash_hex(result.config)) != std::string::npos);
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "selector,sweep_param,sweep_value,resample,saved_pct,reduction_pct,mean_S,mean_IT,"
        "stddev_saved,runtime_ms");
  std::size_t data_lines = 0;
  while (std::getline(lines, line)) {
    CHECK(line.find(",none,0,") != std::string::npos);
    ++data_lines;
  }
  CHECK(data_lines == result.rows.size());
}

TEST_CASE("a bias-rule sweep writes one plot file per rule") {
  const DirectedGraph g = preferential_attachment(60, 2, 8);
  ExperimentConfig cfg = small_suite_config();
  cfg.selectors = {Selector::Random};
  cfg.sweep_param = "bias_rule";
  cfg.sweep_values = {"linear", "quadratic"};

  const SuiteResult result = run_suite(cfg, g);
  REQUIRE(result.aggregates.size() == 2);
  CHECK(result.aggregates[0].rule == BiasRule::LinearHalving);
  CHECK(result.aggregates[1].rule == BiasRule::Quadratic);

  const std::string csv_path = "/tmp/cicmb_test_rules.csv";
  const auto written = write_plot_tsvs(result, csv_path);
  REQUIRE(written.size() == 2);
  CHECK(written[0] == "/tmp/cicmb_test_rules_linear.tsv");
  CHECK(written[1] == "/tmp/cicmb_test_rules_quadratic.tsv");
  for (const std::string& path : written) {
    const std::string text = slurp(path);
    CHECK(text.find("sweep_value\trandom_saved_mean\trandom_saved_std") != std::string::npos);
    std::remove(path.c_str());
  }
}

TEST_CASE("a selector sweep pins one selector per value") {
  const DirectedGraph g = preferential_attachment(60, 2, 8);
  ExperimentConfig cfg = small_suite_config();
  cfg.sweep_param = "selector";
  cfg.sweep_values = {"random", "tib"};

  const SuiteResult result = run_suite(cfg, g);
  REQUIRE(result.rows.size() == 2 * 2);
  CHECK(result.rows[0].selector == Selector::Random);
  CHECK(result.rows[0].sweep_value == "random");
  CHECK(result.rows[2].selector == Selector::Tib);
  CHECK(result.rows[2].sweep_value == "tib");

  // Seed pairing: the random picks are identical across sweep values, so a
  // selector sweep of "random" twice gives byte-identical metrics.
  ExperimentConfig twice = cfg;
  twice.sweep_values = {"random", "random"};
  const SuiteResult doubled = run_suite(twice, g);
  REQUIRE(doubled.rows.size() == 4);
  CHECK(rows_equal(doubled.rows[0], SweepRow{doubled.rows[2].selector,
                                             doubled.rows[2].sweep_value,
                                             doubled.rows[2].resample, doubled.rows[2].rule,
                                             doubled.rows[2].alpha, doubled.rows[2].metrics,
                                             doubled.rows[2].runtime_ms}));
}

TEST_CASE("an alpha sweep overrides the deadline per point") {
  const DirectedGraph g = preferential_attachment(60, 2, 8);
  ExperimentConfig cfg = small_suite_config();
  cfg.alpha = 0;  // would normally require the diameter
  cfg.sweep_param = "alpha";
  cfg.sweep_values = {"1", "4"};

  const SuiteResult result = run_suite(cfg, g);
  REQUIRE(result.rows.size() == 2 * 2 * 2);
  CHECK(result.rows[0].alpha == 1);
  CHECK(result.rows[result.rows.size() - 1].alpha == 4);
}

TEST_CASE("suite validation rejects inconsistent settings") {
  const DirectedGraph g = preferential_attachment(30, 2, 8);
  {
    ExperimentConfig cfg = small_suite_config();
    cfg.master_seed.reset();
    CHECK_THROWS_AS(run_suite(cfg, g), std::invalid_argument);
  }
  {
    ExperimentConfig cfg = small_suite_config();
    cfg.k = 50;
    CHECK_THROWS_AS(run_suite(cfg, g), std::invalid_argument);
  }
  {
    ExperimentConfig cfg = small_suite_config();
    cfg.rumor_count = 25;
    cfg.prospect_count = 25;
    CHECK_THROWS_AS(run_suite(cfg, g), std::invalid_argument);
  }
  {
    ExperimentConfig cfg = small_suite_config();
    cfg.sweep_param = "direction";
    cfg.sweep_values = {"up"};
    CHECK_THROWS_AS(run_suite(cfg, g), std::invalid_argument);
  }
  {
    ExperimentConfig cfg = small_suite_config();
    cfg.sweep_param = "k";
    CHECK_THROWS_AS(run_suite(cfg, g), std::invalid_argument);
  }
  {
    ExperimentConfig cfg = small_suite_config();
    cfg.repetitions = 0;
    CHECK_THROWS_AS(run_suite(cfg, g), std::invalid_argument);
  }
}

TEST_CASE("campaigning with the full pool beats a single campaigner") {
  const DirectedGraph g = preferential_attachment(80, 2, 71);
  ExperimentConfig cfg;
  cfg.selectors = {Selector::KTruthScore};
  cfg.rumor_count = 3;
  cfg.prospect_count = 8;
  cfg.alpha = 3;
  cfg.repetitions = 30;
  cfg.resamples = 3;
  cfg.master_seed = 70707;
  cfg.timing = false;
  cfg.sweep_param = "k";
  cfg.sweep_values = {"1", "8"};

  const SuiteResult result = run_suite(cfg, g);
  REQUIRE(result.aggregates.size() == 2);
  const AggregateRow& one = result.aggregates[0];
  const AggregateRow& all = result.aggregates[1];
  const double slack = std::max(one.saved_std, all.saved_std);
  CHECK(all.saved_mean >= one.saved_mean - slack - 1e-9);
}
