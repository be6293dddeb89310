// Command line front end: ingest, select, simulate, evaluate, suite.
// Batch-only by design; all randomness flows from one --seed value.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cicmb/experiments.hpp"
#include "cicmb/parallel.hpp"
#include "cicmb/synthetic.hpp"
#include "cicmb/version.hpp"

namespace {

using namespace cicmb;

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return std::string(buf);
}

std::uint64_t time_based_seed() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return splitmix64(static_cast<std::uint64_t>(now.count()));
}

void echo_config(const ExperimentConfig& cfg, unsigned jobs) {
  std::istringstream lines(effective_config_string(cfg));
  std::string line;
  std::cerr << "# effective configuration\n";
  while (std::getline(lines, line)) std::cerr << "# " << line << '\n';
  std::cerr << "# jobs=" << jobs << '\n';
  std::cerr << "# config_hash=" << config_hash_hex(cfg) << '\n';
}

std::string output_header(const ExperimentConfig& cfg) {
  return std::string("# cicmb ") + kVersion + " config=" + config_hash_hex(cfg) + "\n";
}

// Flag values shared by the cascade-driving subcommands; only flags the user
// actually passed override the config file.
struct Overrides {
  std::string graph;
  bool directed = true;
  std::string selector = "ktruthscore";
  std::uint32_t k = 5;
  std::uint32_t rumor_count = 10;
  std::uint32_t prospect_count = 50;
  std::uint32_t alpha = 0;
  double theta = 1e-6;
  std::string bias_rule = "linear";
  std::uint32_t reps = 100;
  std::uint32_t resamples = 5;
  std::uint64_t seed = 0;
  std::string sweep;
  std::string values;
  std::string out;
  unsigned jobs = default_jobs();
  std::uint32_t tmb_runs = 100;
  std::uint32_t tib_samples = 100;
  bool no_timing = false;
};

void add_common_options(CLI::App* cmd, Overrides& o, bool with_sweep) {
  cmd->add_option("--graph", o.graph, "Edge-list file to load");
  cmd->add_flag("--directed,!--undirected", o.directed,
                "Treat edges as directed (default) or duplicate both ways");
  cmd->add_option("--selector", o.selector,
                  "Comma list of: ktruthscore, tmb, tib, random");
  cmd->add_option("--k", o.k, "Number of truth campaigners to pick");
  cmd->add_option("--rumor-count", o.rumor_count, "Number of rumor starters");
  cmd->add_option("--prospect-count", o.prospect_count, "Candidate pool size");
  cmd->add_option("--alpha", o.alpha, "Propagation deadline in rounds (0 = graph diameter)");
  cmd->add_option("--theta", o.theta, "Schedule pruning threshold");
  cmd->add_option("--bias-rule", o.bias_rule, "Bias decay rule: linear or quadratic");
  cmd->add_option("--reps", o.reps, "Paired simulation repetitions per evaluation");
  cmd->add_option("--resamples", o.resamples, "Independent seed-set resamples");
  cmd->add_option("--seed", o.seed, "Master seed (omitted: time-based, printed)");
  cmd->add_option("--tmb-runs", o.tmb_runs, "Simulations per TMB estimate");
  cmd->add_option("--tib-samples", o.tib_samples, "Simulations per TIB phase");
  cmd->add_option("--out", o.out, "Output file path");
  cmd->add_option("--jobs", o.jobs, "Worker thread cap");
  cmd->add_flag("--no-timing", o.no_timing, "Report runtime_ms as 0 for byte-stable output");
  if (with_sweep) {
    cmd->add_option("--sweep", o.sweep,
                    "Sweep parameter: k, rumor_count, alpha, bias_rule, selector");
    cmd->add_option("--values", o.values, "Comma list of sweep values");
  }
}

// Merges a parsed config file (if any) with explicitly passed flags.
ExperimentConfig build_config(const CLI::App* cmd, const Overrides& o,
                              const std::string& config_path) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = parse_config_file(config_path);

  const auto given = [&](const std::string& flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--graph")) cfg.graph_path = o.graph;
  if (given("--directed") || given("--undirected")) cfg.directed = o.directed;
  if (given("--selector")) {
    cfg.selectors.clear();
    std::stringstream ss(o.selector);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.selectors.push_back(selector_from_name(item));
  }
  if (given("--k")) cfg.k = o.k;
  if (given("--rumor-count")) cfg.rumor_count = o.rumor_count;
  if (given("--prospect-count")) cfg.prospect_count = o.prospect_count;
  if (given("--alpha")) cfg.alpha = o.alpha;
  if (given("--theta")) cfg.theta = o.theta;
  if (given("--bias-rule")) cfg.bias_rule = bias_rule_from_name(o.bias_rule);
  if (given("--reps")) cfg.repetitions = o.reps;
  if (given("--resamples")) cfg.resamples = o.resamples;
  if (given("--seed")) cfg.master_seed = o.seed;
  if (given("--tmb-runs")) cfg.tmb_runs = o.tmb_runs;
  if (given("--tib-samples")) cfg.tib_samples = o.tib_samples;
  if (given("--sweep")) cfg.sweep_param = o.sweep;
  if (given("--values")) {
    cfg.sweep_values.clear();
    std::stringstream ss(o.values);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.sweep_values.push_back(item);
  }
  if (o.no_timing) cfg.timing = false;

  if (!cfg.master_seed) {
    cfg.master_seed = time_based_seed();
    std::cerr << "# no --seed given, using time-based seed " << *cfg.master_seed << '\n';
  }
  return cfg;
}

struct PreparedRun {
  DirectedGraph graph;  // probabilities assigned
  Dag dag;
  std::vector<NodeId> rumor;
  std::vector<NodeId> prospects;
  BiasTable biases;
  std::uint32_t alpha;
};

PreparedRun prepare_run(const ExperimentConfig& cfg, unsigned jobs) {
  if (cfg.graph_path.empty()) throw std::runtime_error("--graph is required");
  const LoadResult loaded = load_edge_list_file(cfg.graph_path, cfg.directed);
  const std::uint64_t master = *cfg.master_seed;

  PreparedRun run;
  run.graph = assign_edge_probabilities(loaded.graph,
                                        derive_seed(master, SeedStream::EdgeProbs, 0));
  run.alpha = cfg.alpha;
  if (run.alpha == 0) {
    run.alpha = undirected_diameter(run.graph, DiameterOptions{50000, 20, jobs});
    if (run.alpha == 0) run.alpha = 1;
    std::cerr << "# alpha defaulted to diameter " << run.alpha << '\n';
  }
  run.dag = build_dag(run.graph);
  auto seeds = pick_seed_sets(run.graph, cfg.rumor_count, cfg.prospect_count,
                              derive_seed(master, SeedStream::SeedSets, 0));
  run.rumor = std::move(seeds.first);
  run.prospects = std::move(seeds.second);
  run.biases = assign_biases(run.graph, run.rumor, run.prospects,
                             derive_seed(master, SeedStream::Biases, 0));
  return run;
}

std::vector<ScoredCandidate> select_with(const ExperimentConfig& cfg, const PreparedRun& run,
                                         Selector sel, unsigned jobs) {
  const std::uint64_t master = *cfg.master_seed;
  switch (sel) {
    case Selector::KTruthScore:
      return select_top_k_truthscore(run.dag, run.rumor, run.prospects, cfg.k, run.biases,
                                     run.alpha, cfg.theta, jobs);
    case Selector::Tmb:
      return tmb_select(run.graph, run.rumor, run.prospects, cfg.k, run.biases, cfg.bias_rule,
                        run.alpha, cfg.tmb_runs, derive_seed(master, SeedStream::Selection, 0),
                        jobs);
    case Selector::Tib:
      return tib_select(run.graph, run.rumor, run.prospects, cfg.k, run.biases, run.alpha,
                        cfg.tib_samples, derive_seed(master, SeedStream::Selection, 0), jobs);
    case Selector::Random:
      return random_select(run.prospects, cfg.k,
                           derive_seed(master, SeedStream::RandomPick, 0));
  }
  throw std::logic_error("unreachable selector");
}

int cmd_ingest(const ExperimentConfig& cfg, unsigned jobs, NodeId exact_threshold) {
  if (cfg.graph_path.empty()) throw std::runtime_error("--graph is required");
  const LoadResult loaded = load_edge_list_file(cfg.graph_path, cfg.directed);
  const unsigned diameter =
      undirected_diameter(loaded.graph, DiameterOptions{exact_threshold, 20, jobs});
  std::cout << "nodes=" << loaded.graph.node_count() << " edges=" << loaded.graph.edge_count()
            << " self_loops_dropped=" << loaded.stats.self_loops_dropped
            << " duplicates_dropped=" << loaded.stats.duplicates_dropped
            << " diameter=" << diameter << '\n';
  return 0;
}

void dump_schedule_rows(std::ostream& out, const DirectedGraph& g, const ProbSchedule& sched,
                        char role, std::span<const NodeId> nodes) {
  for (NodeId v : nodes) {
    out << g.original_id(v) << ',' << role;
    for (std::uint32_t i = 0; i <= sched.alpha(); ++i) out << ',' << fixed6(sched.at(v, i));
    out << '\n';
  }
}

int cmd_select(const ExperimentConfig& cfg, unsigned jobs, const std::string& out_path) {
  const PreparedRun run = prepare_run(cfg, jobs);
  const Selector sel = cfg.selectors.at(0);
  const auto picked = select_with(cfg, run, sel, jobs);

  for (const ScoredCandidate& c : picked)
    std::cout << run.graph.original_id(c.node) << ' ' << fixed6(c.score) << '\n';

  if (out_path.empty()) return 0;
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write output file: " + out_path);
  out << output_header(cfg);
  if (sel == Selector::KTruthScore) {
    // Schedule dump: the misinformation rows over R and the touched set,
    // then each winner's truth rows over the candidate and its touched set.
    out << "node,role,entries\n";
    const MvalResult m = compute_mval(run.dag, run.rumor, run.biases, run.alpha, cfg.theta);
    std::vector<NodeId> m_nodes(run.rumor.begin(), run.rumor.end());
    m_nodes.insert(m_nodes.end(), m.touched.begin(), m.touched.end());
    std::sort(m_nodes.begin(), m_nodes.end());
    m_nodes.erase(std::unique(m_nodes.begin(), m_nodes.end()), m_nodes.end());
    dump_schedule_rows(out, run.graph, m.schedule, 'm', m_nodes);
    for (const ScoredCandidate& c : picked) {
      const TvalResult t =
          compute_tval(run.dag, c.node, run.rumor, run.biases, run.alpha, cfg.theta);
      std::vector<NodeId> t_nodes{c.node};
      t_nodes.insert(t_nodes.end(), t.touched.begin(), t.touched.end());
      std::sort(t_nodes.begin(), t_nodes.end());
      t_nodes.erase(std::unique(t_nodes.begin(), t_nodes.end()), t_nodes.end());
      dump_schedule_rows(out, run.graph, t.schedule, 't', t_nodes);
    }
  } else {
    out << "node,score\n";
    for (const ScoredCandidate& c : picked)
      out << run.graph.original_id(c.node) << ',' << fixed6(c.score) << '\n';
  }
  if (!out.good()) throw std::runtime_error("failed writing " + out_path);
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, unsigned jobs, const std::string& out_path) {
  const PreparedRun run = prepare_run(cfg, jobs);
  std::vector<NodeId> campaigners;
  if (cfg.k > 0) {
    for (const ScoredCandidate& c : select_with(cfg, run, cfg.selectors.at(0), jobs))
      campaigners.push_back(c.node);
  }

  const std::uint64_t sim_seed = derive_seed(*cfg.master_seed, SeedStream::Evaluation, 0);
  std::ofstream log_out;
  if (!out_path.empty()) {
    log_out.open(out_path);
    if (!log_out) throw std::runtime_error("cannot write log file: " + out_path);
    log_out << output_header(cfg);
    log_out << "run_id,timestamp,node,state\n";
  }

  double mean_m = 0.0, mean_t = 0.0, mean_rounds = 0.0;
  for (std::uint32_t r = 0; r < cfg.repetitions; ++r) {
    const CascadeResult res = run_cicmb(run.graph, run.rumor, campaigners, run.biases,
                                        cfg.bias_rule, run.alpha, sim_seed + r);
    mean_m += static_cast<double>(res.count(NodeState::Misinfo));
    mean_t += static_cast<double>(res.count(NodeState::Truth));
    mean_rounds += static_cast<double>(res.iterations_run);
    if (log_out) {
      for (const ActivationEvent& ev : res.activation_log)
        log_out << r << ',' << ev.round << ',' << run.graph.original_id(ev.node) << ','
                << state_char(ev.state) << '\n';
    }
  }
  const double inv = 1.0 / static_cast<double>(cfg.repetitions);
  std::cout << "runs=" << cfg.repetitions << " alpha=" << run.alpha
            << " campaigners=" << campaigners.size() << " mean_M=" << fixed6(mean_m * inv)
            << " mean_T=" << fixed6(mean_t * inv)
            << " mean_rounds=" << fixed6(mean_rounds * inv) << '\n';
  if (log_out && !log_out.good()) throw std::runtime_error("failed writing " + out_path);
  return 0;
}

int cmd_evaluate(ExperimentConfig cfg, unsigned jobs, const std::string& out_path) {
  cfg.sweep_param.clear();
  cfg.sweep_values.clear();
  const SuiteResult result = run_suite(cfg, jobs);
  for (const SweepRow& row : result.rows) {
    std::cout << "selector=" << selector_name(row.selector) << " resample=" << row.resample
              << " saved_pct=" << fixed6(row.metrics.saved_pct)
              << " reduction_pct=" << fixed6(row.metrics.reduction_pct)
              << " mean_S=" << fixed6(row.metrics.mean_s)
              << " mean_IT=" << fixed6(row.metrics.mean_it)
              << " stddev_saved=" << fixed6(row.metrics.stddev_saved)
              << " skipped_runs=" << row.metrics.skipped_runs << '\n';
  }
  for (const AggregateRow& agg : result.aggregates) {
    std::cout << "aggregate selector=" << selector_name(agg.selector)
              << " saved_mean=" << fixed6(agg.saved_mean)
              << " saved_std=" << fixed6(agg.saved_std)
              << " reduction_mean=" << fixed6(agg.reduction_mean) << '\n';
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write output file: " + out_path);
    write_suite_csv(result, out);
    if (!out.good()) throw std::runtime_error("failed writing " + out_path);
    std::cout << "wrote " << out_path << '\n';
  }
  return 0;
}

int cmd_suite(const ExperimentConfig& cfg, unsigned jobs, const std::string& out_path) {
  const SuiteResult result = run_suite(cfg, jobs);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write output file: " + out_path);
  write_suite_csv(result, out);
  out.close();
  if (!out.good()) throw std::runtime_error("failed writing " + out_path);
  std::cout << "wrote " << out_path << '\n';
  for (const std::string& path : write_plot_tsvs(result, out_path))
    std::cout << "wrote " << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("cicmb ") + kVersion +
               " - competitive misinformation/truth cascade toolkit"};
  app.require_subcommand(1);

  Overrides o;
  std::string config_path;
  NodeId exact_threshold = 50000;

  CLI::App* ingest = app.add_subcommand("ingest", "Load a graph and print its summary line");
  ingest->add_option("--graph", o.graph, "Edge-list file to load")->required();
  ingest->add_flag("--directed,!--undirected", o.directed, "Edge direction handling");
  ingest->add_option("--jobs", o.jobs, "Worker thread cap");
  ingest->add_option("--exact-diameter-threshold", exact_threshold,
                     "Component size up to which the diameter is exact");

  CLI::App* select = app.add_subcommand("select", "Pick k truth campaigners and print them");
  add_common_options(select, o, false);

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run repeated cascades, optionally dumping activations");
  add_common_options(simulate, o, false);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score a selector with paired saved-percentage runs");
  add_common_options(evaluate, o, false);

  CLI::App* suite = app.add_subcommand("suite", "Run a sweep suite and write CSV + plot data");
  suite->add_option("config", config_path, "key=value config file");
  add_common_options(suite, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (ingest->parsed()) {
      ExperimentConfig cfg;
      cfg.graph_path = o.graph;
      cfg.directed = o.directed;
      std::cerr << "# cicmb " << kVersion << " ingest graph=" << cfg.graph_path
                << " directed=" << (cfg.directed ? "true" : "false") << '\n';
      return cmd_ingest(cfg, o.jobs, exact_threshold);
    }
    CLI::App* active = app.get_subcommands().at(0);
    ExperimentConfig cfg = build_config(active, o, config_path);
    echo_config(cfg, o.jobs);
    if (select->parsed()) return cmd_select(cfg, o.jobs, o.out);
    if (simulate->parsed()) return cmd_simulate(cfg, o.jobs, o.out);
    if (evaluate->parsed()) return cmd_evaluate(cfg, o.jobs, o.out);
    if (suite->parsed())
      return cmd_suite(cfg, o.jobs, o.out.empty() ? "suite_results.csv" : o.out);
    throw std::runtime_error("no subcommand");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
