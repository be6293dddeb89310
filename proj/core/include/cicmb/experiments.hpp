#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cicmb/baselines.hpp"
#include "cicmb/graph.hpp"
#include "cicmb/propagation.hpp"
#include "cicmb/truthscore.hpp"

namespace cicmb {

enum class Selector : std::uint8_t { KTruthScore = 0, Tmb = 1, Tib = 2, Random = 3 };

// "ktruthscore" | "tmb" | "tib" | "random"
Selector selector_from_name(std::string_view name);
std::string_view selector_name(Selector s);

struct ExperimentConfig {
  std::string graph_path;
  bool directed = true;
  std::vector<Selector> selectors{Selector::KTruthScore};
  std::uint32_t k = 5;
  std::uint32_t rumor_count = 10;
  std::uint32_t prospect_count = 50;
  std::uint32_t alpha = 0;  // 0 means: use the undirected diameter
  double theta = 1e-6;
  BiasRule bias_rule = BiasRule::LinearHalving;
  std::uint32_t repetitions = 100;
  std::uint32_t resamples = 5;
  std::optional<std::uint64_t> master_seed;
  std::string sweep_param;  // "", "k", "rumor_count", "alpha", "bias_rule", "selector"
  std::vector<std::string> sweep_values;
  std::uint32_t tmb_runs = 100;
  std::uint32_t tib_samples = 100;
  bool redraw_probabilities = false;  // fresh edge probabilities per resample
  bool timing = true;                 // false zeroes runtime_ms for byte-stable output
};

// Flat key=value text; '#' comments and blank lines ignored. Unknown keys
// are an error. List-valued keys (selector, sweep_values) take commas.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical key=value rendering of every field that affects results (jobs
// and timing are excluded); this is what gets hashed into output headers.
std::string effective_config_string(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

// Per-role initial biases: rumor seeds lean misinformation (B_m uniform in
// [0.7,1], B_t its complement), prospects lean truth (mirrored), everyone
// else draws both uniformly from (0,1].
BiasTable assign_biases(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                        std::span<const NodeId> prospects, std::uint64_t seed);

// R uniform without replacement from V, P uniform without replacement from
// V minus R; both returned ascending. Growing rumor_count under the same
// seed extends R (prefix property), which keeps rumor-size sweeps paired.
std::pair<std::vector<NodeId>, std::vector<NodeId>> pick_seed_sets(const DirectedGraph& g,
                                                                   std::uint32_t rumor_count,
                                                                   std::uint32_t prospect_count,
                                                                   std::uint64_t seed);

struct SavedMetrics {
  double saved_pct = 0.0;      // mean % of would-be-misinformed nodes ending T
  double reduction_pct = 0.0;  // mean % drop in misinformed count
  double mean_s = 0.0;         // mean baseline misinformed-set size
  double mean_it = 0.0;        // mean truth-state count with the campaign
  double stddev_saved = 0.0;   // sample stddev of per-run saved %
  std::uint32_t included_runs = 0;
  std::uint32_t skipped_runs = 0;  // runs whose baseline spread was empty
};

// Paired evaluation of a campaign: run r simulates once without campaigners
// (yielding the at-risk set S_r of misinformed nodes) and once with them,
// both from seed+r so misinformation attempt coins coincide wherever the
// trajectories do. saved_pct counts members of S_r ending in state T;
// reduction_pct compares misinformed counts. Runs with S_r empty are
// excluded and counted; all runs empty throws ("rumor never spread").
SavedMetrics percent_saved(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                           std::span<const NodeId> campaigners, const BiasTable& biases,
                           BiasRule rule, std::uint32_t alpha, std::uint32_t runs,
                           std::uint64_t seed, unsigned jobs = 1);

struct SweepRow {
  Selector selector{};
  std::string sweep_value;
  std::uint32_t resample = 0;
  BiasRule rule{};
  std::uint32_t alpha = 0;
  SavedMetrics metrics;
  std::int64_t runtime_ms = 0;
};

struct AggregateRow {
  Selector selector{};
  std::string sweep_value;
  BiasRule rule{};
  double saved_mean = 0.0;
  double saved_std = 0.0;  // sample stddev over resamples
  double reduction_mean = 0.0;
  double mean_s = 0.0;
  double mean_it = 0.0;
};

struct SuiteResult {
  ExperimentConfig config;        // with master_seed resolved
  std::uint32_t default_alpha = 0;  // diameter-derived when config.alpha == 0
  std::vector<SweepRow> rows;
  std::vector<AggregateRow> aggregates;
};

// Full protocol: for every sweep value and resample, pick seed sets, assign
// biases, run each selector, and score its pick with percent_saved over
// `repetitions` paired runs. Rows appear in sweep order (value, then
// selector, then resample); aggregates average the resamples. All jobs are
// independent and scheduled on up to `jobs` threads; output is identical
// for any job count. The overload without a graph loads config.graph_path.
SuiteResult run_suite(const ExperimentConfig& cfg, const DirectedGraph& structural_graph,
                      unsigned jobs = 1);
SuiteResult run_suite(const ExperimentConfig& cfg, unsigned jobs = 1);

// CSV with one row per (sweep value, selector, resample), preceded by a
// version + config-hash comment line.
void write_suite_csv(const SuiteResult& result, std::ostream& out);

// Plot-ready TSV per bias rule present in the aggregates: one line per sweep
// value, mean and stddev columns per selector. Returns the paths written,
// derived from csv_path's stem.
std::vector<std::string> write_plot_tsvs(const SuiteResult& result, const std::string& csv_path);

}  // namespace cicmb
