#include "cicmb/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cicmb/parallel.hpp"
#include "cicmb/rng.hpp"
#include "cicmb/version.hpp"

namespace cicmb {

Selector selector_from_name(std::string_view name) {
  if (name == "ktruthscore") return Selector::KTruthScore;
  if (name == "tmb") return Selector::Tmb;
  if (name == "tib") return Selector::Tib;
  if (name == "random") return Selector::Random;
  throw std::invalid_argument("unknown selector: " + std::string(name));
}

std::string_view selector_name(Selector s) {
  switch (s) {
    case Selector::KTruthScore: return "ktruthscore";
    case Selector::Tmb: return "tmb";
    case Selector::Tib: return "tib";
    case Selector::Random: return "random";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::size_t end = comma == std::string::npos ? s.size() : comma;
    const std::string item = trim(std::string_view(s).substr(pos, end - pos));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::uint64_t parse_u64(const std::string& v, const char* key) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw std::invalid_argument(std::string("invalid integer for ") + key + ": " + v);
  return x;
}

std::uint32_t parse_u32(const std::string& v, const char* key) {
  const std::uint64_t x = parse_u64(v, key);
  if (x > 0xFFFFFFFFull)
    throw std::invalid_argument(std::string("value too large for ") + key + ": " + v);
  return static_cast<std::uint32_t>(x);
}

double parse_double(const std::string& v, const char* key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("invalid number for ") + key + ": " + v);
  }
}

bool parse_bool(const std::string& v, const char* key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument(std::string("invalid boolean for ") + key + ": " + v);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));

    if (key == "graph_path") {
      cfg.graph_path = value;
    } else if (key == "directed") {
      cfg.directed = parse_bool(value, "directed");
    } else if (key == "selector") {
      cfg.selectors.clear();
      for (const std::string& name : split_list(value))
        cfg.selectors.push_back(selector_from_name(name));
      if (cfg.selectors.empty()) throw std::invalid_argument("selector list is empty");
    } else if (key == "k") {
      cfg.k = parse_u32(value, "k");
    } else if (key == "rumor_count") {
      cfg.rumor_count = parse_u32(value, "rumor_count");
    } else if (key == "prospect_count") {
      cfg.prospect_count = parse_u32(value, "prospect_count");
    } else if (key == "alpha") {
      cfg.alpha = parse_u32(value, "alpha");
    } else if (key == "theta") {
      cfg.theta = parse_double(value, "theta");
    } else if (key == "bias_rule") {
      cfg.bias_rule = bias_rule_from_name(value);
    } else if (key == "repetitions") {
      cfg.repetitions = parse_u32(value, "repetitions");
    } else if (key == "resamples") {
      cfg.resamples = parse_u32(value, "resamples");
    } else if (key == "master_seed") {
      cfg.master_seed = parse_u64(value, "master_seed");
    } else if (key == "sweep_param") {
      cfg.sweep_param = value;
    } else if (key == "sweep_values") {
      cfg.sweep_values = split_list(value);
    } else if (key == "tmb_runs") {
      cfg.tmb_runs = parse_u32(value, "tmb_runs");
    } else if (key == "tib_samples") {
      cfg.tib_samples = parse_u32(value, "tib_samples");
    } else if (key == "redraw_probabilities") {
      cfg.redraw_probabilities = parse_bool(value, "redraw_probabilities");
    } else if (key == "timing") {
      cfg.timing = parse_bool(value, "timing");
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

std::string effective_config_string(const ExperimentConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  out << "alpha=" << cfg.alpha << '\n';
  out << "bias_rule=" << bias_rule_name(cfg.bias_rule) << '\n';
  out << "directed=" << (cfg.directed ? "true" : "false") << '\n';
  out << "graph_path=" << cfg.graph_path << '\n';
  out << "k=" << cfg.k << '\n';
  out << "master_seed=";
  if (cfg.master_seed) out << *cfg.master_seed;
  out << '\n';
  out << "prospect_count=" << cfg.prospect_count << '\n';
  out << "redraw_probabilities=" << (cfg.redraw_probabilities ? "true" : "false") << '\n';
  out << "repetitions=" << cfg.repetitions << '\n';
  out << "resamples=" << cfg.resamples << '\n';
  out << "rumor_count=" << cfg.rumor_count << '\n';
  out << "selector=";
  for (std::size_t i = 0; i < cfg.selectors.size(); ++i) {
    if (i) out << ',';
    out << selector_name(cfg.selectors[i]);
  }
  out << '\n';
  out << "sweep_param=" << cfg.sweep_param << '\n';
  out << "sweep_values=";
  for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
    if (i) out << ',';
    out << cfg.sweep_values[i];
  }
  out << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", cfg.theta);
  out << "theta=" << buf << '\n';
  out << "tib_samples=" << cfg.tib_samples << '\n';
  out << "tmb_runs=" << cfg.tmb_runs << '\n';
  return out.str();
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  const std::string s = effective_config_string(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

BiasTable assign_biases(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                        std::span<const NodeId> prospects, std::uint64_t seed) {
  const NodeId n = g.node_count();
  enum : std::uint8_t { Plain = 0, Rumor = 1, Prospect = 2 };
  std::vector<std::uint8_t> role(n, Plain);
  for (NodeId r : rumor_seeds) {
    if (r >= n) throw std::invalid_argument("rumor seed out of range");
    role[r] = Rumor;
  }
  for (NodeId p : prospects) {
    if (p >= n) throw std::invalid_argument("prospect out of range");
    if (role[p] == Rumor) throw std::invalid_argument("rumor and prospect sets overlap");
    role[p] = Prospect;
  }

  SeededRng rng(seed);
  BiasTable biases;
  biases.misinfo.resize(n);
  biases.truth.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    switch (role[v]) {
      case Rumor: {
        const double b = rng.range(0.7, 1.0);
        biases.misinfo[v] = b;
        biases.truth[v] = 1.0 - b;
        break;
      }
      case Prospect: {
        const double b = rng.range(0.7, 1.0);
        biases.truth[v] = b;
        biases.misinfo[v] = 1.0 - b;
        break;
      }
      default:
        biases.misinfo[v] = rng.open_unit();
        biases.truth[v] = rng.open_unit();
        break;
    }
  }
  return biases;
}

std::pair<std::vector<NodeId>, std::vector<NodeId>> pick_seed_sets(const DirectedGraph& g,
                                                                   std::uint32_t rumor_count,
                                                                   std::uint32_t prospect_count,
                                                                   std::uint64_t seed) {
  const NodeId n = g.node_count();
  if (static_cast<std::uint64_t>(rumor_count) + prospect_count > n)
    throw std::invalid_argument("rumor_count + prospect_count exceeds node count");

  // Partial Fisher-Yates: the first rumor_count draws form R, the next
  // prospect_count form P. R under a larger rumor_count is a superset.
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  SeededRng rng(seed);
  const std::uint32_t total = rumor_count + prospect_count;
  for (std::uint32_t i = 0; i < total; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(ids[i], ids[j]);
  }
  std::vector<NodeId> rumor(ids.begin(), ids.begin() + rumor_count);
  std::vector<NodeId> prospect(ids.begin() + rumor_count, ids.begin() + total);
  std::sort(rumor.begin(), rumor.end());
  std::sort(prospect.begin(), prospect.end());
  return {std::move(rumor), std::move(prospect)};
}

SavedMetrics percent_saved(const DirectedGraph& g, std::span<const NodeId> rumor_seeds,
                           std::span<const NodeId> campaigners, const BiasTable& biases,
                           BiasRule rule, std::uint32_t alpha, std::uint32_t runs,
                           std::uint64_t seed, unsigned jobs) {
  if (runs == 0) throw std::invalid_argument("runs must be at least 1");
  const NodeId n = g.node_count();

  struct RunRecord {
    std::uint32_t s_size = 0;
    std::uint32_t saved = 0;
    std::uint32_t m_with = 0;
    std::uint32_t t_with = 0;
  };
  std::vector<RunRecord> records(runs);

  parallel_chunks(runs, jobs == 0 ? 1 : jobs, jobs, [&](std::size_t, std::size_t b,
                                                        std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      const CascadeResult base =
          run_cicmb(g, rumor_seeds, {}, biases, rule, alpha, seed + r);
      const CascadeResult with =
          campaigners.empty()
              ? base
              : run_cicmb(g, rumor_seeds, campaigners, biases, rule, alpha, seed + r);
      RunRecord rec;
      for (NodeId v = 0; v < n; ++v) {
        const bool at_risk = base.final_state[v] == NodeState::Misinfo;
        rec.s_size += at_risk;
        rec.saved += at_risk && with.final_state[v] == NodeState::Truth;
        rec.m_with += with.final_state[v] == NodeState::Misinfo;
        rec.t_with += with.final_state[v] == NodeState::Truth;
      }
      records[r] = rec;
    }
  });

  SavedMetrics out;
  double sum_saved = 0.0, sum_sq_saved = 0.0, sum_reduction = 0.0;
  double sum_s = 0.0, sum_it = 0.0;
  for (const RunRecord& rec : records) {
    if (rec.s_size == 0) {
      ++out.skipped_runs;
      continue;
    }
    ++out.included_runs;
    const double s = static_cast<double>(rec.s_size);
    const double saved = 100.0 * static_cast<double>(rec.saved) / s;
    sum_saved += saved;
    sum_sq_saved += saved * saved;
    sum_reduction += 100.0 * (s - static_cast<double>(rec.m_with)) / s;
    sum_s += s;
    sum_it += static_cast<double>(rec.t_with);
  }
  if (out.included_runs == 0) throw std::runtime_error("rumor never spread");

  const double cnt = static_cast<double>(out.included_runs);
  out.saved_pct = sum_saved / cnt;
  out.reduction_pct = sum_reduction / cnt;
  out.mean_s = sum_s / cnt;
  out.mean_it = sum_it / cnt;
  if (out.included_runs > 1) {
    const double var =
        std::max(0.0, (sum_sq_saved - sum_saved * sum_saved / cnt) / (cnt - 1.0));
    out.stddev_saved = std::sqrt(var);
  }
  return out;
}

namespace {

// One sweep point: the base config with the swept parameter overridden.
struct SweepPoint {
  std::string text;
  std::uint32_t k;
  std::uint32_t rumor_count;
  std::uint32_t alpha;  // already resolved (0 replaced by the diameter)
  BiasRule rule;
  std::optional<Selector> forced_selector;  // set for selector sweeps
};

std::vector<ScoredCandidate> run_selector(Selector sel, const DirectedGraph& g, const Dag& dag,
                                          std::span<const NodeId> rumor,
                                          std::span<const NodeId> prospects,
                                          const BiasTable& biases, const SweepPoint& pt,
                                          const ExperimentConfig& cfg, std::uint64_t master,
                                          std::uint32_t resample) {
  switch (sel) {
    case Selector::KTruthScore:
      return select_top_k_truthscore(dag, rumor, prospects, pt.k, biases, pt.alpha, cfg.theta,
                                     1);
    case Selector::Tmb:
      return tmb_select(g, rumor, prospects, pt.k, biases, pt.rule, pt.alpha, cfg.tmb_runs,
                        derive_seed(master, SeedStream::Selection, resample), 1);
    case Selector::Tib:
      return tib_select(g, rumor, prospects, pt.k, biases, pt.alpha, cfg.tib_samples,
                        derive_seed(master, SeedStream::Selection, resample), 1);
    case Selector::Random:
      return random_select(prospects, pt.k,
                           derive_seed(master, SeedStream::RandomPick, resample));
  }
  throw std::logic_error("unreachable selector");
}

}  // namespace

SuiteResult run_suite(const ExperimentConfig& cfg, const DirectedGraph& structural_graph,
                      unsigned jobs) {
  if (!cfg.master_seed)
    throw std::invalid_argument("master seed must be resolved before running a suite");
  if (cfg.k == 0 || cfg.rumor_count == 0 || cfg.prospect_count == 0 || cfg.repetitions == 0 ||
      cfg.resamples == 0)
    throw std::invalid_argument("all counts must be positive");
  const std::uint64_t master = *cfg.master_seed;
  const NodeId n = structural_graph.node_count();

  // Resolve the default alpha once; an explicit alpha skips the BFS work.
  std::uint32_t default_alpha = cfg.alpha;
  const bool alpha_sweep_only = cfg.sweep_param == "alpha" && !cfg.sweep_values.empty();
  if (default_alpha == 0 && !alpha_sweep_only) {
    default_alpha = undirected_diameter(structural_graph, DiameterOptions{50000, 20, jobs});
    if (default_alpha == 0) default_alpha = 1;
  }

  // Expand sweep points.
  std::vector<SweepPoint> points;
  const SweepPoint base{"", cfg.k, cfg.rumor_count, default_alpha, cfg.bias_rule, std::nullopt};
  if (cfg.sweep_param.empty()) {
    SweepPoint pt = base;
    pt.text = "0";
    points.push_back(std::move(pt));
  } else if (cfg.sweep_values.empty()) {
    throw std::invalid_argument("sweep_param given without sweep_values");
  } else if (cfg.sweep_param == "k") {
    for (const std::string& v : cfg.sweep_values) {
      SweepPoint pt = base;
      pt.text = v;
      pt.k = parse_u32(v, "k sweep value");
      points.push_back(std::move(pt));
    }
  } else if (cfg.sweep_param == "rumor_count") {
    for (const std::string& v : cfg.sweep_values) {
      SweepPoint pt = base;
      pt.text = v;
      pt.rumor_count = parse_u32(v, "rumor_count sweep value");
      points.push_back(std::move(pt));
    }
  } else if (cfg.sweep_param == "alpha") {
    for (const std::string& v : cfg.sweep_values) {
      SweepPoint pt = base;
      pt.text = v;
      pt.alpha = parse_u32(v, "alpha sweep value");
      if (pt.alpha == 0) throw std::invalid_argument("alpha sweep value must be positive");
      points.push_back(std::move(pt));
    }
  } else if (cfg.sweep_param == "bias_rule") {
    for (const std::string& v : cfg.sweep_values) {
      SweepPoint pt = base;
      pt.text = v;
      pt.rule = bias_rule_from_name(v);
      points.push_back(std::move(pt));
    }
  } else if (cfg.sweep_param == "selector") {
    for (const std::string& v : cfg.sweep_values) {
      SweepPoint pt = base;
      pt.text = v;
      pt.forced_selector = selector_from_name(v);
      points.push_back(std::move(pt));
    }
  } else {
    throw std::invalid_argument("unknown sweep parameter: " + cfg.sweep_param);
  }

  for (const SweepPoint& pt : points) {
    if (pt.k > cfg.prospect_count)
      throw std::invalid_argument("k exceeds prospect_count");
    if (static_cast<std::uint64_t>(pt.rumor_count) + cfg.prospect_count > n)
      throw std::invalid_argument("rumor_count + prospect_count exceeds node count");
  }

  // Selector axis: a selector sweep pins one per point; otherwise every
  // configured selector runs at every point.
  const bool selector_sweep = cfg.sweep_param == "selector";
  const std::size_t selector_count = selector_sweep ? 1 : cfg.selectors.size();
  if (!selector_sweep && cfg.selectors.empty())
    throw std::invalid_argument("selector list is empty");

  // Simulation graphs: edge probabilities drawn once, or per resample.
  const std::size_t graph_variants = cfg.redraw_probabilities ? cfg.resamples : 1;
  std::vector<DirectedGraph> sim_graphs;
  std::vector<Dag> dags;
  sim_graphs.reserve(graph_variants);
  dags.reserve(graph_variants);
  for (std::size_t i = 0; i < graph_variants; ++i) {
    sim_graphs.push_back(assign_edge_probabilities(
        structural_graph, derive_seed(master, SeedStream::EdgeProbs, i)));
    dags.push_back(build_dag(sim_graphs.back()));
  }

  SuiteResult result;
  result.config = cfg;
  result.default_alpha = default_alpha;

  const std::size_t total = points.size() * selector_count * cfg.resamples;
  result.rows.assign(total, SweepRow{});
  parallel_for(total, jobs, [&](std::size_t idx) {
    const std::size_t point_idx = idx / (selector_count * cfg.resamples);
    const std::size_t rest = idx % (selector_count * cfg.resamples);
    const std::size_t selector_idx = rest / cfg.resamples;
    const std::uint32_t resample = static_cast<std::uint32_t>(rest % cfg.resamples);

    const SweepPoint& pt = points[point_idx];
    const Selector sel =
        pt.forced_selector ? *pt.forced_selector : cfg.selectors[selector_idx];
    const DirectedGraph& g = sim_graphs[cfg.redraw_probabilities ? resample : 0];
    const Dag& dag = dags[cfg.redraw_probabilities ? resample : 0];

    const auto started = std::chrono::steady_clock::now();

    const auto [rumor, prospects] =
        pick_seed_sets(g, pt.rumor_count, cfg.prospect_count,
                       derive_seed(master, SeedStream::SeedSets, resample));
    const BiasTable biases =
        assign_biases(g, rumor, prospects, derive_seed(master, SeedStream::Biases, resample));
    const std::vector<ScoredCandidate> picked =
        run_selector(sel, g, dag, rumor, prospects, biases, pt, cfg, master, resample);
    std::vector<NodeId> campaigners;
    campaigners.reserve(picked.size());
    for (const ScoredCandidate& c : picked) campaigners.push_back(c.node);

    SweepRow row;
    row.selector = sel;
    row.sweep_value = pt.text;
    row.resample = resample;
    row.rule = pt.rule;
    row.alpha = pt.alpha;
    row.metrics = percent_saved(g, rumor, campaigners, biases, pt.rule, pt.alpha,
                                cfg.repetitions, derive_seed(master, SeedStream::Evaluation,
                                                             resample),
                                1);
    if (cfg.timing) {
      row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    }
    result.rows[idx] = std::move(row);
  });

  // Aggregate the resample axis.
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t s = 0; s < selector_count; ++s) {
      const std::size_t first = (p * selector_count + s) * cfg.resamples;
      AggregateRow agg;
      agg.selector = result.rows[first].selector;
      agg.sweep_value = result.rows[first].sweep_value;
      agg.rule = result.rows[first].rule;
      double sum = 0.0, sum_sq = 0.0;
      for (std::uint32_t r = 0; r < cfg.resamples; ++r) {
        const SweepRow& row = result.rows[first + r];
        sum += row.metrics.saved_pct;
        sum_sq += row.metrics.saved_pct * row.metrics.saved_pct;
        agg.reduction_mean += row.metrics.reduction_pct;
        agg.mean_s += row.metrics.mean_s;
        agg.mean_it += row.metrics.mean_it;
      }
      const double cnt = static_cast<double>(cfg.resamples);
      agg.saved_mean = sum / cnt;
      agg.reduction_mean /= cnt;
      agg.mean_s /= cnt;
      agg.mean_it /= cnt;
      if (cfg.resamples > 1)
        agg.saved_std =
            std::sqrt(std::max(0.0, (sum_sq - sum * sum / cnt) / (cnt - 1.0)));
      result.aggregates.push_back(std::move(agg));
    }
  }

  return result;
}

SuiteResult run_suite(const ExperimentConfig& cfg, unsigned jobs) {
  if (cfg.graph_path.empty()) throw std::invalid_argument("graph_path is not set");
  const LoadResult loaded = load_edge_list_file(cfg.graph_path, cfg.directed);
  return run_suite(cfg, loaded.graph, jobs);
}

namespace {

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return std::string(buf);
}

}  // namespace

void write_suite_csv(const SuiteResult& result, std::ostream& out) {
  out << "# cicmb " << kVersion << " config=" << config_hash_hex(result.config) << '\n';
  out << "selector,sweep_param,sweep_value,resample,saved_pct,reduction_pct,mean_S,mean_IT,"
         "stddev_saved,runtime_ms\n";
  const std::string param =
      result.config.sweep_param.empty() ? "none" : result.config.sweep_param;
  for (const SweepRow& row : result.rows) {
    out << selector_name(row.selector) << ',' << param << ',' << row.sweep_value << ','
        << row.resample << ',' << fixed6(row.metrics.saved_pct) << ','
        << fixed6(row.metrics.reduction_pct) << ',' << fixed6(row.metrics.mean_s) << ','
        << fixed6(row.metrics.mean_it) << ',' << fixed6(row.metrics.stddev_saved) << ','
        << row.runtime_ms << '\n';
  }
}

std::vector<std::string> write_plot_tsvs(const SuiteResult& result,
                                         const std::string& csv_path) {
  std::string stem = csv_path;
  const std::size_t dot = stem.find_last_of('.');
  const std::size_t slash = stem.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    stem.resize(dot);

  // Selector column order: first appearance in the aggregates.
  std::vector<Selector> cols;
  for (const AggregateRow& agg : result.aggregates)
    if (std::find(cols.begin(), cols.end(), agg.selector) == cols.end())
      cols.push_back(agg.selector);

  std::vector<BiasRule> rules;
  for (const AggregateRow& agg : result.aggregates)
    if (std::find(rules.begin(), rules.end(), agg.rule) == rules.end())
      rules.push_back(agg.rule);

  std::vector<std::string> written;
  for (BiasRule rule : rules) {
    const std::string path = stem + "_" + std::string(bias_rule_name(rule)) + ".tsv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot file: " + path);
    out << "# cicmb " << kVersion << " config=" << config_hash_hex(result.config) << '\n';
    out << "sweep_value";
    for (Selector s : cols) out << '\t' << selector_name(s) << "_saved_mean\t"
                                << selector_name(s) << "_saved_std";
    out << '\n';

    // Preserve sweep-value order of first appearance.
    std::vector<std::string> values;
    for (const AggregateRow& agg : result.aggregates)
      if (agg.rule == rule &&
          std::find(values.begin(), values.end(), agg.sweep_value) == values.end())
        values.push_back(agg.sweep_value);

    for (const std::string& value : values) {
      out << value;
      for (Selector s : cols) {
        const AggregateRow* found = nullptr;
        for (const AggregateRow& agg : result.aggregates)
          if (agg.rule == rule && agg.sweep_value == value && agg.selector == s) {
            found = &agg;
            break;
          }
        if (found)
          out << '\t' << fixed6(found->saved_mean) << '\t' << fixed6(found->saved_std);
        else
          out << "\t\t";
      }
      out << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace cicmb
