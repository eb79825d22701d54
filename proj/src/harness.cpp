#include "uard/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace uard {

const char kEpisodeCsvHeader[] =
    "episode,true_return,observed_return,trap_visits,abstentions,"
    "goal_reached,mean_sigma_m,mean_sigma_h,epsilon";

namespace {

namespace fs = std::filesystem;

std::string fmt_fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string fmt_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

std::string fmt_general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

[[noreturn]] void config_error(const std::string& where,
                               const std::string& message) {
  throw std::runtime_error(where + ": " + message);
}

double parse_double_value(const std::string& where, const std::string& key,
                          const std::string& value, double lo, double hi,
                          const char* domain) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    if (v < lo || v > hi) throw std::out_of_range("outside domain");
    return v;
  } catch (const std::exception&) {
    config_error(where, "value '" + value + "' for key '" + key +
                            "' is invalid (expected " + domain + ")");
  }
}

long long parse_int_value(const std::string& where, const std::string& key,
                          const std::string& value, long long lo,
                          long long hi, const char* domain) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    if (v < lo || v > hi) throw std::out_of_range("outside domain");
    return v;
  } catch (const std::exception&) {
    config_error(where, "value '" + value + "' for key '" + key +
                            "' is invalid (expected " + domain + ")");
  }
}

std::uint64_t parse_u64_value(const std::string& where, const std::string& key,
                              const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    config_error(where, "value '" + value + "' for key '" + key +
                            "' is invalid (expected unsigned 64-bit integer)");
  }
}

bool parse_bool_value(const std::string& where, const std::string& key,
                      const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no" || value == "off") {
    return false;
  }
  config_error(where, "value '" + value + "' for key '" + key +
                          "' is invalid (expected boolean true/false)");
}

std::vector<double> parse_double_list(const std::string& where,
                                      const std::string& key,
                                      const std::string& value, double lo,
                                      double hi, const char* domain) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double_value(where, key, item, lo, hi, domain));
  }
  if (out.empty()) {
    config_error(where, "key '" + key + "' needs a non-empty list");
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

AnnotatorProfile& profile_by_kind(ExperimentSpec& spec, AnnotatorKind kind,
                                  const std::string& where,
                                  const std::string& key) {
  for (AnnotatorProfile& p : spec.annotators) {
    if (p.kind == kind) return p;
  }
  config_error(where, "key '" + key +
                          "' targets an annotator kind absent from the "
                          "current profile set");
}

std::string variant_label(const std::string& name, const std::string& suffix) {
  return suffix.empty() ? name : name + "_" + suffix;
}

struct RunRequest {
  std::string label;         // output subdirectory and report row name
  TrainingConfig config;
};

std::vector<RunSummary> execute_runs(const std::vector<RunRequest>& requests,
                                     int jobs) {
  std::vector<RunSummary> results(requests.size());
  const int workers = std::max(
      1, std::min<int>(jobs, static_cast<int>(requests.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < requests.size(); ++i) {
      results[i] = run_training(requests[i].config);
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= requests.size()) return;
        results[i] = run_training(requests[i].config);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return results;
}

void write_episode_csv(const fs::path& path,
                       const std::vector<EpisodeMetrics>& episodes) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  os << kEpisodeCsvHeader << '\n';
  for (const EpisodeMetrics& e : episodes) {
    os << e.episode << ',' << fmt_fixed(e.true_return) << ','
       << fmt_fixed(e.observed_return) << ',' << e.trap_visits << ','
       << e.abstentions << ',' << (e.goal_reached ? 1 : 0) << ','
       << fmt_fixed(e.mean_sigma_m) << ',' << fmt_fixed(e.mean_sigma_h) << ','
       << fmt_fixed(e.epsilon) << '\n';
  }
}

// Cross-seed aggregate that tolerates single-seed smoke runs (std 0).
VariantAggregate aggregate_runs(const std::string& label,
                                const std::vector<RunSummary>& runs) {
  if (runs.empty()) {
    throw std::invalid_argument("no runs to aggregate for '" + label + "'");
  }
  VariantAggregate agg;
  if (runs.size() >= 2) {
    agg = aggregate(runs);
  } else {
    const RunSummary& r = runs.front();
    agg.n_runs = 1;
    agg.true_return = {r.final_window.true_return.mean, 0.0};
    agg.observed_return = {r.final_window.observed_return.mean, 0.0};
    agg.trap_visits = {r.final_window.trap_visits.mean, 0.0};
    agg.alignment_gap = {r.alignment_gap, 0.0};
    agg.goal_rate = {r.final_window.goal_rate, 0.0};
    agg.abstention_rate = {r.final_window.abstention_rate, 0.0};
  }
  agg.variant_name = label;
  return agg;
}

void write_aggregate_csv(const fs::path& path,
                         const std::vector<VariantAggregate>& aggs) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  os << "variant,n_runs,true_return_mean,true_return_std,"
        "observed_return_mean,observed_return_std,trap_visits_mean,"
        "trap_visits_std,alignment_gap_mean,alignment_gap_std,"
        "goal_rate_mean,goal_rate_std,abstention_rate_mean,"
        "abstention_rate_std\n";
  for (const VariantAggregate& a : aggs) {
    os << a.variant_name << ',' << a.n_runs << ','
       << fmt_fixed(a.true_return.mean) << ',' << fmt_fixed(a.true_return.std)
       << ',' << fmt_fixed(a.observed_return.mean) << ','
       << fmt_fixed(a.observed_return.std) << ','
       << fmt_fixed(a.trap_visits.mean) << ',' << fmt_fixed(a.trap_visits.std)
       << ',' << fmt_fixed(a.alignment_gap.mean) << ','
       << fmt_fixed(a.alignment_gap.std) << ',' << fmt_fixed(a.goal_rate.mean)
       << ',' << fmt_fixed(a.goal_rate.std) << ','
       << fmt_fixed(a.abstention_rate.mean) << ','
       << fmt_fixed(a.abstention_rate.std) << '\n';
  }
}

std::vector<double> trap_visit_samples(const std::vector<RunSummary>& runs) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const RunSummary& r : runs) {
    out.push_back(r.final_window.trap_visits.mean);
  }
  return out;
}

std::optional<SampleStats> trap_sample_stats(
    const std::vector<RunSummary>& runs) {
  if (runs.size() < 2) return std::nullopt;
  const MeanStd ms = mean_std(trap_visit_samples(runs));
  return SampleStats{ms.mean, ms.std, static_cast<int>(runs.size())};
}

void write_summary_table(std::ostream& os,
                         const std::vector<VariantAggregate>& aggs) {
  os << "| Variant | True return | Observed return | Trap visits | "
        "Alignment gap | Goal rate | Abstentions/ep |\n";
  os << "|---|---|---|---|---|---|---|\n";
  for (const VariantAggregate& a : aggs) {
    os << "| " << a.variant_name << " | " << fmt_fixed(a.true_return.mean, 2)
       << " ± " << fmt_fixed(a.true_return.std, 2) << " | "
       << fmt_fixed(a.observed_return.mean, 2) << " ± "
       << fmt_fixed(a.observed_return.std, 2) << " | "
       << fmt_fixed(a.trap_visits.mean, 2) << " ± "
       << fmt_fixed(a.trap_visits.std, 2) << " | "
       << fmt_fixed(a.alignment_gap.mean, 2) << " ± "
       << fmt_fixed(a.alignment_gap.std, 2) << " | "
       << fmt_fixed(a.goal_rate.mean, 3) << " | "
       << fmt_fixed(a.abstention_rate.mean, 3) << " |\n";
  }
}

const VariantAggregate* find_aggregate(
    const std::vector<VariantAggregate>& aggs, const std::string& label) {
  for (const VariantAggregate& a : aggs) {
    if (a.variant_name == label) return &a;
  }
  return nullptr;
}

void write_reduction_table(std::ostream& os,
                           const std::vector<VariantAggregate>& aggs,
                           const std::string& baseline_label) {
  const VariantAggregate* base = find_aggregate(aggs, baseline_label);
  if (base == nullptr || base->trap_visits.mean <= 0.0) return;
  os << "\n## Trap-visit reduction vs " << baseline_label << "\n\n";
  os << "| Variant | Reduction (%) |\n|---|---|\n";
  for (const VariantAggregate& a : aggs) {
    if (a.variant_name == baseline_label) continue;
    os << "| " << a.variant_name << " | "
       << fmt_fixed(
              reduction_percent(base->trap_visits.mean, a.trap_visits.mean),
              2)
       << " |\n";
  }
}

void write_t_test_section(std::ostream& os, const ReportBundle& bundle,
                          const std::string& label_a,
                          const std::string& label_b) {
  std::optional<SampleStats> a_stats, b_stats;
  for (std::size_t i = 0; i < bundle.labels.size(); ++i) {
    if (bundle.labels[i] == label_a) a_stats = trap_sample_stats(bundle.runs[i]);
    if (bundle.labels[i] == label_b) b_stats = trap_sample_stats(bundle.runs[i]);
  }
  if (!a_stats || !b_stats) return;
  const TTestResult welch = welch_t_test(*a_stats, *b_stats);
  const TTestResult pooled = pooled_t_test(*a_stats, *b_stats);
  os << "\n## Trap-visit significance: " << label_a << " vs " << label_b
     << "\n\n";
  os << "| Test | t | df | p (two-sided) |\n|---|---|---|---|\n";
  os << "| Welch | " << fmt_fixed(welch.t, 4) << " | "
     << fmt_fixed(welch.df, 4) << " | " << fmt_sci(welch.p) << " |\n";
  os << "| Pooled | " << fmt_fixed(pooled.t, 4) << " | "
     << fmt_fixed(pooled.df, 4) << " | " << fmt_sci(pooled.p) << " |\n";
}

std::string describe_spec(const ExperimentSpec& spec) {
  const GridWorldConfig g = make_preset(spec.grid);
  std::ostringstream os;
  os << "Grid " << g.height << "x" << g.width << ", " << spec.n_seeds
     << " seeds x " << spec.n_episodes << " episodes, base seed "
     << spec.base_seed << ", lambda " << fmt_general(spec.filter.lambda)
     << ", alpha " << fmt_general(spec.filter.alpha) << ", beta "
     << fmt_general(spec.filter.beta) << ", mode "
     << (spec.mode == DiscountMode::ScoreFilter ? "score" : "reward")
     << (spec.hard_trap ? ", hard trap" : "")
     << (spec.abstention_enabled ? ", abstention on" : "") << ".";
  return os.str();
}

struct SuiteRuns {
  std::vector<std::string> labels;
  std::vector<std::vector<RunSummary>> by_label;
  std::vector<fs::path> csv_paths;
};

SuiteRuns execute_and_dump(const fs::path& suite_dir,
                           const std::vector<std::string>& labels,
                           const std::vector<RunRequest>& requests,
                           int jobs, int n_seeds) {
  fs::create_directories(suite_dir);
  const std::vector<RunSummary> flat = execute_runs(requests, jobs);
  SuiteRuns out;
  out.labels = labels;
  out.by_label.resize(labels.size());
  std::size_t idx = 0;
  for (std::size_t li = 0; li < labels.size(); ++li) {
    const fs::path label_dir = suite_dir / labels[li];
    fs::create_directories(label_dir);
    out.by_label[li].reserve(static_cast<std::size_t>(n_seeds));
    for (int k = 0; k < n_seeds; ++k, ++idx) {
      const fs::path csv = label_dir / ("seed_" + std::to_string(k) + ".csv");
      write_episode_csv(csv, flat[idx].episodes);
      out.csv_paths.push_back(csv);
      // Round-trip through the CSV so every downstream number is a pure
      // function of the emitted files; recomputing from disk then matches
      // the original aggregates byte for byte.
      RunSummary run = flat[idx];
      run.episodes = read_episode_csv(csv);
      run.final_window = compute_final_window(run.episodes);
      run.alignment_gap = compute_alignment_gap(run.episodes);
      out.by_label[li].push_back(std::move(run));
    }
  }
  return out;
}

ReportBundle assemble_bundle(const fs::path& suite_dir, SuiteRuns&& runs) {
  ReportBundle bundle;
  bundle.suite_dir = suite_dir;
  bundle.run_csvs = std::move(runs.csv_paths);
  bundle.labels = std::move(runs.labels);
  bundle.runs = std::move(runs.by_label);
  bundle.aggregates.reserve(bundle.labels.size());
  for (std::size_t i = 0; i < bundle.labels.size(); ++i) {
    bundle.aggregates.push_back(
        aggregate_runs(bundle.labels[i], bundle.runs[i]));
  }
  bundle.aggregate_csv = suite_dir / "aggregate.csv";
  write_aggregate_csv(bundle.aggregate_csv, bundle.aggregates);
  bundle.report_md = suite_dir / "report.md";
  return bundle;
}

void note_source_files(std::ostream& os) {
  os << "\nSource data: `aggregate.csv`; per-run series in "
        "`<variant>/seed_<k>.csv` (all table numbers are recomputable "
        "from them).\n";
}

double least_squares_slope(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return den == 0.0 ? 0.0 : num / den;
}

}  // namespace

std::vector<VariantSpec> ExperimentSpec::resolved_variants() const {
  std::vector<VariantSpec> out;
  if (variants.empty()) {
    const auto& all = VariantSpec::all();
    out.assign(all.begin(), all.end());
    return out;
  }
  out.reserve(variants.size());
  for (const std::string& name : variants) {
    out.push_back(VariantSpec::by_name(name));
  }
  return out;
}

void ExperimentSpec::validate() const {
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
  if (n_episodes < 0) throw std::invalid_argument("n_episodes must be >= 0");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  filter.validate();
  policy.validate();
  if (noise_level < 0.0 || noise_level > 1.0) {
    throw std::invalid_argument("noise level must be in [0, 1]");
  }
  if (noise_levels.empty()) {
    throw std::invalid_argument("noise_levels must be non-empty");
  }
  for (const double level : noise_levels) {
    if (level < 0.0 || level > 1.0) {
      throw std::invalid_argument("noise levels must be in [0, 1]");
    }
  }
  if (lambdas.empty()) {
    throw std::invalid_argument("lambdas must be non-empty");
  }
  for (const double l : lambdas) {
    if (l < 0.0) throw std::invalid_argument("lambdas must be >= 0");
  }
  if (annotators.size() < 2) {
    throw std::invalid_argument("need >= 2 annotators");
  }
  resolved_variants();
}

ExperimentSpec parse_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot read config file '" + path.string() +
                             "'");
  }
  ExperimentSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      config_error(where, "expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) config_error(where, "empty key");
    if (value.empty()) {
      config_error(where, "key '" + key + "' has an empty value");
    }
    apply_config_entry(spec, key, value, where);
  }
  return spec;
}

void apply_config_entry(ExperimentSpec& spec, const std::string& key,
                        const std::string& value, const std::string& where) {
  if (key == "grid") {
    const long long g =
        parse_int_value(where, key, value, 6, 10, "one of 6, 8, 10");
    if (g == 6) {
      spec.grid = GridSize::G6;
    } else if (g == 8) {
      spec.grid = GridSize::G8;
    } else if (g == 10) {
      spec.grid = GridSize::G10;
    } else {
      config_error(where, "value '" + value + "' for key 'grid' is invalid "
                          "(expected one of 6, 8, 10)");
    }
  } else if (key == "variants" || key == "variant") {
    spec.variants.clear();
    if (value != "all") {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string name = trim(item);
        VariantSpec::by_name(name);  // validates, throws with the valid set
        spec.variants.push_back(name);
      }
    }
  } else if (key == "seeds") {
    spec.n_seeds = static_cast<int>(
        parse_int_value(where, key, value, 1, 1000000, "integer >= 1"));
  } else if (key == "episodes") {
    spec.n_episodes = static_cast<int>(
        parse_int_value(where, key, value, 0, 100000000, "integer >= 0"));
  } else if (key == "base_seed") {
    spec.base_seed = parse_u64_value(where, key, value);
  } else if (key == "lambda") {
    spec.filter.lambda =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "alpha") {
    spec.filter.alpha =
        parse_double_value(where, key, value, 0.0, 1.0, "number in [0, 1]");
  } else if (key == "beta") {
    spec.filter.beta =
        parse_double_value(where, key, value, 0.0, 1.0, "number in [0, 1]");
  } else if (key == "lambda_min") {
    spec.filter.lambda_min =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "lambda_max") {
    spec.filter.lambda_max =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "adaptive") {
    spec.filter.adaptive = parse_bool_value(where, key, value);
  } else if (key == "abstain_threshold") {
    spec.filter.abstain_threshold =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "lambdas") {
    spec.lambdas =
        parse_double_list(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "noise_levels") {
    spec.noise_levels =
        parse_double_list(where, key, value, 0.0, 1.0, "number in [0, 1]");
  } else if (key == "noise") {
    spec.noise_level =
        parse_double_value(where, key, value, 0.0, 1.0, "number in [0, 1]");
  } else if (key == "mode") {
    if (value == "score") {
      spec.mode = DiscountMode::ScoreFilter;
    } else if (value == "reward") {
      spec.mode = DiscountMode::RewardFilter;
    } else {
      config_error(where, "value '" + value + "' for key 'mode' is invalid "
                          "(expected score or reward)");
    }
  } else if (key == "hard_trap") {
    spec.hard_trap = parse_bool_value(where, key, value);
  } else if (key == "abstain") {
    spec.abstention_enabled = parse_bool_value(where, key, value);
  } else if (key == "perturb_enabled") {
    spec.perturbation.enabled = parse_bool_value(where, key, value);
  } else if (key == "perturb_step") {
    spec.perturbation.trigger_step =
        parse_int_value(where, key, value, 0, 1LL << 50, "integer >= 0");
  } else if (key == "perturb_magnitude") {
    spec.perturbation.magnitude = static_cast<int>(
        parse_int_value(where, key, value, 0, 1000, "integer >= 0"));
  } else if (key == "epsilon_start") {
    spec.policy.epsilon_start =
        parse_double_value(where, key, value, 0.0, 1.0, "number in [0, 1]");
  } else if (key == "epsilon_decay") {
    spec.policy.epsilon_decay =
        parse_double_value(where, key, value, 1e-9, 1.0, "number in (0, 1]");
  } else if (key == "epsilon_min") {
    spec.policy.epsilon_min =
        parse_double_value(where, key, value, 0.0, 1.0, "number in [0, 1]");
  } else if (key == "tie_break") {
    if (value == "lowest") {
      spec.policy.tie_break = TieBreak::LowestActionIndex;
    } else if (value == "random") {
      spec.policy.tie_break = TieBreak::RandomUniform;
    } else {
      config_error(where, "value '" + value + "' for key 'tie_break' is "
                          "invalid (expected lowest or random)");
    }
  } else if (key == "n_heads") {
    spec.n_heads = static_cast<int>(
        parse_int_value(where, key, value, 2, 1000, "integer >= 2"));
  } else if (key == "init_scale") {
    spec.init_scale =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "learning_rate") {
    spec.learning_rate =
        parse_double_value(where, key, value, 1e-12, 1.0, "number in (0, 1]");
  } else if (key == "discount_factor") {
    spec.discount_factor = parse_double_value(where, key, value, 0.0,
                                              0.999999, "number in [0, 1)");
  } else if (key == "out") {
    spec.out_dir = value;
  } else if (key == "jobs") {
    spec.jobs = static_cast<int>(
        parse_int_value(where, key, value, 1, 4096, "integer >= 1"));
  } else if (key == "conservative_trap_bias") {
    profile_by_kind(spec, AnnotatorKind::Conservative, where, key).trap_bias =
        parse_double_value(where, key, value, -1e9, 1e9, "number");
  } else if (key == "conservative_noise_std") {
    profile_by_kind(spec, AnnotatorKind::Conservative, where, key).noise_std =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "conservative_trap_noise_std") {
    profile_by_kind(spec, AnnotatorKind::Conservative, where, key)
        .trap_noise_std =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "mildly_tempted_trap_bias") {
    profile_by_kind(spec, AnnotatorKind::MildlyTempted, where, key).trap_bias =
        parse_double_value(where, key, value, -1e9, 1e9, "number");
  } else if (key == "mildly_tempted_noise_std") {
    profile_by_kind(spec, AnnotatorKind::MildlyTempted, where, key).noise_std =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "mildly_tempted_trap_noise_std") {
    profile_by_kind(spec, AnnotatorKind::MildlyTempted, where, key)
        .trap_noise_std =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "stochastic_trap_bias") {
    profile_by_kind(spec, AnnotatorKind::Stochastic, where, key).trap_bias =
        parse_double_value(where, key, value, -1e9, 1e9, "number");
  } else if (key == "stochastic_noise_std") {
    profile_by_kind(spec, AnnotatorKind::Stochastic, where, key).noise_std =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else if (key == "stochastic_trap_noise_std") {
    profile_by_kind(spec, AnnotatorKind::Stochastic, where, key)
        .trap_noise_std =
        parse_double_value(where, key, value, 0.0, 1e9, "number >= 0");
  } else {
    config_error(where, "key '" + key + "' is not recognized");
  }
}

TrainingConfig make_training_config(const ExperimentSpec& spec,
                                    const VariantSpec& variant,
                                    int seed_index,
                                    const std::string& stream_label) {
  TrainingConfig config;
  config.env = make_preset(spec.grid);
  if (spec.hard_trap) config.env.observed_trap_reward = 8.0;
  config.variant = variant;
  config.filter = spec.filter;
  config.mode = spec.mode;
  config.policy = spec.policy;
  config.noise = NoiseSpec::from_level(spec.noise_level,
                                       config.env.goal_reward);
  config.perturbation = spec.perturbation;
  config.annotators = spec.annotators;
  config.abstention_enabled = spec.abstention_enabled;
  config.n_episodes = spec.n_episodes;
  config.n_heads = spec.n_heads;
  config.init_scale = spec.init_scale;
  config.learning_rate = spec.learning_rate;
  config.discount_factor = spec.discount_factor;
  config.rng_seed = derive_stream(spec.base_seed,
                                  static_cast<std::uint64_t>(seed_index),
                                  stream_label);
  config.seed_label = spec.base_seed + static_cast<std::uint64_t>(seed_index);
  return config;
}

ReportBundle run_suite(const ExperimentSpec& spec) {
  spec.validate();
  const fs::path suite_dir = fs::path(spec.out_dir) / "suite";
  const std::vector<VariantSpec> variants = spec.resolved_variants();

  std::vector<std::string> labels;
  std::vector<RunRequest> requests;
  for (const VariantSpec& variant : variants) {
    labels.push_back(variant.name);
    for (int k = 0; k < spec.n_seeds; ++k) {
      requests.push_back(RunRequest{
          variant.name,
          make_training_config(spec, variant, k, "suite/" + variant.name)});
    }
  }

  ReportBundle bundle = assemble_bundle(
      suite_dir, execute_and_dump(suite_dir, labels, requests, spec.jobs,
                                  spec.n_seeds));

  std::ofstream os(bundle.report_md);
  os << "# Variant suite\n\n" << describe_spec(spec) << "\n\n";
  os << "## Final-window aggregates (last 100 episodes, mean ± std across "
        "seeds)\n\n";
  write_summary_table(os, bundle.aggregates);
  note_source_files(os);
  write_reduction_table(os, bundle.aggregates, "Baseline");
  write_t_test_section(os, bundle, "Baseline", "UARD-Full");
  return bundle;
}

ReportBundle run_noise_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const fs::path suite_dir = fs::path(spec.out_dir) / "noise-sweep";
  const std::array<VariantSpec, 2> variants{
      VariantSpec::by_name("Baseline"), VariantSpec::by_name("UARD-Full")};

  std::vector<std::string> labels;
  std::vector<RunRequest> requests;
  for (const VariantSpec& variant : variants) {
    for (const double level : spec.noise_levels) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "noise%02d",
                    static_cast<int>(std::lround(level * 100)));
      const std::string label = variant_label(variant.name, suffix);
      labels.push_back(label);
      ExperimentSpec leveled = spec;
      leveled.noise_level = level;
      for (int k = 0; k < spec.n_seeds; ++k) {
        requests.push_back(RunRequest{
            label, make_training_config(leveled, variant, k,
                                        "noise-sweep/" + label)});
      }
    }
  }

  ReportBundle bundle = assemble_bundle(
      suite_dir, execute_and_dump(suite_dir, labels, requests, spec.jobs,
                                  spec.n_seeds));

  std::ofstream os(bundle.report_md);
  os << "# Supervisory-noise sweep\n\n" << describe_spec(spec) << "\n\n";
  os << "Noise levels:";
  for (const double level : spec.noise_levels) {
    os << ' ' << fmt_general(level);
  }
  os << " (annotation noise std = level x goal reward).\n\n";
  os << "## Final-window aggregates\n\n";
  write_summary_table(os, bundle.aggregates);
  note_source_files(os);

  os << "\n## Trap visits by noise level\n\n";
  os << "| Level | Baseline | UARD-Full | Reduction (%) |\n|---|---|---|---|\n";
  std::vector<double> levels, base_means, uard_means;
  for (const double level : spec.noise_levels) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "noise%02d",
                  static_cast<int>(std::lround(level * 100)));
    const VariantAggregate* base =
        find_aggregate(bundle.aggregates, variant_label("Baseline", suffix));
    const VariantAggregate* uard =
        find_aggregate(bundle.aggregates, variant_label("UARD-Full", suffix));
    if (base == nullptr || uard == nullptr) continue;
    levels.push_back(level);
    base_means.push_back(base->trap_visits.mean);
    uard_means.push_back(uard->trap_visits.mean);
    os << "| " << fmt_general(level) << " | "
       << fmt_fixed(base->trap_visits.mean, 2) << " ± "
       << fmt_fixed(base->trap_visits.std, 2) << " | "
       << fmt_fixed(uard->trap_visits.mean, 2) << " ± "
       << fmt_fixed(uard->trap_visits.std, 2) << " | "
       << (base->trap_visits.mean > 0.0
               ? fmt_fixed(reduction_percent(base->trap_visits.mean,
                                             uard->trap_visits.mean),
                           2)
               : std::string("n/a"))
       << " |\n";
  }
  if (levels.size() >= 2) {
    const double base_slope = least_squares_slope(levels, base_means);
    const double uard_slope = least_squares_slope(levels, uard_means);
    os << "\nTrap-visit slope over noise level: Baseline "
       << fmt_fixed(base_slope, 4) << ", UARD-Full "
       << fmt_fixed(uard_slope, 4) << "; slope ratio (UARD/Baseline) "
       << (base_slope != 0.0 ? fmt_fixed(uard_slope / base_slope, 4)
                             : std::string("undefined (flat baseline)"))
       << ".\n";
  }
  return bundle;
}

ReportBundle run_lambda_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const fs::path suite_dir = fs::path(spec.out_dir) / "lambda-sweep";
  const VariantSpec baseline = VariantSpec::by_name("Baseline");
  const VariantSpec uard = VariantSpec::by_name("UARD-Full");

  std::vector<std::string> labels{baseline.name};
  std::vector<RunRequest> requests;
  for (int k = 0; k < spec.n_seeds; ++k) {
    requests.push_back(RunRequest{
        baseline.name, make_training_config(spec, baseline, k,
                                            "lambda-sweep/" + baseline.name)});
  }
  for (const double lambda : spec.lambdas) {
    const std::string label =
        variant_label(uard.name, "lambda" + std::string(fmt_general(lambda)));
    labels.push_back(label);
    ExperimentSpec swept = spec;
    swept.filter.lambda = lambda;
    for (int k = 0; k < spec.n_seeds; ++k) {
      requests.push_back(RunRequest{
          label,
          make_training_config(swept, uard, k, "lambda-sweep/" + label)});
    }
  }

  ReportBundle bundle = assemble_bundle(
      suite_dir, execute_and_dump(suite_dir, labels, requests, spec.jobs,
                                  spec.n_seeds));

  std::ofstream os(bundle.report_md);
  os << "# Skepticism (lambda) sweep\n\n" << describe_spec(spec) << "\n\n";
  os << "Swept lambda values:";
  for (const double lambda : spec.lambdas) os << ' ' << fmt_general(lambda);
  os << ". Baseline rows use no discounting and anchor the reductions.\n\n";
  os << "## Final-window aggregates\n\n";
  write_summary_table(os, bundle.aggregates);
  note_source_files(os);

  const VariantAggregate* base = find_aggregate(bundle.aggregates, "Baseline");
  if (base != nullptr && base->trap_visits.mean > 0.0) {
    os << "\n## Reduction and goal rate by lambda\n\n";
    os << "| Lambda | Trap visits | Reduction (%) | Goal rate |\n"
          "|---|---|---|---|\n";
    for (const double lambda : spec.lambdas) {
      const std::string label = variant_label(
          uard.name, "lambda" + std::string(fmt_general(lambda)));
      const VariantAggregate* agg = find_aggregate(bundle.aggregates, label);
      if (agg == nullptr) continue;
      os << "| " << fmt_general(lambda) << " | "
         << fmt_fixed(agg->trap_visits.mean, 2) << " ± "
         << fmt_fixed(agg->trap_visits.std, 2) << " | "
         << fmt_fixed(reduction_percent(base->trap_visits.mean,
                                        agg->trap_visits.mean),
                      2)
         << " | " << fmt_fixed(agg->goal_rate.mean, 3) << " |\n";
    }
  }
  return bundle;
}

std::filesystem::path run_filter_curves(const ExperimentSpec& spec) {
  const fs::path suite_dir = fs::path(spec.out_dir) / "filter-curves";
  fs::create_directories(suite_dir);
  const fs::path csv_path = suite_dir / "curves.csv";

  const std::vector<double> mus = {1.0, 5.0, 10.0};
  const std::vector<double> lambdas = {1.0, 2.0, 5.0};
  std::vector<double> sigmas;
  for (int i = 0; i <= 100; ++i) sigmas.push_back(0.05 * i);

  const std::vector<FilterCurvePoint> points =
      filter_curves(mus, lambdas, sigmas);
  std::ofstream os(csv_path);
  if (!os) {
    throw std::runtime_error("cannot open '" + csv_path.string() +
                             "' for writing");
  }
  os << "variant,mu,lambda,sigma,j\n";
  for (const FilterCurvePoint& p : points) {
    const char* name = p.variant == FilterVariant::Reciprocal
                           ? "Reciprocal"
                           : (p.variant == FilterVariant::LinearSubtraction
                                  ? "LinearSubtraction"
                                  : "ExponentialDecay");
    os << name << ',' << fmt_fixed(p.mu) << ',' << fmt_fixed(p.lambda) << ','
       << fmt_fixed(p.sigma) << ',' << fmt_fixed(p.j) << '\n';
  }
  return csv_path;
}

ReportBundle run_ood_test(const ExperimentSpec& spec) {
  ExperimentSpec perturbed = spec;
  perturbed.perturbation.enabled = true;
  perturbed.validate();
  const fs::path suite_dir = fs::path(spec.out_dir) / "ood-test";
  const std::array<VariantSpec, 2> variants{
      VariantSpec::by_name("Baseline"), VariantSpec::by_name("UARD-Full")};

  std::vector<std::string> labels;
  std::vector<RunRequest> requests;
  for (const VariantSpec& variant : variants) {
    labels.push_back(variant.name);
    for (int k = 0; k < spec.n_seeds; ++k) {
      requests.push_back(RunRequest{
          variant.name, make_training_config(perturbed, variant, k,
                                             "ood-test/" + variant.name)});
    }
  }

  ReportBundle bundle = assemble_bundle(
      suite_dir, execute_and_dump(suite_dir, labels, requests, spec.jobs,
                                  spec.n_seeds));

  // Sidecar with the per-run perturbation episode so the post-teleport
  // window analysis below stays recomputable from files alone.
  const fs::path meta_path = suite_dir / "ood_meta.csv";
  {
    std::ofstream meta(meta_path);
    meta << "variant,seed,perturbed_episode\n";
    for (std::size_t li = 0; li < bundle.labels.size(); ++li) {
      for (std::size_t k = 0; k < bundle.runs[li].size(); ++k) {
        meta << bundle.labels[li] << ',' << k << ','
             << bundle.runs[li][k].perturbed_episode << '\n';
      }
    }
  }

  std::ofstream os(bundle.report_md);
  os << "# Out-of-distribution stress test\n\n"
     << describe_spec(perturbed) << "\n\n";
  os << "Teleport of (+" << perturbed.perturbation.magnitude << ",+"
     << perturbed.perturbation.magnitude << ") applied once per run at "
        "global environment step "
     << perturbed.perturbation.trigger_step << ".\n\n";
  os << "## Final-window aggregates\n\n";
  write_summary_table(os, bundle.aggregates);
  note_source_files(os);

  os << "\n## True-return variance over the 50 episodes after the "
        "perturbation\n\n";
  os << "| Variant | Mean per-run variance |\n|---|---|\n";
  std::vector<double> mean_vars(bundle.labels.size(), 0.0);
  for (std::size_t li = 0; li < bundle.labels.size(); ++li) {
    double sum = 0.0;
    int counted = 0;
    for (const RunSummary& run : bundle.runs[li]) {
      if (run.perturbed_episode < 0) continue;
      const std::size_t begin =
          static_cast<std::size_t>(run.perturbed_episode) + 1;
      if (begin >= run.episodes.size()) continue;
      const std::size_t end = std::min(begin + 50, run.episodes.size());
      if (end - begin < 2) continue;
      std::vector<double> window;
      window.reserve(end - begin);
      for (std::size_t e = begin; e < end; ++e) {
        window.push_back(run.episodes[e].true_return);
      }
      const MeanStd ms = mean_std(window);
      sum += ms.std * ms.std;
      ++counted;
    }
    mean_vars[li] = counted > 0 ? sum / counted : 0.0;
    os << "| " << bundle.labels[li] << " | " << fmt_fixed(mean_vars[li], 4)
       << " |\n";
  }
  if (bundle.labels.size() == 2 && mean_vars[0] > 0.0) {
    os << "\nVariance ratio (UARD-Full / Baseline): "
       << fmt_fixed(mean_vars[1] / mean_vars[0], 4)
       << ". Perturbation episodes per run are listed in `ood_meta.csv`.\n";
  }
  return bundle;
}

std::vector<EpisodeMetrics> read_episode_csv(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot read '" + path.string() + "'");
  }
  std::string line;
  if (!std::getline(is, line) ||
      trim(line) != std::string(kEpisodeCsvHeader)) {
    throw std::runtime_error("'" + path.string() +
                             "' does not start with the per-episode header");
  }
  std::vector<EpisodeMetrics> episodes;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) {
      throw std::runtime_error(path.string() + ":" +
                               std::to_string(line_no) +
                               ": expected 9 comma-separated fields");
    }
    EpisodeMetrics e;
    e.episode = std::stoi(fields[0]);
    e.true_return = std::stod(fields[1]);
    e.observed_return = std::stod(fields[2]);
    e.trap_visits = std::stoi(fields[3]);
    e.abstentions = std::stoi(fields[4]);
    e.goal_reached = std::stoi(fields[5]) != 0;
    e.mean_sigma_m = std::stod(fields[6]);
    e.mean_sigma_h = std::stod(fields[7]);
    e.epsilon = std::stod(fields[8]);
    episodes.push_back(e);
  }
  return episodes;
}

ReportBundle run_stats(const std::filesystem::path& suite_dir) {
  if (!fs::is_directory(suite_dir)) {
    throw std::runtime_error("'" + suite_dir.string() +
                             "' is not a directory");
  }
  std::map<std::string, std::map<int, fs::path>> by_label;
  for (const auto& entry : fs::directory_iterator(suite_dir)) {
    if (!entry.is_directory()) continue;
    const std::string label = entry.path().filename().string();
    for (const auto& file : fs::directory_iterator(entry.path())) {
      const std::string name = file.path().filename().string();
      if (name.rfind("seed_", 0) != 0 || file.path().extension() != ".csv") {
        continue;
      }
      const int k = std::stoi(name.substr(5));
      by_label[label][k] = file.path();
    }
  }
  if (by_label.empty()) {
    throw std::runtime_error("no <label>/seed_<k>.csv files under '" +
                             suite_dir.string() + "'");
  }

  ReportBundle bundle;
  bundle.suite_dir = suite_dir;
  for (const auto& [label, seeds] : by_label) {
    bundle.labels.push_back(label);
    std::vector<RunSummary> runs;
    for (const auto& [k, path] : seeds) {
      RunSummary run;
      run.seed = static_cast<std::uint64_t>(k);
      run.variant_name = label;
      run.episodes = read_episode_csv(path);
      run.final_window = compute_final_window(run.episodes);
      run.alignment_gap = compute_alignment_gap(run.episodes);
      runs.push_back(std::move(run));
      bundle.run_csvs.push_back(path);
    }
    bundle.aggregates.push_back(aggregate_runs(label, runs));
    bundle.runs.push_back(std::move(runs));
  }

  bundle.aggregate_csv = suite_dir / "aggregate.csv";
  write_aggregate_csv(bundle.aggregate_csv, bundle.aggregates);
  bundle.report_md = suite_dir / "report.md";
  std::ofstream os(bundle.report_md);
  os << "# Recomputed aggregates\n\n";
  os << "Rebuilt from the per-episode CSVs under `" << suite_dir.string()
     << "`.\n\n";
  write_summary_table(os, bundle.aggregates);
  note_source_files(os);
  write_reduction_table(os, bundle.aggregates, "Baseline");
  write_t_test_section(os, bundle, "Baseline", "UARD-Full");
  return bundle;
}

}  // namespace uard
