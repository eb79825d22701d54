#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uard/agent.hpp"

namespace uard {

// Fully-resolved description of one experiment family. The same spec type
// drives every subcommand; sweeps read the vector-valued fields.
struct ExperimentSpec {
  GridSize grid = GridSize::G6;
  std::vector<std::string> variants;  // empty means all six
  int n_seeds = 10;
  int n_episodes = 500;
  std::uint64_t base_seed = 42;
  FilterParams filter;                       // lambda 5, alpha = beta = 0.5
  std::vector<double> lambdas = {1.0, 2.0, 5.0, 12.0};
  std::vector<double> noise_levels = {0.0, 0.1, 0.2, 0.3};
  double noise_level = 0.0;                  // single-run supervision noise
  DiscountMode mode = DiscountMode::ScoreFilter;
  bool hard_trap = false;                    // trap observed reward 8 not 4
  PerturbationSpec perturbation{500, 5, false};
  bool abstention_enabled = false;
  PolicyConfig policy;
  std::vector<AnnotatorProfile> annotators = default_profiles();
  int n_heads = 5;
  double init_scale = 0.01;
  double learning_rate = 0.1;
  double discount_factor = 0.95;
  std::string out_dir = "out";
  int jobs = 1;

  std::vector<VariantSpec> resolved_variants() const;
  void validate() const;
};

struct ReportBundle {
  std::filesystem::path suite_dir;
  std::vector<std::filesystem::path> run_csvs;
  std::filesystem::path aggregate_csv;
  std::filesystem::path report_md;
  std::vector<std::string> labels;            // emission order
  std::vector<VariantAggregate> aggregates;   // one per label
  std::vector<std::vector<RunSummary>> runs;  // seed-ordered, per label
};

// Reads a flat key = value config file ('#' comments, UTF-8) over the
// defaults. Unknown keys and malformed values raise std::runtime_error
// naming the key, the line number, and the expected domain.
ExperimentSpec parse_config_file(const std::filesystem::path& path);

// Applies one key/value pair to an ExperimentSpec; `where` prefixes error
// messages
// (file:line for config files, flag name for CLI overrides).
void apply_config_entry(ExperimentSpec& spec, const std::string& key,
                        const std::string& value, const std::string& where);

// Derived per-run training configuration: run i of `label` uses the rng
// stream hash(base_seed, i, "<suite>/<label>") and reports seed
// base_seed + i.
TrainingConfig make_training_config(const ExperimentSpec& spec,
                                    const VariantSpec& variant,
                                    int seed_index,
                                    const std::string& stream_label);

// The variant x seed matrix at the configured single noise level.
ReportBundle run_suite(const ExperimentSpec& spec);

// Baseline and UARD-Full at each noise level, with per-level reductions
// and the trap-visit slope comparison in the report.
ReportBundle run_noise_sweep(const ExperimentSpec& spec);

// UARD-Full across spec.lambdas plus Baseline as the reduction reference.
ReportBundle run_lambda_sweep(const ExperimentSpec& spec);

// Scores the three filter shapes over mu in {1,5,10}, lambda in {1,2,5},
// sigma in [0,5] step 0.05; writes <out>/filter-curves/curves.csv.
std::filesystem::path run_filter_curves(const ExperimentSpec& spec);

// Baseline and UARD-Full with the mid-run teleport enabled; the report
// compares per-episode true-return variance over the 50 episodes after
// the perturbation.
ReportBundle run_ood_test(const ExperimentSpec& spec);

// Recomputes aggregate.csv and report.md from the per-episode CSVs already
// under suite_dir (layout <suite_dir>/<label>/seed_<k>.csv).
ReportBundle run_stats(const std::filesystem::path& suite_dir);

// Per-episode CSV schema, shared by writer, reader, and golden tests.
extern const char kEpisodeCsvHeader[];

std::vector<EpisodeMetrics> read_episode_csv(
    const std::filesystem::path& path);

}  // namespace uard
