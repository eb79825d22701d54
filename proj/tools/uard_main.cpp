#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uard/harness.hpp"

namespace {

struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<int> grid;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::string> variant;
  std::optional<int> seeds;
  std::optional<int> episodes;
  std::optional<double> noise;
  bool hard_trap = false;
  std::optional<std::string> mode;
  bool abstain = false;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::uint64_t> base_seed;
  std::optional<std::string> lambdas;
  std::optional<std::string> noise_levels;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path,
                  "flat key = value config file applied before flags");
  cmd->add_option("--grid", o.grid, "grid preset: 6, 8, or 10")
      ->check(CLI::IsMember({6, 8, 10}));
  cmd->add_option("--lambda", o.lambda, "skepticism coefficient (>= 0)");
  cmd->add_option("--alpha", o.alpha, "model-uncertainty weight in [0, 1]");
  cmd->add_option("--beta", o.beta, "human-uncertainty weight in [0, 1]");
  cmd->add_option("--variant", o.variant,
                  "variant name or 'all' (comma-separated list accepted)");
  cmd->add_option("--seeds", o.seeds, "independent runs per variant");
  cmd->add_option("--episodes", o.episodes, "training episodes per run");
  cmd->add_option("--noise", o.noise, "supervision noise level in [0, 1]");
  cmd->add_flag("--hard-trap", o.hard_trap,
                "raise the observed trap reward from 4 to 8");
  cmd->add_option("--mode", o.mode, "discounting mode: score or reward")
      ->check(CLI::IsMember({"score", "reward"}));
  cmd->add_flag("--abstain", o.abstain,
                "enable abstention when every action is above the risk "
                "threshold");
  cmd->add_option("--jobs", o.jobs, "parallel worker count");
  cmd->add_option("--out", o.out, "output directory root");
  cmd->add_option("--base-seed", o.base_seed, "base seed for stream derivation");
  cmd->add_option("--lambdas", o.lambdas,
                  "comma-separated lambda values for the lambda sweep");
  cmd->add_option("--noise-levels", o.noise_levels,
                  "comma-separated levels for the noise sweep");
}

std::string double_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uard::ExperimentSpec build_spec(const CliOverrides& o) {
  uard::ExperimentSpec spec;
  if (o.config_path) spec = uard::parse_config_file(*o.config_path);
  auto apply = [&spec](const std::string& key, const std::string& value,
                       const std::string& flag) {
    uard::apply_config_entry(spec, key, value, flag);
  };
  if (o.grid) apply("grid", std::to_string(*o.grid), "--grid");
  if (o.lambda) apply("lambda", double_text(*o.lambda), "--lambda");
  if (o.alpha) apply("alpha", double_text(*o.alpha), "--alpha");
  if (o.beta) apply("beta", double_text(*o.beta), "--beta");
  if (o.variant) apply("variants", *o.variant, "--variant");
  if (o.seeds) apply("seeds", std::to_string(*o.seeds), "--seeds");
  if (o.episodes) apply("episodes", std::to_string(*o.episodes), "--episodes");
  if (o.noise) apply("noise", double_text(*o.noise), "--noise");
  if (o.hard_trap) apply("hard_trap", "true", "--hard-trap");
  if (o.mode) apply("mode", *o.mode, "--mode");
  if (o.abstain) apply("abstain", "true", "--abstain");
  if (o.jobs) apply("jobs", std::to_string(*o.jobs), "--jobs");
  if (o.out) apply("out", *o.out, "--out");
  if (o.base_seed) apply("base_seed", std::to_string(*o.base_seed),
                         "--base-seed");
  if (o.lambdas) apply("lambdas", *o.lambdas, "--lambdas");
  if (o.noise_levels) apply("noise_levels", *o.noise_levels, "--noise-levels");
  if (spec.filter.lambda > 10.0) {
    std::cerr << "warning: lambda " << spec.filter.lambda
              << " exceeds 10; expect strongly reduced exploration and "
                 "over-conservative policies\n";
  }
  return spec;
}

void announce(const uard::ReportBundle& bundle) {
  std::cout << "wrote " << bundle.run_csvs.size() << " run CSVs, "
            << bundle.aggregate_csv.string() << ", "
            << bundle.report_md.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Uncertainty-aware reward discounting laboratory: ensemble tabular "
      "Q-learning with a dual-source reliability filter on deceptive "
      "grid worlds"};
  app.require_subcommand(1);

  CliOverrides o;
  std::string stats_dir;

  CLI::App* suite =
      app.add_subcommand("suite", "variant x seed training matrix");
  add_common_flags(suite, o);
  CLI::App* noise_sweep = app.add_subcommand(
      "noise-sweep", "Baseline and UARD-Full across supervision noise levels");
  add_common_flags(noise_sweep, o);
  CLI::App* lambda_sweep = app.add_subcommand(
      "lambda-sweep", "UARD-Full across lambda values, Baseline anchored");
  add_common_flags(lambda_sweep, o);
  CLI::App* curves = app.add_subcommand(
      "filter-curves", "score the three filter shapes over a (mu, lambda, "
                       "sigma) grid");
  add_common_flags(curves, o);
  CLI::App* ood = app.add_subcommand(
      "ood-test", "mid-run teleport stress test for Baseline and UARD-Full");
  add_common_flags(ood, o);
  CLI::App* stats = app.add_subcommand(
      "stats", "recompute aggregate.csv and report.md from existing run CSVs");
  stats->add_option("--out", stats_dir,
                    "suite directory containing <label>/seed_<k>.csv")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (suite->parsed()) {
      announce(uard::run_suite(build_spec(o)));
    } else if (noise_sweep->parsed()) {
      announce(uard::run_noise_sweep(build_spec(o)));
    } else if (lambda_sweep->parsed()) {
      announce(uard::run_lambda_sweep(build_spec(o)));
    } else if (curves->parsed()) {
      std::cout << "wrote " << uard::run_filter_curves(build_spec(o)).string()
                << '\n';
    } else if (ood->parsed()) {
      announce(uard::run_ood_test(build_spec(o)));
    } else if (stats->parsed()) {
      const uard::ReportBundle bundle = uard::run_stats(stats_dir);
      std::cout << "recomputed " << bundle.aggregate_csv.string() << " and "
                << bundle.report_md.string() << " from "
                << bundle.run_csvs.size() << " run CSVs\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
