#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uard/filter.hpp"

namespace uard {

class QEnsemble;
class SigmaHStore;

struct EpisodeMetrics {
  int episode = 0;
  double true_return = 0.0;
  double observed_return = 0.0;
  int trap_visits = 0;
  int abstentions = 0;
  bool goal_reached = false;
  double mean_sigma_m = 0.0;
  double mean_sigma_h = 0.0;
  double epsilon = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (N-1)
};

struct FinalWindow {
  MeanStd true_return;
  MeanStd observed_return;
  MeanStd trap_visits;
  double goal_rate = 0.0;
  double abstention_rate = 0.0;  // abstentions per episode
  int n_episodes = 0;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::string variant_name;
  std::vector<EpisodeMetrics> episodes;
  FinalWindow final_window;
  double alignment_gap = 0.0;  // |mean observed - mean true| over the window
  int perturbed_episode = -1;  // episode during which the teleport fired
};

struct VariantAggregate {
  std::string variant_name;
  int n_runs = 0;
  MeanStd true_return;
  MeanStd observed_return;
  MeanStd trap_visits;
  MeanStd alignment_gap;
  MeanStd goal_rate;
  MeanStd abstention_rate;
};

struct SampleStats {
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
};

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
  bool significant_at_05 = false;
};

// Sample mean and sample standard deviation (N-1 denominator).
MeanStd mean_std(std::span<const double> values);

// Recomputes a run's final-window aggregates over its last `window`
// episodes (fewer if the run is shorter).
FinalWindow compute_final_window(std::span<const EpisodeMetrics> episodes,
                                 int window = 100);
double compute_alignment_gap(std::span<const EpisodeMetrics> episodes,
                             int window = 100);

// Cross-seed aggregation of final-window metrics. Throws for < 2 runs
// (a sample standard deviation needs at least two).
VariantAggregate aggregate(std::span<const RunSummary> runs);

// Welch's unequal-variance two-sample t-test. The p-value comes from the
// Student-t survival function evaluated through the regularized incomplete
// beta function (continued-fraction implementation, absolute accuracy
// around 1e-6). Degenerate zero-variance inputs are defined, not errors:
// equal means give t = 0, p = 1; unequal means give the p = 0 limit.
TTestResult welch_t_test(const SampleStats& a, const SampleStats& b);

// Pooled-variance variant (equal-variance assumption, df = n_a + n_b - 2).
TTestResult pooled_t_test(const SampleStats& a, const SampleStats& b);

// Regularized incomplete beta I_x(a, b) and the two-sided Student-t
// p-value derived from it; exposed for direct verification.
double incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, double df);

// 100 * (baseline - treated) / baseline. Throws for baseline <= 0.
double reduction_percent(double baseline, double treated);

// Minimal boost delta >= 0 that would lift the runner-up action's value
// estimate enough to tie the preferred action's filtered score at state s,
// all uncertainties held fixed. Closed form under the Reciprocal variant:
// delta = j(a*) * denom(a2) - mu(s, a2). Ties return 0.
double sign_preservation_radius(const QEnsemble& ensemble,
                                const SigmaHStore& sigma_h_store,
                                const FilterParams& params, int s);

}  // namespace uard
