#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "uard/ensemble.hpp"
#include "uard/env.hpp"
#include "uard/filter.hpp"
#include "uard/stats.hpp"
#include "uard/supervision.hpp"

namespace uard {

enum class TieBreak { LowestActionIndex, RandomUniform };

struct PolicyConfig {
  double epsilon_start = 1.0;
  double epsilon_decay = 0.995;  // multiplicative, per episode
  double epsilon_min = 0.05;
  TieBreak tie_break = TieBreak::LowestActionIndex;

  void validate() const;
};

// Which uncertainty channels the variant reads and whether the score is
// actually discounted. Channels that are off are zeroed at selection time
// (still computed and logged); discounting off forces lambda to 0, so
// those variants greedily maximize the raw ensemble mean.
struct VariantSpec {
  bool use_sigma_m = false;
  bool use_sigma_h = false;
  bool use_discounting = false;
  std::string name = "Baseline";

  static const std::array<VariantSpec, 6>& all();
  // Throws std::invalid_argument naming the valid set for unknown names.
  static VariantSpec by_name(std::string_view name);
};

// ScoreFilter discounts at action selection only; the heads learn the raw
// annotator-mean reward. RewardFilter additionally trains the heads on the
// discounted reward mean / (1 + risk).
enum class DiscountMode { ScoreFilter, RewardFilter };

struct ActionChoice {
  Action action = Action::Up;
  bool abstained = false;
};

// Variant-gated filtered score for one (state, action). baseline_sigma < 0
// means the adaptive-lambda rule is bypassed even when params.adaptive.
ActionScore gated_score(const QEnsemble& ensemble,
                        const SigmaHStore& sigma_h_store,
                        const FilterParams& params, const VariantSpec& variant,
                        int s, int a, double baseline_sigma = -1.0);

// Epsilon-greedy over the gated scores. With probability epsilon picks a
// uniform action (one extra rng draw); otherwise argmax with ties broken
// per policy.tie_break. When abstention is enabled and every action's risk
// exceeds the threshold, returns the stay-in-place action: the one the
// boundary would clamp, or the minimal-risk action at interior cells where
// no move clamps.
ActionChoice select_action(const QEnsemble& ensemble,
                           const SigmaHStore& sigma_h_store,
                           const FilterParams& params,
                           const VariantSpec& variant,
                           const PolicyConfig& policy,
                           const GridWorldConfig& env, const GridState& state,
                           double epsilon, bool abstention_enabled,
                           SplitMix64& rng, double baseline_sigma = -1.0);

struct TrainingConfig {
  GridWorldConfig env;
  VariantSpec variant;
  FilterParams filter;
  DiscountMode mode = DiscountMode::ScoreFilter;
  PolicyConfig policy;
  NoiseSpec noise;
  PerturbationSpec perturbation;
  std::vector<AnnotatorProfile> annotators = default_profiles();
  bool abstention_enabled = false;
  int n_episodes = 500;
  int n_heads = 5;
  double init_scale = 0.01;
  double learning_rate = 0.1;
  double discount_factor = 0.95;
  std::uint64_t rng_seed = 0;   // fully derived stream seed for this run
  std::uint64_t seed_label = 0; // reported in the RunSummary

  void validate() const;
};

// Mutable per-run state threaded through episodes by run_training; exposed
// so single episodes can be driven directly in tests.
struct TrainingState {
  QEnsemble ensemble;
  SigmaHStore sigma_h_store;
  SplitMix64 rng;
  long long global_step = 0;
  bool perturbation_fired = false;
  std::vector<double> sigma_total_window;  // trailing adaptive-lambda window
  std::size_t sigma_window_next = 0;

  explicit TrainingState(const TrainingConfig& config);
};

EpisodeMetrics run_episode(const TrainingConfig& config, TrainingState& state,
                           int episode_index, double epsilon);

RunSummary run_training(const TrainingConfig& config);

}  // namespace uard
