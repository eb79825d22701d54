#include "uard/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uard {

namespace {

constexpr int kAdaptiveWindow = 100;

double window_mean(const std::vector<double>& window) {
  if (window.empty()) return -1.0;
  return std::accumulate(window.begin(), window.end(), 0.0) /
         static_cast<double>(window.size());
}

// The action whose movement the boundary clamps at this cell, if any;
// otherwise the given fallback. Preference order matches action indices.
Action stay_in_place_action(const GridWorldConfig& env, const GridState& state,
                            Action fallback) {
  if (state.position.row == 0) return Action::Up;
  if (state.position.row == env.height - 1) return Action::Down;
  if (state.position.col == 0) return Action::Left;
  if (state.position.col == env.width - 1) return Action::Right;
  return fallback;
}

}  // namespace

void PolicyConfig::validate() const {
  if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon_start &&
        epsilon_start <= 1.0)) {
    throw std::invalid_argument(
        "need 0 <= epsilon_min <= epsilon_start <= 1");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
    throw std::invalid_argument("epsilon_decay must be in (0, 1]");
  }
}

const std::array<VariantSpec, 6>& VariantSpec::all() {
  static const std::array<VariantSpec, 6> variants{{
      {false, false, false, "Baseline"},
      {true, false, false, "AblationI"},
      {true, true, false, "AblationII"},
      {true, false, true, "UARD-lite"},
      {false, true, true, "HumanOnly"},
      {true, true, true, "UARD-Full"},
  }};
  return variants;
}

VariantSpec VariantSpec::by_name(std::string_view name) {
  for (const VariantSpec& v : all()) {
    if (v.name == name) return v;
  }
  std::string valid;
  for (const VariantSpec& v : all()) {
    if (!valid.empty()) valid += ", ";
    valid += v.name;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "'; valid: " + valid);
}

ActionScore gated_score(const QEnsemble& ensemble,
                        const SigmaHStore& sigma_h_store,
                        const FilterParams& params, const VariantSpec& variant,
                        int s, int a, double baseline_sigma) {
  const ValueEstimate est = ensemble.estimate(s, a);
  const double sm = variant.use_sigma_m ? est.sigma_m : 0.0;
  const double sh = variant.use_sigma_h ? sigma_h_store.value(s, a) : 0.0;
  FilterParams effective = params;
  if (!variant.use_discounting) {
    effective.lambda = 0.0;
  } else if (params.adaptive && baseline_sigma >= 0.0) {
    effective.lambda = adaptive_lambda(params, sm, sh, baseline_sigma);
  }
  return score(effective, est.mu, sm, sh);
}

ActionChoice select_action(const QEnsemble& ensemble,
                           const SigmaHStore& sigma_h_store,
                           const FilterParams& params,
                           const VariantSpec& variant,
                           const PolicyConfig& policy,
                           const GridWorldConfig& env, const GridState& state,
                           double epsilon, bool abstention_enabled,
                           SplitMix64& rng, double baseline_sigma) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must be in [0, 1]");
  }
  const int s = state_index(env, state);
  if (rng.next_unit() < epsilon) {
    return ActionChoice{
        static_cast<Action>(rng.next_below(kNumActions)), false};
  }

  std::array<ActionScore, kNumActions> scores;
  for (int a = 0; a < kNumActions; ++a) {
    scores[a] =
        gated_score(ensemble, sigma_h_store, params, variant, s, a,
                    baseline_sigma);
  }

  if (abstention_enabled) {
    const bool all_risky = std::all_of(
        scores.begin(), scores.end(),
        [](const ActionScore& sc) { return sc.abstain; });
    if (all_risky) {
      int safest = 0;
      for (int a = 1; a < kNumActions; ++a) {
        if (scores[a].risk < scores[safest].risk) safest = a;
      }
      const Action stay =
          stay_in_place_action(env, state, static_cast<Action>(safest));
      return ActionChoice{stay, true};
    }
  }

  int best = 0;
  int n_tied = 1;
  for (int a = 1; a < kNumActions; ++a) {
    if (scores[a].j > scores[best].j) {
      best = a;
      n_tied = 1;
    } else if (scores[a].j == scores[best].j) {
      ++n_tied;
    }
  }
  if (n_tied > 1 && policy.tie_break == TieBreak::RandomUniform) {
    std::uint64_t pick = rng.next_below(static_cast<std::uint64_t>(n_tied));
    for (int a = 0; a < kNumActions; ++a) {
      if (scores[a].j == scores[best].j && pick-- == 0) {
        best = a;
        break;
      }
    }
  }
  return ActionChoice{static_cast<Action>(best), false};
}

void TrainingConfig::validate() const {
  env.validate();
  filter.validate();
  policy.validate();
  if (n_episodes < 0) throw std::invalid_argument("n_episodes must be >= 0");
  if (n_heads < 2) throw std::invalid_argument("n_heads must be >= 2");
  if (annotators.size() < 2) {
    throw std::invalid_argument("need >= 2 annotators");
  }
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw std::invalid_argument("learning_rate must be in (0, 1]");
  }
  if (!(discount_factor >= 0.0 && discount_factor < 1.0)) {
    throw std::invalid_argument("discount_factor must be in [0, 1)");
  }
  if (init_scale < 0.0) {
    throw std::invalid_argument("init_scale must be >= 0");
  }
  if (noise.level < 0.0 || noise.level > 1.0 || noise.std_scale < 0.0) {
    throw std::invalid_argument("invalid noise settings");
  }
}

TrainingState::TrainingState(const TrainingConfig& config)
    : ensemble(config.n_heads, config.env.n_states(), kNumActions,
               config.init_scale,
               derive_stream(config.rng_seed, 0, "ensemble"),
               config.learning_rate, config.discount_factor),
      sigma_h_store(config.env.n_states(), kNumActions),
      rng(derive_stream(config.rng_seed, 0, "episode-loop")) {}

EpisodeMetrics run_episode(const TrainingConfig& config, TrainingState& state,
                           int episode_index, double epsilon) {
  EpisodeMetrics metrics;
  metrics.episode = episode_index;
  metrics.epsilon = epsilon;

  GridState grid = reset(config.env);
  double sum_sigma_m = 0.0;
  double sum_sigma_h = 0.0;
  int steps = 0;
  const bool adaptive_on =
      config.filter.adaptive && config.variant.use_discounting;

  for (;;) {
    if (config.perturbation.enabled && !state.perturbation_fired &&
        state.global_step >= config.perturbation.trigger_step) {
      grid = apply_perturbation(config.env, grid, config.perturbation);
      state.perturbation_fired = true;
      // The clamped teleport can land on the goal; the episode is then over
      // with no transition (and no goal credit) to record.
      if (is_terminal(config.env, grid)) break;
    }

    const double baseline_sigma =
        adaptive_on ? window_mean(state.sigma_total_window) : -1.0;
    const ActionChoice choice = select_action(
        state.ensemble, state.sigma_h_store, config.filter, config.variant,
        config.policy, config.env, grid, epsilon, config.abstention_enabled,
        state.rng, baseline_sigma);

    const int s = state_index(config.env, grid);
    const int a = static_cast<int>(choice.action);
    const StepOutcome outcome = step(config.env, grid, choice.action);
    const int s_next = state_index(config.env, outcome.next_state);

    const FeedbackSample sample =
        annotate(config.annotators, outcome.observed_reward, outcome.trap_hit,
                 config.noise, state.rng);
    const double sigma_h_now = state.sigma_h_store.update(s, a, sample);

    double train_reward = sample.mean_h;
    if (config.mode == DiscountMode::RewardFilter) {
      const ActionScore sc =
          gated_score(state.ensemble, state.sigma_h_store, config.filter,
                      config.variant, s, a, baseline_sigma);
      train_reward = sample.mean_h / (1.0 + sc.risk);
    }
    state.ensemble.update(s, a, train_reward, s_next, outcome.terminal);

    const double gated_sm =
        config.variant.use_sigma_m ? state.ensemble.sigma_m(s, a) : 0.0;
    const double gated_sh = config.variant.use_sigma_h ? sigma_h_now : 0.0;
    const double sigma_total =
        config.filter.alpha * gated_sm + config.filter.beta * gated_sh;
    if (state.sigma_total_window.size() <
        static_cast<std::size_t>(kAdaptiveWindow)) {
      state.sigma_total_window.push_back(sigma_total);
    } else {
      state.sigma_total_window[state.sigma_window_next] = sigma_total;
      state.sigma_window_next =
          (state.sigma_window_next + 1) % kAdaptiveWindow;
    }

    metrics.true_return += outcome.true_reward;
    metrics.observed_return += sample.mean_h;
    if (outcome.trap_hit) ++metrics.trap_visits;
    if (choice.abstained) ++metrics.abstentions;
    if (outcome.goal_reached) metrics.goal_reached = true;
    sum_sigma_m += state.ensemble.sigma_m(s, a);
    sum_sigma_h += sigma_h_now;
    ++steps;
    ++state.global_step;

    if (outcome.terminal) break;
    grid = outcome.next_state;
  }

  if (steps > 0) {
    metrics.mean_sigma_m = sum_sigma_m / steps;
    metrics.mean_sigma_h = sum_sigma_h / steps;
  }
  return metrics;
}

RunSummary run_training(const TrainingConfig& config) {
  config.validate();
  RunSummary summary;
  summary.seed = config.seed_label;
  summary.variant_name = config.variant.name;
  summary.episodes.reserve(static_cast<std::size_t>(config.n_episodes));

  TrainingState state(config);
  double epsilon = config.policy.epsilon_start;
  for (int e = 0; e < config.n_episodes; ++e) {
    const double eps = std::max(config.policy.epsilon_min, epsilon);
    const bool fired_before = state.perturbation_fired;
    EpisodeMetrics m = run_episode(config, state, e, eps);
    if (!fired_before && state.perturbation_fired) {
      summary.perturbed_episode = e;
    }
    summary.episodes.push_back(std::move(m));
    epsilon *= config.policy.epsilon_decay;
  }

  summary.final_window = compute_final_window(summary.episodes);
  summary.alignment_gap = compute_alignment_gap(summary.episodes);
  return summary;
}

}  // namespace uard
