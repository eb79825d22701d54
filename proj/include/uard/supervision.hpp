#pragma once

#include <span>
#include <vector>

#include "uard/rng.hpp"

namespace uard {

enum class AnnotatorKind { Conservative, MildlyTempted, Stochastic };

// One synthetic supervisor. Each annotation is the environment's observed
// reward plus a trap-conditioned bias and additive Gaussian noise whose
// width switches between noise_std (ordinary cells) and trap_noise_std
// (trap entries). The spread across annotators is the human uncertainty.
struct AnnotatorProfile {
  AnnotatorKind kind = AnnotatorKind::Conservative;
  double trap_bias = 0.0;
  double noise_std = 0.0;
  double trap_noise_std = 0.0;
};

struct FeedbackSample {
  std::vector<double> annotations;
  double mean_h = 0.0;
  double sigma_h = 0.0;  // sample standard deviation (K-1 denominator)
};

// Extra supervisory corruption: independent Gaussian noise of width
// level * goal_reward added to every annotation, on top of each
// profile's own noise.
struct NoiseSpec {
  double level = 0.0;
  double std_scale = 0.0;

  static NoiseSpec from_level(double level, double goal_reward = 10.0);
};

// The three default supervisors, in order: Conservative (unbiased, tight),
// MildlyTempted (rates trap entries +2 above the observed reward), and
// Stochastic (noisier everywhere, much noisier at traps; its trap noise
// width is a calibration constant chosen so the long-run trap-cell sigma_h
// settles near 1.25).
std::vector<AnnotatorProfile> default_profiles();

FeedbackSample annotate(std::span<const AnnotatorProfile> profiles,
                        double env_observed_reward, bool trap_hit,
                        const NoiseSpec& noise, SplitMix64& rng);

// Per-(state, action) exponential moving average of annotation spread,
// prior 0. tau = 0.1 makes roughly the last twenty visits dominate.
class SigmaHStore {
 public:
  SigmaHStore(int n_states, int n_actions, double tau = 0.1);

  double update(int s, int a, const FeedbackSample& sample);
  double value(int s, int a) const;
  bool visited(int s, int a) const;

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }

 private:
  int index(int s, int a) const;

  int n_states_;
  int n_actions_;
  double tau_;
  std::vector<double> values_;
  std::vector<char> visited_;
};

}  // namespace uard
