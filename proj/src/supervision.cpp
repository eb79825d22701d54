#include "uard/supervision.hpp"

#include <cmath>
#include <stdexcept>

namespace uard {

NoiseSpec NoiseSpec::from_level(double level, double goal_reward) {
  if (level < 0.0 || level > 1.0) {
    throw std::invalid_argument("noise level must be in [0, 1]");
  }
  return NoiseSpec{level, level * goal_reward};
}

std::vector<AnnotatorProfile> default_profiles() {
  return {
      {AnnotatorKind::Conservative, 0.0, 0.05, 0.05},
      {AnnotatorKind::MildlyTempted, 2.0, 0.05, 0.05},
      {AnnotatorKind::Stochastic, 0.0, 0.1, 0.9},
  };
}

FeedbackSample annotate(std::span<const AnnotatorProfile> profiles,
                        double env_observed_reward, bool trap_hit,
                        const NoiseSpec& noise, SplitMix64& rng) {
  const std::size_t k = profiles.size();
  if (k < 2) {
    throw std::invalid_argument(
        "annotation spread needs >= 2 annotators");
  }
  FeedbackSample sample;
  sample.annotations.reserve(k);
  double sum = 0.0;
  for (const AnnotatorProfile& p : profiles) {
    if (p.noise_std < 0.0 || p.trap_noise_std < 0.0) {
      throw std::invalid_argument("annotator noise widths must be >= 0");
    }
    const double sigma = trap_hit ? p.trap_noise_std : p.noise_std;
    double value = env_observed_reward + (trap_hit ? p.trap_bias : 0.0) +
                   rng.next_gaussian(0.0, sigma);
    if (noise.std_scale > 0.0) {
      value += rng.next_gaussian(0.0, noise.std_scale);
    }
    sample.annotations.push_back(value);
    sum += value;
  }
  sample.mean_h = sum / static_cast<double>(k);
  double ss = 0.0;
  for (const double v : sample.annotations) {
    const double d = v - sample.mean_h;
    ss += d * d;
  }
  sample.sigma_h = std::sqrt(ss / static_cast<double>(k - 1));
  return sample;
}

SigmaHStore::SigmaHStore(int n_states, int n_actions, double tau)
    : n_states_(n_states), n_actions_(n_actions), tau_(tau) {
  if (n_states < 1 || n_actions < 1) {
    throw std::invalid_argument("state/action space must be non-empty");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must be in (0, 1]");
  }
  values_.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
  visited_.assign(values_.size(), 0);
}

int SigmaHStore::index(int s, int a) const {
  if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_) {
    throw std::out_of_range("state/action index outside the sigma_h store");
  }
  return s * n_actions_ + a;
}

double SigmaHStore::update(int s, int a, const FeedbackSample& sample) {
  const int i = index(s, a);
  values_[i] = (1.0 - tau_) * values_[i] + tau_ * sample.sigma_h;
  visited_[i] = 1;
  return values_[i];
}

double SigmaHStore::value(int s, int a) const { return values_[index(s, a)]; }

bool SigmaHStore::visited(int s, int a) const {
  return visited_[index(s, a)] != 0;
}

}  // namespace uard
