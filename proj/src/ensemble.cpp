#include "uard/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "uard/rng.hpp"

namespace uard {

QEnsemble::QEnsemble(int n_heads, int n_states, int n_actions,
                     double init_scale, std::uint64_t rng_seed,
                     double learning_rate, double discount_factor)
    : n_heads_(n_heads),
      n_states_(n_states),
      n_actions_(n_actions),
      learning_rate_(learning_rate),
      discount_factor_(discount_factor) {
  if (n_heads < 2) {
    throw std::invalid_argument(
        "ensemble needs >= 2 heads for a sample standard deviation");
  }
  if (n_states < 1 || n_actions < 1) {
    throw std::invalid_argument("state/action space must be non-empty");
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
  values_.resize(static_cast<std::size_t>(n_heads) * n_states * n_actions);
  for (int h = 0; h < n_heads_; ++h) {
    SplitMix64 rng(derive_stream(rng_seed, static_cast<std::uint64_t>(h),
                                 "ensemble-head-init"));
    for (int s = 0; s < n_states_; ++s) {
      for (int a = 0; a < n_actions_; ++a) {
        values_[offset(h, s, a)] = rng.next_range(-init_scale, init_scale);
      }
    }
  }
}

int QEnsemble::offset(int head, int s, int a) const {
  return (head * n_states_ + s) * n_actions_ + a;
}

void QEnsemble::check_index(int s, int a) const {
  if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_) {
    throw std::out_of_range("state/action index outside the ensemble tables");
  }
}

double QEnsemble::mean(int s, int a) const {
  check_index(s, a);
  double sum = 0.0;
  for (int h = 0; h < n_heads_; ++h) sum += values_[offset(h, s, a)];
  return sum / n_heads_;
}

double QEnsemble::sigma_m(int s, int a) const {
  check_index(s, a);
  const double mu = mean(s, a);
  double ss = 0.0;
  for (int h = 0; h < n_heads_; ++h) {
    const double d = values_[offset(h, s, a)] - mu;
    ss += d * d;
  }
  return std::sqrt(ss / (n_heads_ - 1));
}

ValueEstimate QEnsemble::estimate(int s, int a) const {
  return ValueEstimate{mean(s, a), sigma_m(s, a)};
}

void QEnsemble::update(int s, int a, double reward, int s_next, bool terminal) {
  check_index(s, a);
  if (!terminal) check_index(s_next, 0);
  for (int h = 0; h < n_heads_; ++h) {
    double bootstrap = 0.0;
    if (!terminal) {
      double best = values_[offset(h, s_next, 0)];
      for (int a2 = 1; a2 < n_actions_; ++a2) {
        best = std::max(best, values_[offset(h, s_next, a2)]);
      }
      bootstrap = discount_factor_ * best;
    }
    double& q = values_[offset(h, s, a)];
    q += learning_rate_ * (reward + bootstrap - q);
  }
}

double QEnsemble::head_value(int head, int s, int a) const {
  if (head < 0 || head >= n_heads_) throw std::out_of_range("head index");
  check_index(s, a);
  return values_[offset(head, s, a)];
}

void QEnsemble::set_head_value(int head, int s, int a, double value) {
  if (head < 0 || head >= n_heads_) throw std::out_of_range("head index");
  check_index(s, a);
  values_[offset(head, s, a)] = value;
}

void QEnsemble::dump_csv(std::ostream& os) const {
  os << "state,action";
  for (int h = 0; h < n_heads_; ++h) os << ",head_" << h;
  os << ",mu,sigma_m\n";
  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) {
      os << s << ',' << a;
      for (int h = 0; h < n_heads_; ++h) {
        os << ',' << values_[offset(h, s, a)];
      }
      os << ',' << mean(s, a) << ',' << sigma_m(s, a) << '\n';
    }
  }
}

}  // namespace uard
