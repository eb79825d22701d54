#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace uard {

struct ValueEstimate {
  double mu = 0.0;
  double sigma_m = 0.0;
};

// N independent tabular Q heads over a shared (state, action) index space.
// The ensemble mean is the value estimate; the sample standard deviation
// across heads is the model (epistemic) uncertainty. Head diversity comes
// solely from random initialization: every head trains on every transition.
class QEnsemble {
 public:
  QEnsemble(int n_heads, int n_states, int n_actions, double init_scale,
            std::uint64_t rng_seed, double learning_rate = 0.1,
            double discount_factor = 0.95);

  double mean(int s, int a) const;

  // Sample standard deviation across heads (N-1 denominator).
  double sigma_m(int s, int a) const;

  ValueEstimate estimate(int s, int a) const;

  // Per-head TD(0) update toward reward + gamma * max_a' Q_i(s_next, a')
  // (the bootstrap term drops when the transition is terminal).
  void update(int s, int a, double reward, int s_next, bool terminal);

  double head_value(int head, int s, int a) const;
  void set_head_value(int head, int s, int a, double value);

  int n_heads() const { return n_heads_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double learning_rate() const { return learning_rate_; }
  double discount_factor() const { return discount_factor_; }

  // Debug dump: state,action,head_0..head_{N-1},mu,sigma_m per row.
  void dump_csv(std::ostream& os) const;

 private:
  int offset(int head, int s, int a) const;
  void check_index(int s, int a) const;

  int n_heads_;
  int n_states_;
  int n_actions_;
  double learning_rate_;
  double discount_factor_;
  std::vector<double> values_;  // [head][state][action], flattened
};

}  // namespace uard
