#include "uard/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uard/ensemble.hpp"
#include "uard/supervision.hpp"

namespace uard {

namespace {

// Continued-fraction evaluation of the regularized incomplete beta
// (Lentz's method, as in Numerical Recipes).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-30;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

TTestResult degenerate_t_result(double mean_a, double mean_b) {
  TTestResult out;
  if (mean_a == mean_b) {
    out.t = 0.0;
    out.p = 1.0;
  } else {
    out.t = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
    out.p = 0.0;
  }
  out.significant_at_05 = out.p < 0.05;
  return out;
}

void check_samples(const SampleStats& a, const SampleStats& b) {
  if (a.n < 2 || b.n < 2) {
    throw std::invalid_argument("t-test needs >= 2 observations per sample");
  }
  if (a.std < 0.0 || b.std < 0.0) {
    throw std::invalid_argument("standard deviations must be >= 0");
  }
}

}  // namespace

MeanStd mean_std(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::invalid_argument(
        "sample standard deviation needs >= 2 values");
  }
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  return MeanStd{mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

FinalWindow compute_final_window(std::span<const EpisodeMetrics> episodes,
                                 int window) {
  FinalWindow out;
  if (episodes.empty()) return out;
  const std::size_t n = std::min<std::size_t>(
      episodes.size(), static_cast<std::size_t>(std::max(window, 0)));
  if (n == 0) return out;
  const auto tail = episodes.subspan(episodes.size() - n);
  std::vector<double> true_r, obs_r, traps;
  true_r.reserve(n);
  obs_r.reserve(n);
  traps.reserve(n);
  double goals = 0.0;
  double abstains = 0.0;
  for (const EpisodeMetrics& e : tail) {
    true_r.push_back(e.true_return);
    obs_r.push_back(e.observed_return);
    traps.push_back(static_cast<double>(e.trap_visits));
    goals += e.goal_reached ? 1.0 : 0.0;
    abstains += static_cast<double>(e.abstentions);
  }
  out.n_episodes = static_cast<int>(n);
  if (n >= 2) {
    out.true_return = mean_std(true_r);
    out.observed_return = mean_std(obs_r);
    out.trap_visits = mean_std(traps);
  } else {
    out.true_return = {true_r[0], 0.0};
    out.observed_return = {obs_r[0], 0.0};
    out.trap_visits = {traps[0], 0.0};
  }
  out.goal_rate = goals / static_cast<double>(n);
  out.abstention_rate = abstains / static_cast<double>(n);
  return out;
}

double compute_alignment_gap(std::span<const EpisodeMetrics> episodes,
                             int window) {
  const FinalWindow w = compute_final_window(episodes, window);
  if (w.n_episodes == 0) return 0.0;
  return std::abs(w.observed_return.mean - w.true_return.mean);
}

VariantAggregate aggregate(std::span<const RunSummary> runs) {
  if (runs.size() < 2) {
    throw std::invalid_argument("aggregation needs >= 2 runs");
  }
  VariantAggregate out;
  out.variant_name = runs.front().variant_name;
  out.n_runs = static_cast<int>(runs.size());
  std::vector<double> true_r, obs_r, traps, gaps, goals, abstains;
  for (const RunSummary& run : runs) {
    true_r.push_back(run.final_window.true_return.mean);
    obs_r.push_back(run.final_window.observed_return.mean);
    traps.push_back(run.final_window.trap_visits.mean);
    gaps.push_back(run.alignment_gap);
    goals.push_back(run.final_window.goal_rate);
    abstains.push_back(run.final_window.abstention_rate);
  }
  out.true_return = mean_std(true_r);
  out.observed_return = mean_std(obs_r);
  out.trap_visits = mean_std(traps);
  out.alignment_gap = mean_std(gaps);
  out.goal_rate = mean_std(goals);
  out.abstention_rate = mean_std(abstains);
  return out;
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::invalid_argument("incomplete beta requires a, b > 0");
  }
  if (x < 0.0 || x > 1.0) {
    throw std::invalid_argument("incomplete beta requires x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_prefix = std::lgamma(a + b) - std::lgamma(a) -
                            std::lgamma(b) + a * std::log(x) +
                            b * std::log1p(-x);
  // The continued fraction converges fast only for x below the
  // distribution's bulk; use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_prefix) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 -
         std::exp(log_prefix) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) {
    throw std::invalid_argument("degrees of freedom must be > 0");
  }
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult welch_t_test(const SampleStats& a, const SampleStats& b) {
  check_samples(a, b);
  const double va = a.std * a.std / a.n;
  const double vb = b.std * b.std / b.n;
  if (va + vb == 0.0) return degenerate_t_result(a.mean, b.mean);
  TTestResult out;
  out.t = (a.mean - b.mean) / std::sqrt(va + vb);
  out.df = (va + vb) * (va + vb) /
           (va * va / (a.n - 1) + vb * vb / (b.n - 1));
  out.p = student_t_two_sided_p(out.t, out.df);
  out.significant_at_05 = out.p < 0.05;
  return out;
}

TTestResult pooled_t_test(const SampleStats& a, const SampleStats& b) {
  check_samples(a, b);
  const double df = static_cast<double>(a.n + b.n - 2);
  const double pooled_var =
      ((a.n - 1) * a.std * a.std + (b.n - 1) * b.std * b.std) / df;
  if (pooled_var == 0.0) return degenerate_t_result(a.mean, b.mean);
  TTestResult out;
  out.df = df;
  out.t = (a.mean - b.mean) /
          std::sqrt(pooled_var * (1.0 / a.n + 1.0 / b.n));
  out.p = student_t_two_sided_p(out.t, out.df);
  out.significant_at_05 = out.p < 0.05;
  return out;
}

double reduction_percent(double baseline, double treated) {
  if (baseline <= 0.0) {
    throw std::invalid_argument("reduction needs a positive baseline");
  }
  return 100.0 * (baseline - treated) / baseline;
}

double sign_preservation_radius(const QEnsemble& ensemble,
                                const SigmaHStore& sigma_h_store,
                                const FilterParams& params, int s) {
  const int n_actions = ensemble.n_actions();
  if (n_actions < 2) {
    throw std::invalid_argument("radius needs >= 2 actions");
  }
  if (params.variant != FilterVariant::Reciprocal) {
    throw std::invalid_argument("radius is defined for the Reciprocal shape");
  }
  int best = 0;
  int runner = -1;
  std::vector<double> js(n_actions);
  std::vector<double> denoms(n_actions);
  for (int a = 0; a < n_actions; ++a) {
    const ValueEstimate est = ensemble.estimate(s, a);
    const ActionScore sc =
        score(params, est.mu, est.sigma_m, sigma_h_store.value(s, a));
    js[a] = sc.j;
    denoms[a] = 1.0 + sc.risk;
    if (a > 0 && js[a] > js[best]) best = a;
  }
  for (int a = 0; a < n_actions; ++a) {
    if (a == best) continue;
    if (runner < 0 || js[a] > js[runner]) runner = a;
  }
  if (js[best] == js[runner]) return 0.0;
  const double delta = js[best] * denoms[runner] - ensemble.mean(s, runner);
  return std::max(delta, 0.0);
}

}  // namespace uard
