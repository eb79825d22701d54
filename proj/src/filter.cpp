#include "uard/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uard {

void FilterParams::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("alpha must be in [0, 1]");
  }
  if (beta < 0.0 || beta > 1.0) {
    throw std::invalid_argument("beta must be in [0, 1]");
  }
  if (lambda_min < 0.0 || lambda_min > lambda_max) {
    throw std::invalid_argument("need 0 <= lambda_min <= lambda_max");
  }
  if (abstain_threshold < 0.0) {
    throw std::invalid_argument("abstain_threshold must be >= 0");
  }
  if (adaptive && !(lambda_min <= lambda && lambda <= lambda_max)) {
    throw std::invalid_argument(
        "adaptive mode needs lambda_min <= lambda <= lambda_max");
  }
}

ActionScore score(const FilterParams& params, double mu, double sigma_m,
                  double sigma_h) {
  if (sigma_m < 0.0 || sigma_h < 0.0) {
    throw std::invalid_argument("sigmas must be >= 0");
  }
  const double penalty =
      params.lambda * (params.alpha * sigma_m + params.beta * sigma_h);
  ActionScore out;
  out.risk = penalty;
  out.abstain = penalty > params.abstain_threshold;
  switch (params.variant) {
    case FilterVariant::Reciprocal:
      out.j = mu / (1.0 + penalty);
      break;
    case FilterVariant::LinearSubtraction:
      out.j = mu - penalty;
      break;
    case FilterVariant::ExponentialDecay:
      out.j = mu * std::exp(-penalty);
      break;
  }
  return out;
}

double dj_dsigma_m(const FilterParams& params, double mu, double sigma_m,
                   double sigma_h) {
  const double d =
      1.0 + params.lambda * (params.alpha * sigma_m + params.beta * sigma_h);
  return -mu * params.lambda * params.alpha / (d * d);
}

double dj_dsigma_h(const FilterParams& params, double mu, double sigma_m,
                   double sigma_h) {
  const double d =
      1.0 + params.lambda * (params.alpha * sigma_m + params.beta * sigma_h);
  return -mu * params.lambda * params.beta / (d * d);
}

bool check_proposition_1(const FilterParams& params, double mu, double sigma_m,
                         double sigma_h) {
  if (mu < 0.0 || params.variant != FilterVariant::Reciprocal) return false;
  return score(params, mu, sigma_m, sigma_h).j >= 0.0;
}

bool check_proposition_2(const FilterParams& params, double mu,
                         SplitMix64& rng, int trials) {
  if (!(mu > 0.0 && params.lambda > 0.0 && params.alpha > 0.0 &&
        params.beta > 0.0) ||
      params.variant != FilterVariant::Reciprocal) {
    return false;
  }
  constexpr double kFdStep = 1e-5;
  constexpr double kRelTol = 1e-6;
  for (int i = 0; i < trials; ++i) {
    const bool vary_model = (rng.next_u64() & 1) != 0;
    const double fixed = rng.next_range(0.0, 5.0);
    double lo = rng.next_range(0.0, 5.0);
    double hi = rng.next_range(0.0, 5.0);
    if (lo > hi) std::swap(lo, hi);
    if (lo == hi) hi = lo + 0.5;

    const double sm_lo = vary_model ? lo : fixed;
    const double sh_lo = vary_model ? fixed : lo;
    const double sm_hi = vary_model ? hi : fixed;
    const double sh_hi = vary_model ? fixed : hi;
    if (!(score(params, mu, sm_hi, sh_hi).j <
          score(params, mu, sm_lo, sh_lo).j)) {
      return false;
    }

    // Central finite difference at a point away from the sigma >= 0 edge.
    const double at = lo + kFdStep;
    const double sm = vary_model ? at : fixed;
    const double sh = vary_model ? fixed : at;
    const double analytic = vary_model ? dj_dsigma_m(params, mu, sm, sh)
                                       : dj_dsigma_h(params, mu, sm, sh);
    const double plus = vary_model
                            ? score(params, mu, sm + kFdStep, sh).j
                            : score(params, mu, sm, sh + kFdStep).j;
    const double minus = vary_model
                             ? score(params, mu, sm - kFdStep, sh).j
                             : score(params, mu, sm, sh - kFdStep).j;
    const double fd = (plus - minus) / (2.0 * kFdStep);
    if (std::abs(analytic - fd) > kRelTol * (1.0 + std::abs(analytic))) {
      return false;
    }
  }
  return true;
}

double adaptive_lambda(const FilterParams& params, double sigma_m,
                       double sigma_h, double baseline_sigma) {
  if (!params.adaptive) {
    throw std::logic_error("adaptive_lambda requires params.adaptive");
  }
  constexpr double kEps = 1e-6;
  const double sigma_total = params.alpha * sigma_m + params.beta * sigma_h;
  const double scaled =
      params.lambda *
      (1.0 + (sigma_total - baseline_sigma) / std::max(baseline_sigma, kEps));
  return std::clamp(scaled, params.lambda_min, params.lambda_max);
}

std::vector<FilterCurvePoint> filter_curves(std::span<const double> mus,
                                            std::span<const double> lambdas,
                                            std::span<const double> sigmas) {
  if (mus.empty() || lambdas.empty() || sigmas.empty()) {
    throw std::invalid_argument("curve grids must be non-empty");
  }
  if (!std::is_sorted(sigmas.begin(), sigmas.end())) {
    throw std::invalid_argument("sigma grid must be sorted");
  }
  for (const double s : sigmas) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("sigma grid must be finite");
    }
  }
  std::vector<FilterCurvePoint> points;
  points.reserve(3 * mus.size() * lambdas.size() * sigmas.size());
  for (const FilterVariant variant :
       {FilterVariant::Reciprocal, FilterVariant::LinearSubtraction,
        FilterVariant::ExponentialDecay}) {
    for (const double mu : mus) {
      for (const double lambda : lambdas) {
        FilterParams params;
        params.lambda = lambda;
        params.alpha = 1.0;
        params.beta = 0.0;
        params.variant = variant;
        for (const double sigma : sigmas) {
          points.push_back(FilterCurvePoint{
              variant, mu, lambda, sigma, score(params, mu, sigma, 0.0).j});
        }
      }
    }
  }
  return points;
}

}  // namespace uard
