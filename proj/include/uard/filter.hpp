#pragma once

#include <span>
#include <vector>

#include "uard/rng.hpp"

namespace uard {

enum class FilterVariant { Reciprocal, LinearSubtraction, ExponentialDecay };

// Confidence-adjusted scoring. The combined uncertainty penalty is
// lambda * (alpha * sigma_m + beta * sigma_h); the Reciprocal variant
// divides the value estimate by one plus that penalty, which discounts
// uncertain values toward zero without ever flipping the sign of a
// non-negative estimate. LinearSubtraction and ExponentialDecay are the
// comparison shapes: subtraction can push scores negative once the penalty
// exceeds the value (zero-reward collapse), exponential decay shrinks
// faster than the reciprocal everywhere.
struct FilterParams {
  double lambda = 5.0;
  double alpha = 0.5;
  double beta = 0.5;
  FilterVariant variant = FilterVariant::Reciprocal;
  bool adaptive = false;
  double lambda_min = 0.0;
  double lambda_max = 10.0;
  double abstain_threshold = 0.6;

  void validate() const;
};

struct ActionScore {
  double j = 0.0;
  double risk = 0.0;         // lambda * (alpha*sigma_m + beta*sigma_h)
  bool abstain = false;      // risk strictly above abstain_threshold
};

// Throws std::invalid_argument for negative sigmas.
ActionScore score(const FilterParams& params, double mu, double sigma_m,
                  double sigma_h);

// Closed-form partial derivatives of the Reciprocal score.
double dj_dsigma_m(const FilterParams& params, double mu, double sigma_m,
                   double sigma_h);
double dj_dsigma_h(const FilterParams& params, double mu, double sigma_m,
                   double sigma_h);

// Non-negativity of the Reciprocal score for mu >= 0.
bool check_proposition_1(const FilterParams& params, double mu, double sigma_m,
                         double sigma_h);

// Strict decrease of the Reciprocal score in each sigma coordinate for
// mu > 0, checked over `trials` randomized coordinate pairs, with the
// analytic derivative cross-checked against a central finite difference
// (relative tolerance 1e-6).
bool check_proposition_2(const FilterParams& params, double mu,
                         SplitMix64& rng, int trials = 100);

// Anomaly-scaled skepticism: lambda grows with the ratio of current
// combined uncertainty to its trailing baseline, clamped to
// [lambda_min, lambda_max].
double adaptive_lambda(const FilterParams& params, double sigma_m,
                       double sigma_h, double baseline_sigma);

struct FilterCurvePoint {
  FilterVariant variant;
  double mu = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double j = 0.0;
};

// Scores all three variants over a (mu, lambda, sigma) grid with the whole
// uncertainty budget on the model channel (alpha = 1, beta = 0), for
// plotting the shape comparison. sigmas must be finite and sorted.
std::vector<FilterCurvePoint> filter_curves(std::span<const double> mus,
                                            std::span<const double> lambdas,
                                            std::span<const double> sigmas);

}  // namespace uard
