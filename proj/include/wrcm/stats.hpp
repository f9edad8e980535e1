#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace wrcm {

/// Binomial proportion with a Wilson score interval.
struct Proportion {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 1.0;
};

Proportion wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

/// sup_x |F_n(x) - F(x)| of a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic one-sample Kolmogorov-Smirnov critical value at level 1%.
double ks_critical_1pct(std::size_t n);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x; needs at least two distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct HillEstimate {
  double tail_index = 0.0;  ///< alpha-hat = 1 / mean log-excess
  std::size_t tail_points = 0;
  bool reliable = false;
};

/// Hill estimator over the top floor(tail_fraction * n) order statistics.
/// Flagged unreliable below `min_tail` tail points or when the excesses vanish.
HillEstimate hill_estimator(std::vector<double> values, double tail_fraction,
                            std::size_t min_tail = 50);

double mean(std::span<const double> values);
double median(std::vector<double> values);
/// Standard error of the mean (sample standard deviation / sqrt(n)).
double standard_error(std::span<const double> values);

/// Maximum-likelihood fit of P_k = A 2^{-rate k} to binomial counts per stage k.
struct DecayFit {
  double rate = 0.0;  ///< log2 decay rate per stage
  double rate_stderr = 0.0;
  double lower95 = 0.0;
  double upper95 = 0.0;
  double log_amplitude = 0.0;
  bool converged = false;
};

DecayFit fit_binomial_decay(std::span<const int> stages, std::span<const std::int64_t> successes,
                            std::span<const std::int64_t> trials);

/// Distribution-free confidence interval for the median from order statistics
/// (binomial(n, 1/2) ranks); coverage at least `level`. Falls back to
/// [min, max] when n is too small for the requested coverage.
std::pair<double, double> median_interval(std::vector<double> values, double level = 0.95);

}  // namespace wrcm
