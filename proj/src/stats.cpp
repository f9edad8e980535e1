#include "wrcm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "wrcm/errors.hpp"

namespace wrcm {

Proportion wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw ParameterError("wilson interval needs 0 <= successes <= trials, trials > 0");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {successes, trials, p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ParameterError("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("least squares needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("least squares needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  fit.slope_stderr = x.size() > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  fit.points = x.size();
  return fit;
}

HillEstimate hill_estimator(std::vector<double> values, double tail_fraction, std::size_t min_tail) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) throw ParameterError("tail fraction must lie in (0,1)");
  HillEstimate est;
  std::sort(values.begin(), values.end(), std::greater<>());
  const auto k = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(values.size())));
  est.tail_points = k;
  if (k == 0 || k >= values.size() || !(values[k] > 0.0)) {
    est.tail_index = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  const double threshold = std::log(values[k]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(values[i]) - threshold;
  const double h = sum / static_cast<double>(k);
  est.tail_index = h > 0.0 ? 1.0 / h : std::numeric_limits<double>::infinity();
  est.reliable = k >= min_tail && h > 0.0;
  return est;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ParameterError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw ParameterError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double standard_error(std::span<const double> values) {
  if (values.size() < 2) throw ParameterError("standard error needs two or more values");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double n = static_cast<double>(values.size());
  return std::sqrt(ss / (n - 1) / n);
}

DecayFit fit_binomial_decay(std::span<const int> stages, std::span<const std::int64_t> successes,
                            std::span<const std::int64_t> trials) {
  const std::size_t m = stages.size();
  if (m < 2 || successes.size() != m || trials.size() != m) {
    throw ParameterError("decay fit needs matching stage, success and trial lists of length >= 2");
  }
  const double ln2 = std::numbers::ln2;
  // log P_k = c - r k ln 2
  auto log_lik = [&](double c, double r) {
    double ll = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double lp = c - r * stages[i] * ln2;
      if (lp >= 0.0) return -std::numeric_limits<double>::infinity();
      const double s = static_cast<double>(successes[i]);
      const double f = static_cast<double>(trials[i] - successes[i]);
      ll += s * lp + (f > 0 ? f * std::log1p(-std::exp(lp)) : 0.0);
    }
    return ll;
  };

  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = stages[i];
    ys[i] = std::log((static_cast<double>(successes[i]) + 0.5) / (static_cast<double>(trials[i]) + 1.0));
  }
  const LinearFit start = least_squares(xs, ys);
  double c = start.intercept, r = -start.slope / ln2;
  // Keep the start inside the admissible region P_k < 1.
  for (int guard = 0; log_lik(c, r) == -std::numeric_limits<double>::infinity() && guard < 200; ++guard) c -= 0.1;

  DecayFit fit;
  double ll = log_lik(c, r);
  for (int iter = 0; iter < 200; ++iter) {
    double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = -stages[i] * ln2;
      const double p = std::exp(c + r * d);
      const double s = static_cast<double>(successes[i]);
      const double f = static_cast<double>(trials[i] - successes[i]);
      const double w = s - f * p / (1 - p);
      const double curv = f * p / ((1 - p) * (1 - p));
      g0 += w;
      g1 += w * d;
      h00 += curv;
      h01 += curv * d;
      h11 += curv * d * d;
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0.0)) break;
    const double dc = (h11 * g0 - h01 * g1) / det;
    const double dr = (h00 * g1 - h01 * g0) / det;
    double step = 1.0, next = ll;
    double nc = c, nr = r;
    for (int half = 0; half < 60; ++half) {
      nc = c + step * dc;
      nr = r + step * dr;
      next = log_lik(nc, nr);
      if (next >= ll) break;
      step *= 0.5;
    }
    if (!(next >= ll)) break;
    const bool small = std::abs(nc - c) < 1e-12 && std::abs(nr - r) < 1e-12;
    c = nc;
    r = nr;
    ll = next;
    if (small) {
      fit.converged = true;
      break;
    }
  }

  // Expected Fisher information at the optimum.
  double i00 = 0, i01 = 0, i11 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = -stages[i] * ln2;
    const double p = std::exp(c + r * d);
    const double w = static_cast<double>(trials[i]) * p / (1 - p);
    i00 += w;
    i01 += w * d;
    i11 += w * d * d;
  }
  const double det = i00 * i11 - i01 * i01;
  fit.rate = r;
  fit.log_amplitude = c;
  fit.rate_stderr = det > 0 ? std::sqrt(i00 / det) : std::numeric_limits<double>::infinity();
  fit.lower95 = r - 1.959963984540054 * fit.rate_stderr;
  fit.upper95 = r + 1.959963984540054 * fit.rate_stderr;
  return fit;
}

std::pair<double, double> median_interval(std::vector<double> values, double level) {
  if (values.empty()) throw ParameterError("median_interval of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  // Largest j with P{B < j} <= (1 - level)/2, B ~ Binomial(n, 1/2); then
  // [x_(j), x_(n-j+1)] covers the median with probability >= level.
  const double alpha = 0.5 * (1.0 - level);
  double cdf = 0.0;
  std::size_t j = 0;
  for (std::size_t b = 0; b < n; ++b) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(b + 1.0) - std::lgamma(n - b + 1.0) -
                           static_cast<double>(n) * std::log(2.0);
    if (cdf + std::exp(log_pmf) > alpha) break;
    cdf += std::exp(log_pmf);
    j = b + 1;  // P{B < j} = cdf <= alpha
  }
  if (j == 0) return {values.front(), values.back()};
  return {values[j - 1], values[n - j]};
}

}  // namespace wrcm
