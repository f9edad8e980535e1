#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wrcm/errors.hpp"
#include "wrcm/rng.hpp"
#include "wrcm/stats.hpp"

using namespace wrcm;
using doctest::Approx;

TEST_CASE("wilson interval") {
  for (auto [k, n] : {std::pair{0, 10}, {3, 10}, {50, 100}, {100, 100}, {7, 1000}}) {
    const auto p = wilson_interval(k, n);
    const auto [lo, hi] = oracle::wilson(k, n);
    CHECK(p.estimate == Approx(static_cast<double>(k) / n));
    CHECK(p.lower == Approx(lo).epsilon(1e-12));
    CHECK(p.upper == Approx(hi).epsilon(1e-12));
  }
  CHECK_THROWS_AS(wilson_interval(3, 0), ParameterError);
}

TEST_CASE("ks statistic") {
  CHECK(ks_statistic({0.1, 0.5, 0.9}, [](double x) { return x; }) == Approx(0.7 / 3.0));
  CHECK(ks_critical_1pct(100) == Approx(0.16276));
}

TEST_CASE("least squares") {
  const std::vector<double> x = {0, 1, 2, 3}, y = {2, 5, 8, 11};
  const auto fit = least_squares(x, y);
  CHECK(fit.slope == Approx(3.0));
  CHECK(fit.intercept == Approx(2.0));
  CHECK(fit.residual_rms == Approx(0.0).scale(1.0));
  const std::vector<double> same = {1, 1};
  CHECK_THROWS_AS(least_squares(same, same), ParameterError);
}

TEST_CASE("hill estimator recovers Pareto indices") {
  for (double alpha : {1.5, 2.0, 3.0}) {
    SplitMixEngine rng(static_cast<std::uint64_t>(alpha * 10));
    std::vector<double> x(100000);
    for (auto& v : x) v = std::pow(rng.uniform(), -1.0 / alpha);
    const auto h = hill_estimator(x, 0.05);
    CHECK(h.reliable);
    CHECK(h.tail_points == 5000);
    CHECK(std::abs(h.tail_index - alpha) < 0.1);
  }
  const auto flat = hill_estimator(std::vector<double>(1000, 2.0), 0.1);
  CHECK_FALSE(flat.reliable);
  CHECK_FALSE(hill_estimator({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.5).reliable);
}

TEST_CASE("summary statistics") {
  const std::vector<double> v = {4, 1, 3, 2};
  CHECK(mean(v) == Approx(2.5));
  CHECK(median(v) == Approx(2.5));
  CHECK(median({5, 1, 3}) == Approx(3.0));
  CHECK(standard_error(v) == Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("binomial decay fit") {
  const std::vector<int> stages = {2, 3, 4, 5, 6, 7, 8};
  std::vector<std::int64_t> succ, trials;
  for (int k : stages) {
    trials.push_back(1000000);
    succ.push_back(std::llround(1e6 * 0.8 * std::pow(2.0, -0.5 * k)));
  }
  const auto fit = fit_binomial_decay(stages, succ, trials);
  CHECK(fit.converged);
  CHECK(fit.rate == Approx(0.5).epsilon(1e-3));
  CHECK(fit.lower95 > 0.45);
  CHECK(fit.lower95 < 0.5);
  CHECK(fit.upper95 > 0.5);

  std::vector<std::int64_t> flat(stages.size(), 300), n(stages.size(), 1000);
  const auto none = fit_binomial_decay(stages, flat, n);
  CHECK(none.lower95 < 0.0);
  CHECK(none.upper95 > 0.0);
}

TEST_CASE("median interval coverage") {
  SplitMixEngine rng(8);
  const int trials = 4000, n = 51;
  int covered = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform();
    const auto [lo, hi] = median_interval(x);
    REQUIRE(lo <= hi);
    if (lo <= 0.5 && 0.5 <= hi) ++covered;
  }
  CHECK(static_cast<double>(covered) / trials > 0.95 - 4.0 * std::sqrt(0.05 * 0.95 / trials));
  const auto [lo, hi] = median_interval({3.0, 1.0});
  CHECK(lo == 1.0);
  CHECK(hi == 3.0);
}
