#include "wrcm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "wrcm/errors.hpp"
#include "wrcm/point_process.hpp"
#include "wrcm/quadrature.hpp"
#include "wrcm/rng.hpp"
#include "wrcm/stats.hpp"

namespace wrcm {

namespace {

constexpr double kBoundaryTol = 1e-12;

// First point in [a,b] where the non-increasing function h drops through 0;
// empty when h does not change sign there.
std::optional<double> sign_change(const std::function<double(double)>& h, double a, double b) {
  if (!(h(a) > 0.0 && h(b) < 0.0)) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if (!(m > a && m < b)) break;
    (h(m) > 0.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

// Knots y, y+1, y+2, y+4, ... below x_hi, plus any extra split points.
std::vector<double> dyadic_knots(double from, double to, std::initializer_list<std::optional<double>> extra) {
  std::vector<double> knots{from};
  for (double step = 1.0; from + step < to; step *= 2.0) knots.push_back(from + step);
  for (const auto& e : extra)
    if (e && *e > from && *e < to) knots.push_back(*e);
  knots.push_back(to);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  return knots;
}

struct TriangleSetup {
  // f(s, t) on the half s <= t.
  std::function<double(double, double)> integrand;
  // log(scale * g(s,t)); its zero set is a kink of the integrand. Optional.
  std::function<double(double, double)> kink;
  double x_lo = 0.0;  // -log(hi)
  double x_hi = 0.0;  // -log(lo)
  double rel_tol = 1e-8;
};

// 2 ∫_{y=x_lo}^{x_hi} e^{-y} ∫_{x=y}^{x_hi} e^{-x} f(e^{-x}, e^{-y}) dx dy, i.e. the
// integral over the square [e^{-x_hi}, e^{-x_lo}]² of a symmetric integrand.
double symmetric_square(const TriangleSetup& setup) {
  const double x_hi = setup.x_hi;
  const double inner_tol = std::max(setup.rel_tol * 1e-2, 1e-13);
  double worst_inner = 0.0;

  auto inner = [&](double y) {
    if (!(y < x_hi)) return 0.0;
    const double t = std::exp(-y);
    std::optional<double> kink;
    if (setup.kink)
      kink = sign_change([&](double x) { return setup.kink(std::exp(-x), t); }, y, x_hi);
    const auto knots = dyadic_knots(y, x_hi, {kink});
    const auto r = integrate_adaptive(
        [&](double x) {
          const double s = std::exp(-x);
          return s * setup.integrand(s, t);
        },
        knots, inner_tol);
    if (!r.converged && r.value != 0.0) worst_inner = std::max(worst_inner, r.error / std::abs(r.value));
    return t * r.value;
  };

  std::optional<double> diag_kink, edge_kink;
  if (setup.kink) {
    diag_kink = sign_change(
        [&](double y) { return setup.kink(std::exp(-y), std::exp(-y)); }, setup.x_lo, x_hi);
    const double s_min = std::exp(-x_hi);
    edge_kink = sign_change([&](double y) { return setup.kink(s_min, std::exp(-y)); },
                            setup.x_lo, x_hi);
  }
  const auto knots = dyadic_knots(setup.x_lo, x_hi, {diag_kink, edge_kink});
  const auto r = integrate_adaptive(inner, knots, setup.rel_tol);
  const double achieved = r.value != 0.0 ? r.error / std::abs(r.value) : r.error;
  if (!r.converged || worst_inner > setup.rel_tol)
    throw NumericError("two-dimensional quadrature did not converge",
                       std::max(achieved, worst_inner));
  return 2.0 * r.value;
}

void check_delta_gamma(double delta, double gamma) {
  if (!(delta > 1.0)) throw ParameterError("delta must exceed 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0,1)");
}

bool near(double a, double b) { return std::abs(a - b) <= kBoundaryTol; }

}  // namespace

double square_integral(const KernelSpec& k, const ProfileSpec& p, double lo, double hi,
                       double scale, double rel_tol) {
  k.validate();
  p.validate();
  if (!(lo > 0.0) || !(hi <= 1.0)) throw DomainError("integration square must lie in (0,1]");
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  if (!(lo < hi)) return 0.0;
  TriangleSetup setup;
  setup.integrand = [&](double s, double t) { return p.value(scale * k.value(s, t)); };
  if (p.has_breakpoint()) {
    const double log_scale = std::log(scale);
    setup.kink = [&, log_scale](double s, double t) { return log_scale + std::log(k.value(s, t)); };
  }
  setup.x_lo = -std::log(hi);
  setup.x_hi = -std::log(lo);
  setup.rel_tol = rel_tol;
  return symmetric_square(setup);
}

double integral_I(const KernelSpec& k, const ProfileSpec& p, double n) {
  if (!(n >= 1.0)) throw DomainError("integral_I needs n >= 1");
  if (n == 1.0) return 0.0;
  return square_integral(k, p, 1.0 / n, 1.0, n, 1e-8);
}

std::vector<double> default_n_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(std::pow(10.0, 2.0 + 0.5 * i));
  return grid;
}

DeltaEffReport delta_eff_estimate(const KernelSpec& k, const ProfileSpec& p,
                                  const std::vector<double>& n_grid) {
  if (n_grid.size() < 8) throw ParameterError("n_grid needs at least 8 points");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!(n_grid[i] >= 1.0)) throw ParameterError("n_grid values must be >= 1");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) throw ParameterError("n_grid must increase");
  }
  if (n_grid.back() < 1e6) throw ParameterError("n_grid must reach 1e6");
  const double step = std::log(n_grid[1] / n_grid[0]);
  for (std::size_t i = 1; i + 1 < n_grid.size(); ++i)
    if (std::abs(std::log(n_grid[i + 1] / n_grid[i]) - step) > 1e-2 * step)
      throw ParameterError("n_grid must be log-spaced");

  DeltaEffReport report;
  for (double n : n_grid) {
    const double value = integral_I(k, p, n);
    if (!(value > std::numeric_limits<double>::min())) {
      report.warnings.push_back("I(n) underflows at n = " + format_double(n) +
                                "; grid truncated");
      break;
    }
    report.n_grid.push_back(n);
    report.I_values.push_back(value);
  }
  const std::size_t m = report.n_grid.size();
  if (m < 4) throw NumericError("too few grid points before underflow", static_cast<double>(m));
  std::vector<double> lx, ly;
  for (std::size_t i = m / 2; i < m; ++i) {
    lx.push_back(std::log(report.n_grid[i]));
    ly.push_back(std::log(report.I_values[i]));
  }
  const LinearFit fit = least_squares(lx, ly);
  report.fitted_slope = fit.slope;
  report.delta_eff = -fit.slope;
  report.residual = fit.residual_rms;
  if (k.gamma < 1.0) report.closed_form = delta_eff_closed_form(k.variant, p.delta, k.gamma);
  return report;
}

std::optional<double> delta_eff_closed_form(KernelVariant k, double delta, double gamma) {
  check_delta_gamma(delta, gamma);
  switch (k) {
    case KernelVariant::constant:
      return delta;
    case KernelVariant::min:
    case KernelVariant::sum:
      return gamma <= 1.0 / delta ? delta : delta * (1.0 - gamma) + 1.0;
    case KernelVariant::product:
      if (gamma <= 1.0 / delta) return delta;
      if (near(gamma, 0.5)) return std::nullopt;
      return gamma < 0.5 ? delta * (1.0 - 2.0 * gamma) + 2.0 : 1.0 / gamma;
    case KernelVariant::preferential_attachment: {
      const double boundary = 1.0 - 1.0 / delta;
      if (near(gamma, boundary)) return std::nullopt;
      // Neither the marks' singularity nor the diagonal can beat plain decay delta.
      return std::min(delta, gamma < boundary ? 2.0 : delta * (1.0 - gamma) + 1.0);
    }
  }
  return std::nullopt;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::beta_c_zero: return "beta_c_zero";
    case Regime::beta_c_finite_positive: return "beta_c_finite_positive";
    case Regime::beta_c_infinite: return "beta_c_infinite";
    case Regime::scale_invariant_unknown: return "scale_invariant_unknown";
    case Regime::delta_le_2_finite: return "delta_le_2_finite";
  }
  return "unknown";
}

RegimeLabel classify_regime(KernelVariant k, double delta, double gamma) {
  check_delta_gamma(delta, gamma);
  if (delta <= 2.0)
    return {Regime::delta_le_2_finite,
            "delta <= 2: long edges alone percolate at large beta so beta_c < infinity"};
  const double lower = (delta - 1.0) / delta;  // delta_eff == 2 for min/sum
  const double upper = delta / (delta + 1.0);  // robustness threshold
  auto min_like = [&](bool pa) -> RegimeLabel {
    if (gamma > upper && !near(gamma, upper))
      return {Regime::beta_c_zero,
              "gamma > delta/(delta+1): hubs connect robustly and beta_c = 0"};
    if (near(gamma, upper))
      return {Regime::beta_c_finite_positive,
              "gamma = delta/(delta+1): beta_c finite since delta_eff < 2; positivity open"};
    if (gamma > lower && !near(gamma, lower))
      return {Regime::beta_c_finite_positive,
              "(delta-1)/delta < gamma < delta/(delta+1): delta_eff < 2 and no robustness"};
    if (pa)
      return {Regime::scale_invariant_unknown,
              "preferential attachment with gamma <= (delta-1)/delta: delta_eff = 2 and beta_c open"};
    if (near(gamma, lower))
      return {Regime::scale_invariant_unknown,
              "gamma = (delta-1)/delta: delta_eff = 2 exactly and beta_c open"};
    return {Regime::beta_c_infinite, "gamma < (delta-1)/delta: delta_eff > 2 and no percolation"};
  };
  switch (k) {
    case KernelVariant::constant:
      return {Regime::beta_c_infinite, "constant kernel with delta > 2: delta_eff = delta > 2"};
    case KernelVariant::min:
    case KernelVariant::sum:
      return min_like(false);
    case KernelVariant::preferential_attachment:
      return min_like(true);
    case KernelVariant::product:
      if (near(gamma, 0.5))
        return {Regime::scale_invariant_unknown, "product kernel at gamma = 1/2: beta_c open"};
      if (gamma > 0.5)
        return {Regime::beta_c_zero, "product kernel with gamma > 1/2: beta_c = 0"};
      return {Regime::beta_c_infinite,
              "product kernel with gamma < 1/2 and delta > 2: delta_eff > 2 and no percolation"};
  }
  return {Regime::scale_invariant_unknown, "unclassified"};
}

A1Sequence condition_A1_sequence(const KernelSpec& k, const ProfileSpec& p, std::int64_t K,
                                 double mu, int n_max) {
  if (!(mu > 0.0 && mu < 0.5)) throw ParameterError("mu must lie in (0, 1/2)");
  if (K < 2) throw ParameterError("K must be at least 2");
  if (n_max < 2 || n_max > 6) throw ParameterError("n_max must lie in [2, 6]");
  A1Sequence out;
  for (int n = 2; n <= n_max; ++n) {
    const double k_prev = static_cast<double>(renormalisation_scale(n - 1, K));
    const double k_n = static_cast<double>(renormalisation_scale(n, K));
    const double lo = std::pow(k_prev, mu - 1.0);
    const double integral = square_integral(k, p, lo, 1.0 - lo, k_n);
    const double exponent = k_prev * k_prev * integral;
    const double prefactor = static_cast<double>(n) * n * n * static_cast<double>(K);
    const double value = prefactor * std::exp(-exponent);
    out.n.push_back(n);
    out.exponents.push_back(exponent);
    out.values.push_back(value);
    out.underflow.push_back(value == 0.0);
  }
  return out;
}

A2Series condition_A2_partial_sums(const KernelSpec& k, const ProfileSpec& p, double mu,
                                   int n_max) {
  if (!(mu > 0.0 && mu < 0.5)) throw ParameterError("mu must lie in (0, 1/2)");
  if (n_max < 2 || n_max > 60) throw ParameterError("n_max must lie in [2, 60]");
  A2Series out;
  out.rho_zero_below_one = p.at_zero() < 1.0;
  double sum = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double lo = std::exp2(-(1.0 + mu) * n);
    const double term = std::exp2(2.0 * n) * square_integral(k, p, lo, 1.0, std::exp2(n));
    sum += term;
    out.terms.push_back(term);
    out.partial_sums.push_back(sum);
  }
  const int span = std::min(10, n_max - 1);
  const double last = out.terms.back();
  const double earlier = out.terms[static_cast<std::size_t>(n_max - 1 - span)];
  out.tail_ratio = std::pow(last / earlier, 1.0 / span);
  out.converging = out.tail_ratio < 0.95;
  return out;
}

double edge_marginal(double z, const KernelSpec& k, double delta, double beta) {
  if (!(z > 0.0)) throw DomainError("edge_marginal needs z > 0");
  if (!(delta > 1.0)) throw ParameterError("delta must exceed 1");
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  k.validate();
  const double log_ratio = std::log(z / beta);
  TriangleSetup setup;
  // Marks below e^{-700} carry mass < 1e-304 and are dropped.
  setup.x_lo = 0.0;
  setup.x_hi = 700.0;
  setup.rel_tol = 1e-9;
  setup.integrand = [&, log_ratio](double s, double t) {
    const double exponent = std::exp(-delta * (std::log(k.value(s, t)) + log_ratio));
    return -std::expm1(-exponent);
  };
  return symmetric_square(setup);
}

EdgeMarginalReport edge_marginal_report(const KernelSpec& k, double delta, double beta,
                                        const std::vector<double>& z_grid) {
  if (z_grid.size() < 4) throw ParameterError("z_grid needs at least 4 points");
  EdgeMarginalReport report;
  report.z_grid = z_grid;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    if (i > 0 && !(z_grid[i] > z_grid[i - 1])) throw ParameterError("z_grid must increase");
    const double value = edge_marginal(z_grid[i], k, delta, beta);
    report.P_values.push_back(value);
    if (i >= z_grid.size() / 2 && value > 0.0) {
      lx.push_back(std::log(z_grid[i]));
      ly.push_back(std::log(value));
    }
  }
  if (lx.size() < 2) throw NumericError("edge marginal underflows on the fit range", 0.0);
  const LinearFit fit = least_squares(lx, ly);
  report.alpha_delta_fit = -fit.slope;
  report.alpha = report.alpha_delta_fit / delta;
  return report;
}

TailAlphaReport quenched_tail_alpha(const KernelSpec& k, double delta, std::size_t samples,
                                    std::uint64_t seed) {
  if (!(delta > 1.0)) throw ParameterError("delta must exceed 1");
  if (samples < 100'000) throw ParameterError("tail fit needs at least 1e5 samples");
  k.validate();
  SplitMixEngine engine(derive_seed(seed, static_cast<std::uint64_t>(Stream::monte_carlo)));
  std::vector<double> log_y(samples);
  for (auto& v : log_y) {
    const double s = engine.uniform();
    const double t = engine.uniform();
    v = -delta * std::log(k.value(s, t));
  }
  TailAlphaReport report;
  report.samples = samples;
  const auto [lo_it, hi_it] = std::minmax_element(log_y.begin(), log_y.end());
  if (*hi_it - *lo_it < 1e-12) {
    report.no_polynomial_tail = true;
    return report;
  }
  std::vector<double> lx, ly;
  const auto n = static_cast<double>(samples);
  for (int i = 0; i <= 12; ++i) {
    const double level = std::pow(10.0, -2.0 - 0.25 * i);
    const auto rank = static_cast<std::size_t>(std::ceil(level * n));
    if (rank < 10) break;
    // rank-th largest value: P{Y > y} ~ rank / n at that threshold.
    auto nth = log_y.begin() + static_cast<std::ptrdiff_t>(samples - rank);
    std::nth_element(log_y.begin(), nth, log_y.end());
    lx.push_back(*nth);
    ly.push_back(std::log(static_cast<double>(rank) / n));
  }
  const LinearFit fit = least_squares(lx, ly);
  report.alpha = -fit.slope;
  report.alpha_delta = report.alpha * delta;
  return report;
}

}  // namespace wrcm
