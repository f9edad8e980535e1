#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wrcm/kernels.hpp"

namespace wrcm {

/// ∫∫_{[lo,hi]²} rho(g(s,t) * scale) ds dt, relative accuracy `rel_tol`.
/// Integrates the s <= t half in logarithmic coordinates and doubles it; the
/// kink of rho at argument 1 is located by bisection and used as a split
/// point. Throws NumericError when the requested accuracy is not reached.
double square_integral(const KernelSpec& k, const ProfileSpec& p, double lo, double hi,
                       double scale, double rel_tol = 1e-8);

/// I(n) = ∫∫_{[1/n,1]²} rho(g(s,t) n); zero at n == 1.
double integral_I(const KernelSpec& k, const ProfileSpec& p, double n);

struct DeltaEffReport {
  std::vector<double> n_grid;  ///< after any underflow truncation
  std::vector<double> I_values;
  double fitted_slope = 0.0;
  double delta_eff = 0.0;
  std::optional<double> closed_form;
  double residual = 0.0;  ///< rms residual of the log-log fit
  std::vector<std::string> warnings;
};

/// 13 points, half a decade apart, from 1e2 to 1e8.
std::vector<double> default_n_grid();

/// Slope of log I(n) against log n over the upper half of a log-spaced grid.
DeltaEffReport delta_eff_estimate(const KernelSpec& k, const ProfileSpec& p,
                                  const std::vector<double>& n_grid);

/// Asymptotic decay exponent where known in closed form; empty on the
/// boundaries where no formula applies. Throws ParameterError outside δ > 1, γ ∈ [0,1).
std::optional<double> delta_eff_closed_form(KernelVariant k, double delta, double gamma);
inline std::optional<double> delta_eff_closed_form(const KernelSpec& k, double delta) {
  return delta_eff_closed_form(k.variant, delta, k.gamma);
}

enum class Regime {
  beta_c_zero,
  beta_c_finite_positive,
  beta_c_infinite,
  scale_invariant_unknown,
  delta_le_2_finite,
};

struct RegimeLabel {
  Regime label = Regime::scale_invariant_unknown;
  std::string provenance;
};

std::string_view to_string(Regime r);

/// Percolation regime of the critical intensity beta_c. Exact regime
/// boundaries (to within 1e-12) get the boundary label instead of a side.
RegimeLabel classify_regime(KernelVariant k, double delta, double gamma);

struct A1Sequence {
  std::vector<int> n;  ///< 2..n_max
  std::vector<double> values;
  std::vector<bool> underflow;  ///< value reported as exact 0 after exp underflow
  std::vector<double> exponents;  ///< K_{n-1}² times the restricted integral
};

/// n³K exp(-K_{n-1}² ∫∫_{[K_{n-1}^{mu-1}, 1-K_{n-1}^{mu-1}]²} rho(g K_n)) for n = 2..n_max.
A1Sequence condition_A1_sequence(const KernelSpec& k, const ProfileSpec& p, std::int64_t K,
                                 double mu, int n_max);

struct A2Series {
  std::vector<double> terms;  ///< n = 1..n_max
  std::vector<double> partial_sums;
  double tail_ratio = 0.0;  ///< geometric-mean term ratio over the last ten terms
  bool converging = false;
  bool rho_zero_below_one = false;  ///< rho(0+) < 1, required for the condition to apply
};

/// Partial sums of 2^{2n} ∫∫_{[2^{-(1+mu)n},1]²} rho(g 2^n). Converging when
/// the geometric-mean ratio of the last ten terms is below 0.95.
A2Series condition_A2_partial_sums(const KernelSpec& k, const ProfileSpec& p, double mu,
                                   int n_max);

/// P_z = ∫∫ 1 - exp(-g(s,t)^{-delta} (z/beta)^{-delta}) ds dt over independent uniform marks.
double edge_marginal(double z, const KernelSpec& k, double delta, double beta);

struct EdgeMarginalReport {
  std::vector<double> z_grid;
  std::vector<double> P_values;
  double alpha_delta_fit = 0.0;  ///< minus the log-log slope over the upper half of z_grid
  double alpha = 0.0;
};

EdgeMarginalReport edge_marginal_report(const KernelSpec& k, double delta, double beta,
                                        const std::vector<double>& z_grid);

struct TailAlphaReport {
  double alpha = 0.0;  ///< tail index of Y = g(T,S)^{-delta}
  double alpha_delta = 0.0;  ///< decay exponent of P_z
  bool no_polynomial_tail = false;  ///< Y is bounded (constant kernel)
  std::size_t samples = 0;
};

/// Tail index of Y = g(T,S)^{-delta} by regressing log P{Y > y} on log y at
/// exceedance levels 1e-2 .. 1e-5 of a Monte Carlo sample of mark pairs.
TailAlphaReport quenched_tail_alpha(const KernelSpec& k, double delta,
                                    std::size_t samples = 10'000'000, std::uint64_t seed = 1);

}  // namespace wrcm
