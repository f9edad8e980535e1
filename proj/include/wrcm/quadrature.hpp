#pragma once

#include <functional>
#include <span>

namespace wrcm {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute error
  int intervals = 0;
  bool converged = false;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature of f over
/// [knots.front(), knots.back()]; interior knots are mandatory split points
/// (kinks, scale changes). Stops once error <= max(abs_tol, rel_tol |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> knots, double rel_tol,
                                    double abs_tol = 0.0, int max_intervals = 4000);

}  // namespace wrcm
