#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace regkernel {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 4000;
};

struct QuadratureResult {
  double value;
  double abs_error;
};

/// Adaptive Gauss-Kronrod (21 point) integration of f over [a, b].
/// Throws NumericalError carrying the partial estimate when the tolerance
/// cannot be reached.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Integrates over consecutive panels [b0,b1], [b1,b2], ... splitting the
/// absolute tolerance evenly. Breakpoints must be non-decreasing.
QuadratureResult integrate_panels(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& options = {});

}  // namespace regkernel
