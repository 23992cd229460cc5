#include "regkernel/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "regkernel/errors.hpp"

namespace regkernel {
namespace {

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

void disable_gsl_abort() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

double trampoline(double x, void* params) {
  const auto& f = *static_cast<const std::function<double(double)>*>(params);
  return f(x);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
  if (!(b >= a)) throw std::invalid_argument("integrate: requires b >= a");
  if (a == b) return {0.0, 0.0};
  disable_gsl_abort();

  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> workspace(
      gsl_integration_workspace_alloc(options.max_intervals));
  if (!workspace) throw std::bad_alloc();

  gsl_function fn;
  fn.function = &trampoline;
  fn.params = const_cast<std::function<double(double)>*>(&f);

  double value = 0.0;
  double error = 0.0;
  const int status = gsl_integration_qag(&fn, a, b, options.abs_tol, options.rel_tol,
                                         options.max_intervals, GSL_INTEG_GAUSS21,
                                         workspace.get(), &value, &error);
  if (status != GSL_SUCCESS) {
    throw NumericalError("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                             "] failed: " + gsl_strerror(status),
                         value, error);
  }
  return {value, error};
}

QuadratureResult integrate_panels(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& options) {
  if (breakpoints.size() < 2) return {0.0, 0.0};
  QuadratureOptions panel = options;
  panel.abs_tol = options.abs_tol / static_cast<double>(breakpoints.size() - 1);

  QuadratureResult total{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto part = integrate(f, breakpoints[i], breakpoints[i + 1], panel);
    total.value += part.value;
    total.abs_error += part.abs_error;
  }
  return total;
}

}  // namespace regkernel
