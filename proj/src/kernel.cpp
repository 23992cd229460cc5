#include "regkernel/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "regkernel/errors.hpp"
#include "regkernel/quadrature.hpp"

namespace regkernel {
namespace {

constexpr double pi = std::numbers::pi;

using series_real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>,
                                                   boost::multiprecision::et_off>;

void require_regularized(const KernelSpec& spec, const char* op) {
  if (!spec.is_regularized()) {
    throw std::invalid_argument(std::string(op) + ": requires a regularized kernel spec");
  }
}

void require_nonnegative_radius(double r, const char* op) {
  if (!(r >= 0.0)) throw std::invalid_argument(std::string(op) + ": requires r >= 0");
}

// Gamma(n + m + 1/2) / (sqrt(pi) Gamma(n + 1)) for m = 1 or 2, built from
// Gamma(1/2) = sqrt(pi) and Gamma(z + 1) = z Gamma(z) with the factorial
// interleaved so neither factor overflows.
double half_integer_gamma_ratio(int n, int m) {
  double ratio = 1.0;
  for (int k = 0; k < m; ++k) ratio *= k + 0.5;
  for (int j = 1; j <= n; ++j) ratio *= (j + m - 0.5) / j;
  return ratio;
}

double measure(Dimension dim, double r) {
  switch (dim) {
    case Dimension::one:
      return 2.0;
    case Dimension::two:
      return 2.0 * pi * r;
    case Dimension::three:
      return 4.0 * pi * r * r;
  }
  return 0.0;
}

}  // namespace

Dimension make_dimension(int value) {
  if (value < 1 || value > 3) {
    throw std::invalid_argument("dimension must be 1, 2 or 3 (got " + std::to_string(value) + ")");
  }
  return static_cast<Dimension>(value);
}

KernelSpec KernelSpec::regularized(Dimension dim, double epsilon, int n) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("kernel spec: epsilon must be finite and > 0");
  }
  if (n < 0) throw std::invalid_argument("kernel spec: truncation order n must be >= 0");
  return KernelSpec(dim, epsilon, n, true);
}

KernelSpec KernelSpec::singular(Dimension dim) { return KernelSpec(dim, 0.0, 0, false); }

double green(Dimension dim, double r) {
  if (!(r > 0.0)) throw DomainError("green: singular kernel requires r > 0");
  switch (dim) {
    case Dimension::one:
      return -0.5 * r;
    case Dimension::two:
      return -std::log(r) / (2.0 * pi);
    case Dimension::three:
      return 1.0 / (4.0 * pi * r);
  }
  return 0.0;
}

double green_derivative(Dimension dim, double r) {
  if (!(r > 0.0)) throw DomainError("green_derivative: singular kernel requires r > 0");
  switch (dim) {
    case Dimension::one:
      return -0.5;
    case Dimension::two:
      return -1.0 / (2.0 * pi * r);
    case Dimension::three:
      return -1.0 / (4.0 * pi * r * r);
  }
  return 0.0;
}

double choose_general(double alpha, int i) {
  if (i < 0) throw std::invalid_argument("choose_general: requires i >= 0");
  double value = 1.0;
  for (int k = 0; k < i; ++k) value *= (alpha - k) / (k + 1);
  return value;
}

double green_reg(const KernelSpec& spec, double r) {
  require_regularized(spec, "green_reg");
  require_nonnegative_radius(r, "green_reg");
  const double eps2 = spec.epsilon() * spec.epsilon();
  const double s = r * r + eps2;
  const double q = eps2 / s;
  const int n = spec.order();

  switch (spec.dim()) {
    case Dimension::one: {
      // coefficient = (1/2 choose i) (-1)^i
      double coefficient = 1.0;
      double q_power = 1.0;
      double sum = 1.0;
      for (int i = 1; i <= n; ++i) {
        coefficient *= -(0.5 - (i - 1)) / i;
        q_power *= q;
        sum += coefficient * q_power;
      }
      return -0.5 * std::sqrt(s) * sum;
    }
    case Dimension::two: {
      double q_power = 1.0;
      double sum = 0.0;
      for (int i = 1; i <= n; ++i) {
        q_power *= q;
        sum += q_power / i;
      }
      return (-std::log(s) + sum) / (4.0 * pi);
    }
    case Dimension::three: {
      // coefficient = (-1/2 choose i) (-1)^i
      double coefficient = 1.0;
      double q_power = 1.0;
      double sum = 1.0;
      for (int i = 1; i <= n; ++i) {
        coefficient *= (i - 0.5) / i;
        q_power *= q;
        sum += coefficient * q_power;
      }
      return sum / (4.0 * pi * std::sqrt(s));
    }
  }
  return 0.0;
}

double grad_green_reg(const KernelSpec& spec, double r) {
  require_regularized(spec, "grad_green_reg");
  require_nonnegative_radius(r, "grad_green_reg");
  // The series carries an overall factor r; the branch makes the self-force
  // rule explicit.
  if (r == 0.0) return 0.0;

  const double eps2 = spec.epsilon() * spec.epsilon();
  const double s = r * r + eps2;
  const double q = eps2 / s;
  const int n = spec.order();

  switch (spec.dim()) {
    case Dimension::one: {
      double coefficient = 1.0;
      double q_power = 1.0;
      double sum = 0.5;
      for (int i = 1; i <= n; ++i) {
        coefficient *= -(0.5 - (i - 1)) / i;
        q_power *= q;
        sum += coefficient * (0.5 - i) * q_power;
      }
      return -r / std::sqrt(s) * sum;
    }
    case Dimension::two: {
      double q_power = 1.0;
      double sum = 1.0;
      for (int i = 1; i <= n; ++i) {
        q_power *= q;
        sum += q_power;
      }
      return -r / (2.0 * pi * s) * sum;
    }
    case Dimension::three: {
      double coefficient = 1.0;
      double q_power = 1.0;
      double sum = -0.5;
      for (int i = 1; i <= n; ++i) {
        coefficient *= (i - 0.5) / i;
        q_power *= q;
        sum += coefficient * (-0.5 - i) * q_power;
      }
      return r / (2.0 * pi * s * std::sqrt(s)) * sum;
    }
  }
  return 0.0;
}

double laplacian_reg_closed(const KernelSpec& spec, double r) {
  require_regularized(spec, "laplacian_reg_closed");
  require_nonnegative_radius(r, "laplacian_reg_closed");
  const double eps = spec.epsilon();
  const double a = r / eps;
  const double log_base = std::log1p(a * a);  // ln(1 + a^2)
  const int n = spec.order();

  switch (spec.dim()) {
    case Dimension::one:
      return -half_integer_gamma_ratio(n, 1) / eps * std::exp(-(n + 1.5) * log_base);
    case Dimension::two:
      return -(n + 1.0) / (pi * eps * eps) * std::exp(-(n + 2.0) * log_base);
    case Dimension::three:
      return -half_integer_gamma_ratio(n, 2) / (pi * eps * eps * eps) *
             std::exp(-(n + 2.5) * log_base);
  }
  return 0.0;
}

double laplacian_reg_series(const KernelSpec& spec, double r) {
  require_regularized(spec, "laplacian_reg_series");
  require_nonnegative_radius(r, "laplacian_reg_series");
  // The terms cancel down to a fraction (eps^2 / s)^(n+1) of their size, so
  // they are summed with ~200 digits; the result is exact to double as long
  // as (n + 1) log10(s / eps^2) stays below ~180.
  using Real = series_real;
  const Real eps2 = Real(spec.epsilon()) * spec.epsilon();
  const Real r2 = Real(r) * r;
  const Real s = r2 + eps2;
  const Real inv_s = 1 / s;
  const int n = spec.order();

  Real sum = 0;
  Real choose = 1;      // (alpha choose i)
  Real power = 1;       // (-eps^2 / s)^i, or (eps^2 / s)^i in 2D
  switch (spec.dim()) {
    case Dimension::one: {
      const Real base = inv_s / sqrt(s);
      for (int i = 0; i <= n; ++i) {
        sum += choose * power * (Real(0.5) - i) * base * (eps2 - 2 * i * r2);
        choose *= (Real(0.5) - i) / (i + 1);
        power *= -eps2 * inv_s;
      }
      return -static_cast<double>(sum);
    }
    case Dimension::two:
      for (int i = 0; i <= n; ++i) {
        sum += power * inv_s * inv_s * (eps2 - i * r2);
        power *= eps2 * inv_s;
      }
      return -static_cast<double>(sum / boost::math::constants::pi<Real>());
    case Dimension::three: {
      const Real base = inv_s * inv_s / sqrt(s);
      for (int i = 0; i <= n; ++i) {
        sum += choose * power * (Real(0.5) + i) * base * (3 * eps2 - 2 * i * r2);
        choose *= (Real(-0.5) - i) / (i + 1);
        power *= -eps2 * inv_s;
      }
      return -static_cast<double>(sum / (2 * boost::math::constants::pi<Real>()));
    }
  }
  return 0.0;
}

double laplacian_mass(const KernelSpec& spec, double r_max) {
  require_regularized(spec, "laplacian_mass");
  if (!(r_max > 0.0)) throw std::invalid_argument("laplacian_mass: requires r_max > 0");

  // Integrate in u = r/eps so the peak at the origin has unit width.
  const double eps = spec.epsilon();
  const double u_max = r_max / eps;
  auto integrand = [&](double u) {
    const double r = eps * u;
    return eps * measure(spec.dim(), r) * laplacian_reg_closed(spec, r);
  };

  std::vector<double> breakpoints{0.0};
  for (double u = 0.125; u < u_max; u *= 2.0) breakpoints.push_back(u);
  breakpoints.push_back(u_max);

  return integrate_panels(integrand, breakpoints, {.abs_tol = 1e-10}).value;
}

double potential(const KernelSpec& spec, double r) {
  return spec.is_regularized() ? green_reg(spec, r) : green(spec.dim(), r);
}

double radial_derivative(const KernelSpec& spec, double r) {
  return spec.is_regularized() ? grad_green_reg(spec, r) : green_derivative(spec.dim(), r);
}

std::vector<RadialValue> sample_curve(const KernelSpec& spec, KernelQuantity quantity,
                                      std::span<const double> radii) {
  std::vector<RadialValue> out;
  out.reserve(radii.size());
  for (double r : radii) {
    double value = 0.0;
    switch (quantity) {
      case KernelQuantity::green:
        value = r > 0.0 ? green(spec.dim(), r) : std::numeric_limits<double>::quiet_NaN();
        break;
      case KernelQuantity::green_reg:
        value = green_reg(spec, r);
        break;
      case KernelQuantity::grad_green_reg:
        value = grad_green_reg(spec, r);
        break;
      case KernelQuantity::laplacian:
        value = laplacian_reg_closed(spec, r);
        break;
    }
    out.push_back({r, value});
  }
  return out;
}

}  // namespace regkernel
