#include "regkernel/error_analysis.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <stdexcept>
#include <string>

#include "regkernel/errors.hpp"
#include "regkernel/quadrature.hpp"

namespace regkernel {
namespace {

constexpr double pi = std::numbers::pi;

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

// measure(r) * (dG^{eps,n}/dr - dG/dr). The singular part measure * dG/dr is
// the unit point-source flux, -1 in every dimension, so it is added exactly.
double signed_gradient_error(const KernelSpec& spec, double r) {
  return measure(spec.dim(), r) * grad_green_reg(spec, r) + 1.0;
}

// Breakpoints where the signed error changes sign, from sampling at 1024
// geometrically spaced radii followed by bisection. Flips below rounding
// level are ignored.
std::vector<double> sign_changes(const KernelSpec& spec, double radius) {
  constexpr int samples = 1024;
  constexpr double noise = 64.0 * DBL_EPSILON;
  const double start = std::min(spec.epsilon(), radius) * 1e-3;
  const double ratio = std::pow(radius / start, 1.0 / (samples - 1));

  std::vector<double> roots;
  double r_prev = start;
  double f_prev = signed_gradient_error(spec, r_prev);
  for (int i = 1; i < samples; ++i) {
    const double r = (i == samples - 1) ? radius : start * std::pow(ratio, i);
    const double f = signed_gradient_error(spec, r);
    if (std::abs(f) > noise && std::abs(f_prev) > noise && (f > 0.0) != (f_prev > 0.0)) {
      double lo = r_prev;
      double hi = r;
      const bool lo_positive = f_prev > 0.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((signed_gradient_error(spec, mid) > 0.0) == lo_positive) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    r_prev = r;
    f_prev = f;
  }
  return roots;
}

double bisect_log_epsilon(const std::function<double(double)>& objective, double target,
                          double lo, double hi, double relative_tolerance, int max_iterations,
                          const std::string& what) {
  if (!(target > 0.0)) throw std::invalid_argument(what + ": target must be > 0");
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument(what + ": invalid epsilon bracket");
  const double f_lo = objective(lo);
  const double f_hi = objective(hi);
  if (!(f_lo < target && target < f_hi)) {
    throw CalibrationError(what + ": target " + std::to_string(target) +
                           " is not bracketed by the error at eps in [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "] (errors " + std::to_string(f_lo) +
                           ", " + std::to_string(f_hi) + ")");
  }
  double mid = std::sqrt(lo * hi);
  double f_mid = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    mid = std::sqrt(lo * hi);  // midpoint in log10(eps)
    f_mid = objective(mid);
    if (std::abs(f_mid - target) <= relative_tolerance * target) return mid;
    if (f_mid < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NumericalError(what + ": bisection did not reach the objective tolerance", mid,
                       std::abs(f_mid - target));
}

template <class Solve>
PairingTable calibrate(Dimension dim, ErrorMode mode, double target, std::span<const int> orders,
                       Solve solve, const std::function<double(const KernelSpec&)>& achieved) {
  std::vector<std::future<PairingRow>> jobs;
  jobs.reserve(orders.size());
  for (int n : orders) {
    jobs.push_back(std::async(std::launch::async, [=, &achieved] {
      const double eps = solve(n);
      return PairingRow{n, eps, achieved(KernelSpec::regularized(dim, eps, n))};
    }));
  }
  PairingTable table{dim, mode, target, {}};
  for (auto& job : jobs) table.rows.push_back(job.get());
  return table;
}

}  // namespace

std::string_view to_string(ErrorMode mode) {
  return mode == ErrorMode::smoothing ? "smoothing" : "modelling";
}

ErrorMode parse_error_mode(std::string_view text) {
  if (text == "smoothing") return ErrorMode::smoothing;
  if (text == "modelling") return ErrorMode::modelling;
  throw std::invalid_argument("unknown error mode '" + std::string(text) +
                              "' (expected smoothing or modelling)");
}

bool PairingTable::epsilon_increasing_in_n() const {
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i].epsilon > sorted[i - 1].epsilon)) return false;
  }
  return true;
}

double smoothing_error(const KernelSpec& spec, double radius) {
  if (!spec.is_regularized()) throw std::invalid_argument("smoothing_error: needs a regularized spec");
  if (!(radius > 0.0)) throw std::invalid_argument("smoothing_error: requires R > 0");

  const double guard = signed_gradient_error(spec, 1e-300);
  if (!std::isfinite(guard)) {
    throw NumericalError("smoothing_error: integrand is not finite near r = 0", guard, 0.0);
  }

  std::vector<double> breakpoints{0.0};
  for (double r = spec.epsilon() / 8.0; r < radius; r *= 2.0) breakpoints.push_back(r);
  for (double root : sign_changes(spec, radius)) breakpoints.push_back(root);
  breakpoints.push_back(radius);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  auto integrand = [&](double r) { return std::abs(signed_gradient_error(spec, r)); };
  return integrate_panels(integrand, breakpoints, {.abs_tol = 1e-10}).value;
}

double modelling_error(const KernelSpec& spec, const ParticleSystem& system) {
  if (spec.dim() != system.dim()) {
    throw std::invalid_argument("modelling_error: kernel and system dimensions differ");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < system.size(); ++j) {
    for (std::size_t k = j + 1; k < system.size(); ++k) {
      const double w = system.weight(j, k);
      if (w == 0.0) continue;
      const double r = system.distance(j, k);
      if (r == 0.0) throw DomainError("modelling_error: coincident particles");
      sum += w * (potential(spec, r) - green(spec.dim(), r));
    }
  }
  return std::abs(sum);
}

double solve_epsilon_smoothing(int n, Dimension dim, double target, double radius) {
  if (n < 0) throw std::invalid_argument("solve_epsilon_smoothing: n must be >= 0");
  if (!(radius > 0.0)) throw std::invalid_argument("solve_epsilon_smoothing: R must be > 0");
  auto objective = [&](double eps) {
    return smoothing_error(KernelSpec::regularized(dim, eps, n), radius);
  };
  return bisect_log_epsilon(objective, target, 1e-8, radius, 1e-6, 200,
                            "solve_epsilon_smoothing");
}

double solve_epsilon_modelling(int n, Dimension dim, double target, const ParticleSystem& system,
                               const CalibrationOptions& options) {
  if (n < 0) throw std::invalid_argument("solve_epsilon_modelling: n must be >= 0");
  auto objective = [&](double eps) {
    return modelling_error(KernelSpec::regularized(dim, eps, n), system);
  };
  return bisect_log_epsilon(objective, target, options.epsilon_min, options.epsilon_max,
                            options.relative_tolerance, options.max_iterations,
                            "solve_epsilon_modelling");
}

PairingTable calibrate_smoothing_table(Dimension dim, double target, std::span<const int> orders,
                                       double radius) {
  return calibrate(
      dim, ErrorMode::smoothing, target, orders,
      [=](int n) { return solve_epsilon_smoothing(n, dim, target, radius); },
      [=](const KernelSpec& spec) { return smoothing_error(spec, radius); });
}

PairingTable calibrate_modelling_table(Dimension dim, double target, std::span<const int> orders,
                                       const ParticleSystem& system,
                                       const CalibrationOptions& options) {
  return calibrate(
      dim, ErrorMode::modelling, target, orders,
      [&](int n) { return solve_epsilon_modelling(n, dim, target, system, options); },
      [&](const KernelSpec& spec) { return modelling_error(spec, system); });
}

namespace {

double hyp2f1_series(double a, double b, double c, double z) {
  constexpr long max_terms = 10'000'000;
  const double abs_z = std::abs(z);
  // Past this index the term ratio is monotone in k, so the geometric tail
  // bound below is valid.
  const double monotone_from = std::abs(a) + std::abs(b) + std::abs(c) + 2.0;

  double term = 1.0;
  double sum = 1.0;
  for (long k = 0; k < max_terms; ++k) {
    const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    term *= ratio;
    if (term == 0.0) return sum;  // a or b is a non-positive integer
    sum += term;
    if (static_cast<double>(k) >= monotone_from) {
      const double r = std::max(std::abs(ratio), abs_z);
      const double tail_bound = std::abs(term) * r / (1.0 - r);
      if (tail_bound <= 1e-15 * std::abs(sum)) return sum;
    }
  }
  throw NumericalError("hyp2f1: series did not converge", sum, std::abs(term));
}

}  // namespace

double hyp2f1(double a, double b, double c, double z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("hyp2f1: power series requires |z| < 1");
  if (c <= 0.0 && c == std::floor(c)) {
    throw DomainError("hyp2f1: c must not be a non-positive integer");
  }
  if (z >= 0.0) return hyp2f1_series(a, b, c, z);
  // Negative arguments alternate and cancel. Pfaff's transformation maps
  // (-1, 0) onto (0, 1/2) with the same kind of series.
  const double w = z / (z - 1.0);
  if (std::abs(c - b) <= std::abs(c - a)) {
    return std::pow(1.0 - z, -a) * hyp2f1_series(a, c - b, c, w);
  }
  return std::pow(1.0 - z, -b) * hyp2f1_series(c - a, b, c, w);
}

double tail_sum(const TailSumInput& input) {
  const double z = input.z;
  const int n = input.n;
  if (!(z > 0.0 && z < 1.0)) throw DomainError("tail_sum: requires 0 < z < 1");
  if (n < 0) throw std::invalid_argument("tail_sum: n must be >= 0");
  const double root_z = std::sqrt(z);
  const double root_1mz = std::sqrt(1.0 - z);

  switch (input.dim) {
    case Dimension::one: {
      double s = 2.0 * (-root_z / (1.0 + root_1mz) + 1.0);
      double coefficient = 1.0;  // (1/2 choose i) (-1)^i
      for (int i = 1; i <= n; ++i) {
        coefficient *= -(0.5 - (i - 1)) / i;
        s -= 2.0 * coefficient * (std::pow(z, i - 0.5) - 1.0);
      }
      return s;
    }
    case Dimension::three: {
      const double denom = 1.0 + root_1mz;
      double s = -2.0 + 1.5 * root_z + z * root_z / (2.0 * denom * denom);
      double coefficient = 1.0;  // (-1/2 choose i) (-1)^i
      for (int i = 1; i <= n; ++i) {
        coefficient *= (i - 0.5) / i;
        s -= coefficient * ((-0.5 - i) / (0.5 - i) * (std::pow(z, i - 0.5) - 1.0) -
                            (std::pow(z, i + 0.5) - 1.0));
      }
      return s;
    }
    case Dimension::two: {
      // Full sum over i >= 1 of the untruncated integrals is pi/2; peel off
      // the first n, then subtract the part of each remaining integral that
      // lies beyond R.
      double head = pi / 2.0;
      double c = pi / 4.0;  // sqrt(pi) Gamma(i - 1/2) / (4 i!)
      for (int i = 1; i <= n; ++i) {
        head -= c;
        c *= (i - 0.5) / (i + 1.0);
      }
      const bool direct = z < 0.25;
      const double x2 = z / (1.0 - z);  // (eps/R)^2
      constexpr long max_terms = 1'000'000;
      double tail = 0.0;
      for (long i = n + 1; i < n + 1 + max_terms; ++i) {
        const double di = static_cast<double>(i);
        const double term =
            direct ? std::pow(x2, di - 0.5) / (2.0 * di - 1.0) *
                         hyp2f1(di + 1.0, di - 0.5, di + 0.5, -x2)
                   : std::pow(z, di - 0.5) / (2.0 * di - 1.0) *
                         hyp2f1(-0.5, di - 0.5, di + 0.5, z);
        tail += term;
        // terms shrink roughly geometrically with ratio z
        if (std::abs(term) / (1.0 - z) < 1e-14 * std::abs(tail)) return head - tail;
      }
      throw NumericalError("tail_sum: 2D series did not converge", head - tail, 0.0);
    }
  }
  return 0.0;
}

}  // namespace regkernel
