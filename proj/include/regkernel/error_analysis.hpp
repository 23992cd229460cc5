#pragma once

// Smoothing and modelling errors of the regularized kernels, the tail sums
// S[n, z] bounding the smoothing error, and epsilon calibration against an
// error target.

#include <span>
#include <string_view>
#include <vector>

#include "regkernel/dynamics.hpp"
#include "regkernel/kernel.hpp"

namespace regkernel {

enum class ErrorMode { smoothing, modelling };

std::string_view to_string(ErrorMode mode);
/// Throws std::invalid_argument for anything but "smoothing"/"modelling".
ErrorMode parse_error_mode(std::string_view text);

struct PairingRow {
  int n;
  double epsilon;
  double achieved_error;
};

struct PairingTable {
  Dimension dim;
  ErrorMode mode;
  double target;
  std::vector<PairingRow> rows;

  /// True when epsilon strictly increases with n down the table.
  bool epsilon_increasing_in_n() const;
};

/// Integral over the ball of radius R of |dG^{eps,n}/dr - dG/dr| with the
/// radial measure 2, 2 pi r or 4 pi r^2.
double smoothing_error(const KernelSpec& spec, double radius = 1.0);

/// |H^{eps,n}(0) - H(0)| = |sum_{j<k} w_jk (G^{eps,n} - G)(|x_j - x_k|)|.
/// Throws DomainError for coincident particles.
double modelling_error(const KernelSpec& spec, const ParticleSystem& system);

struct CalibrationOptions {
  double epsilon_min = 1e-8;
  double epsilon_max = 1.0;
  double relative_tolerance = 1e-6;
  int max_iterations = 200;
};

/// Bisection on log10(eps) over [1e-8, R] for smoothing_error(eps) = target.
/// Throws CalibrationError when the target is not bracketed.
double solve_epsilon_smoothing(int n, Dimension dim, double target, double radius = 1.0);

/// Same bracketed bisection with modelling_error as the objective, over
/// [options.epsilon_min, options.epsilon_max].
double solve_epsilon_modelling(int n, Dimension dim, double target, const ParticleSystem& system,
                               const CalibrationOptions& options = {});

/// Calibrates one row per order; rows are solved concurrently.
PairingTable calibrate_smoothing_table(Dimension dim, double target, std::span<const int> orders,
                                       double radius = 1.0);
PairingTable calibrate_modelling_table(Dimension dim, double target, std::span<const int> orders,
                                       const ParticleSystem& system,
                                       const CalibrationOptions& options = {});

struct TailSumInput {
  Dimension dim;
  int n;
  /// z = eps^2 / (R^2 + eps^2), in (0, 1).
  double z;
};

/// S[n, z] with eps * |S| equal to the magnitude of the signed radial
/// integral of d(G^{eps,n} - G)/dr over [0, R] with unit density and the
/// dimension's measure. In 1D the sum is normalized without the factor -1/2
/// of G, so there eps * |S| is twice that integral.
/// 1D and 3D use the closed form at n = 0 minus the first n series terms.
/// 2D sums the Gauss hypergeometric tail series; for z >= 1/4 each term is
/// Pfaff-transformed to argument z, which converges faster there than the
/// direct argument -z/(1-z).
double tail_sum(const TailSumInput& input);

/// Gauss hypergeometric 2F1(a, b; c; z) by its power series, |z| < 1.
/// Negative z is first mapped to z/(z-1) by a Pfaff transformation.
/// Throws DomainError for |z| >= 1 or c a non-positive integer and
/// NumericalError when the series has not converged after 10^7 terms.
double hyp2f1(double a, double b, double c, double z);

}  // namespace regkernel
