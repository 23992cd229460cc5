#pragma once

// Free-space Laplace kernels and the truncated-series regularizations
// G^{eps,n} obtained by expanding G about (r^2 + eps^2).

#include <span>
#include <vector>

namespace regkernel {

enum class Dimension : int { one = 1, two = 2, three = 3 };

/// Throws std::invalid_argument unless value is 1, 2 or 3.
Dimension make_dimension(int value);

constexpr int to_int(Dimension dim) noexcept { return static_cast<int>(dim); }

/// Selects one member of the kernel family. The singular kernel is a separate
/// variant rather than eps = 0, which the series in a = r/eps cannot express.
class KernelSpec {
 public:
  /// Throws std::invalid_argument unless epsilon > 0 (finite) and n >= 0.
  static KernelSpec regularized(Dimension dim, double epsilon, int n);
  static KernelSpec singular(Dimension dim);

  Dimension dim() const noexcept { return dim_; }
  /// 0 for the singular kernel.
  double epsilon() const noexcept { return epsilon_; }
  /// Truncation order; 0 for the singular kernel.
  int order() const noexcept { return order_; }
  bool is_regularized() const noexcept { return regularized_; }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelSpec(Dimension dim, double epsilon, int order, bool regularized)
      : dim_(dim), epsilon_(epsilon), order_(order), regularized_(regularized) {}

  Dimension dim_;
  double epsilon_;
  int order_;
  bool regularized_;
};

struct RadialValue {
  double r;
  double value;
};

/// G(r): -r/2, -ln(r)/(2 pi), 1/(4 pi r). Throws DomainError for r <= 0.
double green(Dimension dim, double r);

/// dG/dr for r > 0. Throws DomainError for r <= 0.
double green_derivative(Dimension dim, double r);

/// Generalized binomial coefficient (alpha choose i) via the falling
/// factorial, evaluated as a running product. Accurate to a few ulps for
/// i <= 30; relative error grows roughly linearly in i beyond that.
double choose_general(double alpha, int i);

/// n-term truncated series G^{eps,n}(r), r >= 0. Requires a regularized spec.
double green_reg(const KernelSpec& spec, double r);

/// dG^{eps,n}/dr, r >= 0; exactly zero at r = 0 (no self-force).
double grad_green_reg(const KernelSpec& spec, double r);

/// Closed-form Laplacian of G^{eps,n}. The Gamma ratios at half-integer
/// arguments come from the recurrence Gamma(z+1) = z Gamma(z).
double laplacian_reg_closed(const KernelSpec& spec, double r);

/// Term-by-term Laplacian summation using choose_general. Slower than the
/// closed form; kept as an independent route for cross-checking.
double laplacian_reg_series(const KernelSpec& spec, double r);

/// Integral of the closed-form Laplacian against the radial measure
/// (2, 2 pi r, 4 pi r^2) over [0, r_max]. Tends to -1 as r_max/eps grows.
/// Throws NumericalError if the adaptive quadrature cannot meet 1e-10.
double laplacian_mass(const KernelSpec& spec, double r_max);

/// Dispatches to green/green_reg depending on the spec variant.
double potential(const KernelSpec& spec, double r);

/// Dispatches to green_derivative/grad_green_reg depending on the spec variant.
double radial_derivative(const KernelSpec& spec, double r);

enum class KernelQuantity { green, green_reg, grad_green_reg, laplacian };

/// Evaluates one quantity on each radius. `green` uses the singular kernel
/// and yields NaN at r = 0.
std::vector<RadialValue> sample_curve(const KernelSpec& spec, KernelQuantity quantity,
                                      std::span<const double> radii);

}  // namespace regkernel
