#pragma once

// N-body state, pairwise force assembly, fourth-order symplectic stepping and
// Hamiltonian bookkeeping for systems driven by any member of the kernel family.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "regkernel/kernel.hpp"

namespace regkernel {

/// repulsive:  x_j'' = -sum_k w_jk grad G,  H = T + sum_{j<k} w_jk G
/// attractive: x_j'' = +sum_k w_jk grad G,  H = T - sum_{j<k} w_jk G
enum class ForceSign { repulsive, attractive };

/// Positions and velocities are stored row-major, one row of `dim` entries per
/// particle. Pair weights form a symmetric N x N matrix with zero diagonal.
class ParticleSystem {
 public:
  ParticleSystem(Dimension dim, std::vector<double> positions, std::vector<double> velocities,
                 std::vector<double> pair_weights, ForceSign force_sign);

  /// w_jk = q_j q_k.
  static ParticleSystem from_charges(Dimension dim, std::vector<double> positions,
                                     std::vector<double> velocities,
                                     std::span<const double> charges, ForceSign force_sign);

  /// w_jk = weight for every j != k.
  static ParticleSystem with_uniform_weight(Dimension dim, std::vector<double> positions,
                                            std::vector<double> velocities, double weight,
                                            ForceSign force_sign);

  Dimension dim() const noexcept { return dim_; }
  std::size_t stride() const noexcept { return static_cast<std::size_t>(to_int(dim_)); }
  std::size_t size() const noexcept { return positions_.size() / stride(); }
  ForceSign force_sign() const noexcept { return force_sign_; }

  std::span<const double> positions() const noexcept { return positions_; }
  std::span<double> positions() noexcept { return positions_; }
  std::span<const double> velocities() const noexcept { return velocities_; }
  std::span<double> velocities() noexcept { return velocities_; }
  std::span<const double> pair_weights() const noexcept { return pair_weights_; }

  std::span<const double> position(std::size_t j) const { return positions().subspan(j * stride(), stride()); }
  std::span<const double> velocity(std::size_t j) const { return velocities().subspan(j * stride(), stride()); }
  double weight(std::size_t j, std::size_t k) const { return pair_weights_[j * size() + k]; }

  double distance(std::size_t j, std::size_t k) const;
  /// +inf for fewer than two particles.
  double min_pair_distance() const;

  friend bool operator==(const ParticleSystem&, const ParticleSystem&) = default;

 private:
  Dimension dim_;
  std::vector<double> positions_;
  std::vector<double> velocities_;
  std::vector<double> pair_weights_;
  ForceSign force_sign_;
};

/// Writes accelerations (N x dim, row-major) into `out`. Each unordered pair is
/// visited once in ascending (j, k) order and applied antisymmetrically.
/// Coincident particles contribute nothing under a regularized kernel and
/// raise DomainError under the singular one.
void accelerations(const KernelSpec& spec, const ParticleSystem& system, std::span<double> out);
std::vector<double> accelerations(const KernelSpec& spec, const ParticleSystem& system);

/// Kinetic energy plus the signed pair potential; conserved by the exact flow.
double hamiltonian(const KernelSpec& spec, const ParticleSystem& system);

/// Forest-Ruth fourth-order composition, drift first:
/// drift theta/2, kick theta, drift (1-theta)/2, kick 1-2theta,
/// drift (1-theta)/2, kick theta, drift theta/2, with theta = 1/(2 - 2^{1/3}).
/// A negative dt integrates backwards.
ParticleSystem step4(ParticleSystem system, double dt, const KernelSpec& spec);

/// In-place variant; `scratch` is resized as needed and reused across calls.
void step4_inplace(ParticleSystem& system, double dt, const KernelSpec& spec,
                   std::vector<double>& scratch);

struct HamiltonianTrace {
  std::vector<double> times;
  std::vector<double> h_reg;
  double h_reg_0 = 0.0;
  /// Singular-kernel Hamiltonian at t = 0; empty when particles coincide.
  std::optional<double> h_exact_0;

  /// max_t |H_reg(t) - H_reg(0)|
  double time_stepping_error() const;
  /// |H_reg(0) - H(0)|
  double modelling_error() const;
  /// max_t |H_reg(t) - H(0)|
  double total_error() const;
  /// total_error() <= time_stepping_error() + modelling_error() up to rounding.
  bool satisfies_error_decomposition() const;
};

using StepObserver = std::function<void(std::size_t step, double t, const ParticleSystem&)>;

struct SimulationOptions {
  double dt = 0.0;
  double t_end = 0.0;
  std::size_t record_every = 1;
  /// Called at t = 0 and after every step.
  StepObserver observer;
};

struct SimulationResult {
  HamiltonianTrace trace;
  ParticleSystem final_state;
};

/// Number of fixed steps taken for a horizon: ceil(t_end/dt), tolerant of
/// rounding when t_end is an exact multiple of dt.
std::size_t step_count(double t_end, double dt);

/// Fixed-step integration. The trace holds t = 0, every `record_every`-th
/// step and the final step. Throws IntegrationBlowup on a non-finite state.
SimulationResult simulate(const KernelSpec& spec, ParticleSystem system,
                          const SimulationOptions& options);

}  // namespace regkernel
