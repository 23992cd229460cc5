#include "regkernel/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "regkernel/errors.hpp"

namespace regkernel {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return sum;
}

double potential_sign(ForceSign sign) { return sign == ForceSign::repulsive ? 1.0 : -1.0; }

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

ParticleSystem::ParticleSystem(Dimension dim, std::vector<double> positions,
                               std::vector<double> velocities, std::vector<double> pair_weights,
                               ForceSign force_sign)
    : dim_(dim),
      positions_(std::move(positions)),
      velocities_(std::move(velocities)),
      pair_weights_(std::move(pair_weights)),
      force_sign_(force_sign) {
  const std::size_t d = stride();
  if (positions_.size() % d != 0) {
    throw std::invalid_argument("particle system: positions length is not a multiple of dim");
  }
  if (velocities_.size() != positions_.size()) {
    throw std::invalid_argument("particle system: velocities and positions differ in length");
  }
  const std::size_t n = size();
  if (pair_weights_.size() != n * n) {
    throw std::invalid_argument("particle system: pair weights must be N x N");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (pair_weights_[j * n + j] != 0.0) {
      throw std::invalid_argument("particle system: pair weights need a zero diagonal");
    }
    for (std::size_t k = j + 1; k < n; ++k) {
      if (pair_weights_[j * n + k] != pair_weights_[k * n + j]) {
        throw std::invalid_argument("particle system: pair weights must be symmetric");
      }
    }
  }
}

ParticleSystem ParticleSystem::from_charges(Dimension dim, std::vector<double> positions,
                                            std::vector<double> velocities,
                                            std::span<const double> charges, ForceSign force_sign) {
  const std::size_t n = charges.size();
  std::vector<double> weights(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j != k) weights[j * n + k] = charges[j] * charges[k];
    }
  }
  return ParticleSystem(dim, std::move(positions), std::move(velocities), std::move(weights),
                        force_sign);
}

ParticleSystem ParticleSystem::with_uniform_weight(Dimension dim, std::vector<double> positions,
                                                   std::vector<double> velocities, double weight,
                                                   ForceSign force_sign) {
  const std::size_t n = positions.size() / static_cast<std::size_t>(to_int(dim));
  std::vector<double> weights(n * n, weight);
  for (std::size_t j = 0; j < n; ++j) weights[j * n + j] = 0.0;
  return ParticleSystem(dim, std::move(positions), std::move(velocities), std::move(weights),
                        force_sign);
}

double ParticleSystem::distance(std::size_t j, std::size_t k) const {
  return std::sqrt(squared_distance(position(j), position(k)));
}

double ParticleSystem::min_pair_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t k = j + 1; k < size(); ++k) best = std::min(best, distance(j, k));
  }
  return best;
}

void accelerations(const KernelSpec& spec, const ParticleSystem& system, std::span<double> out) {
  const std::size_t n = system.size();
  const std::size_t d = system.stride();
  if (out.size() != n * d) throw std::invalid_argument("accelerations: output has wrong size");
  if (spec.dim() != system.dim()) {
    throw std::invalid_argument("accelerations: kernel and system dimensions differ");
  }
  std::fill(out.begin(), out.end(), 0.0);

  // attractive: +w grad G, repulsive: -w grad G
  const double sign = system.force_sign() == ForceSign::attractive ? 1.0 : -1.0;
  const auto x = system.positions();
  double diff[3];

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double w = system.weight(j, k);
      if (w == 0.0) continue;
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        diff[c] = x[j * d + c] - x[k * d + c];
        r2 += diff[c] * diff[c];
      }
      if (r2 == 0.0) {
        if (spec.is_regularized()) continue;
        throw DomainError("accelerations: coincident particles " + std::to_string(j) + " and " +
                          std::to_string(k) + " with the singular kernel");
      }
      const double r = std::sqrt(r2);
      const double scale = sign * w * radial_derivative(spec, r) / r;
      for (std::size_t c = 0; c < d; ++c) {
        const double f = scale * diff[c];
        out[j * d + c] += f;
        out[k * d + c] -= f;
      }
    }
  }
}

std::vector<double> accelerations(const KernelSpec& spec, const ParticleSystem& system) {
  std::vector<double> out(system.size() * system.stride());
  accelerations(spec, system, out);
  return out;
}

double hamiltonian(const KernelSpec& spec, const ParticleSystem& system) {
  if (spec.dim() != system.dim()) {
    throw std::invalid_argument("hamiltonian: kernel and system dimensions differ");
  }
  double kinetic = 0.0;
  for (double v : system.velocities()) kinetic += v * v;
  kinetic *= 0.5;

  double pair_sum = 0.0;
  const std::size_t n = system.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double w = system.weight(j, k);
      if (w == 0.0) continue;
      const double r = system.distance(j, k);
      if (r == 0.0 && !spec.is_regularized()) {
        throw DomainError("hamiltonian: coincident particles with the singular kernel");
      }
      pair_sum += w * potential(spec, r);
    }
  }
  return kinetic + potential_sign(system.force_sign()) * pair_sum;
}

void step4_inplace(ParticleSystem& system, double dt, const KernelSpec& spec,
                   std::vector<double>& scratch) {
  static const double theta = 1.0 / (2.0 - std::cbrt(2.0));
  static const double drift[4] = {theta / 2.0, (1.0 - theta) / 2.0, (1.0 - theta) / 2.0,
                                  theta / 2.0};
  static const double kick[3] = {theta, 1.0 - 2.0 * theta, theta};

  auto x = system.positions();
  auto v = system.velocities();
  scratch.resize(x.size());

  for (int stage = 0; stage < 4; ++stage) {
    const double h = drift[stage] * dt;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += h * v[i];
    if (stage == 3) break;
    accelerations(spec, system, scratch);
    const double g = kick[stage] * dt;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += g * scratch[i];
  }
}

ParticleSystem step4(ParticleSystem system, double dt, const KernelSpec& spec) {
  std::vector<double> scratch;
  step4_inplace(system, dt, spec, scratch);
  return system;
}

double HamiltonianTrace::time_stepping_error() const {
  double worst = 0.0;
  for (double h : h_reg) worst = std::max(worst, std::abs(h - h_reg_0));
  return worst;
}

double HamiltonianTrace::modelling_error() const {
  return h_exact_0 ? std::abs(h_reg_0 - *h_exact_0) : std::numeric_limits<double>::infinity();
}

double HamiltonianTrace::total_error() const {
  if (!h_exact_0) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double h : h_reg) worst = std::max(worst, std::abs(h - *h_exact_0));
  return worst;
}

bool HamiltonianTrace::satisfies_error_decomposition() const {
  const double bound = time_stepping_error() + modelling_error();
  return total_error() <= bound * (1.0 + 1e-12) + 1e-300;
}

std::size_t step_count(double t_end, double dt) {
  const double ratio = t_end / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(ratio));
}

SimulationResult simulate(const KernelSpec& spec, ParticleSystem system,
                          const SimulationOptions& options) {
  if (!(options.dt > 0.0) || !std::isfinite(options.dt)) {
    throw std::invalid_argument("simulate: dt must be finite and > 0");
  }
  if (!(options.t_end >= options.dt)) throw std::invalid_argument("simulate: requires t_end >= dt");
  if (options.record_every == 0) throw std::invalid_argument("simulate: record_every must be >= 1");

  const std::size_t steps = step_count(options.t_end, options.dt);

  HamiltonianTrace trace;
  trace.h_reg_0 = hamiltonian(spec, system);
  try {
    trace.h_exact_0 = hamiltonian(KernelSpec::singular(spec.dim()), system);
  } catch (const DomainError&) {
    trace.h_exact_0.reset();
  }
  trace.times.push_back(0.0);
  trace.h_reg.push_back(trace.h_reg_0);
  if (options.observer) options.observer(0, 0.0, system);

  std::vector<double> scratch;
  for (std::size_t step = 1; step <= steps; ++step) {
    try {
      step4_inplace(system, options.dt, spec, scratch);
    } catch (const DomainError&) {
      // a non-finite separation mid-step surfaces as a kernel domain error
      if (all_finite(system.positions()) && all_finite(system.velocities())) throw;
    }
    if (!all_finite(system.positions()) || !all_finite(system.velocities())) {
      throw IntegrationBlowup("simulate: non-finite state at step " + std::to_string(step), step);
    }
    const double t = static_cast<double>(step) * options.dt;
    if (step % options.record_every == 0 || step == steps) {
      const double h = hamiltonian(spec, system);
      if (!std::isfinite(h)) {
        throw IntegrationBlowup("simulate: non-finite Hamiltonian at step " + std::to_string(step),
                                step);
      }
      trace.times.push_back(t);
      trace.h_reg.push_back(h);
    }
    if (options.observer) options.observer(step, t, system);
  }
  return {std::move(trace), std::move(system)};
}

}  // namespace regkernel
