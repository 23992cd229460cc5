#pragma once

// Pre-registered problem setups and study drivers: two-body oscillators in one
// to three dimensions, a seeded 25-body demo, the five-body periodic orbit,
// convergence sweeps, phase-plane sampling and orbit metrics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regkernel/dynamics.hpp"
#include "regkernel/kernel.hpp"

namespace regkernel {

struct ProblemPreset {
  std::string name;
  ParticleSystem system;
  double default_t;
  std::string notes;
  /// Only meaningful for random25.
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kDefaultRandomSeed = 20160901;

/// name in {osc1d, osc2d, osc3d, five_body, random25}. Throws
/// std::invalid_argument for unknown names.
ProblemPreset preset(std::string_view name, std::uint64_t seed = kDefaultRandomSeed);

std::vector<std::string> preset_names();

/// The two-body oscillator preset for a dimension (osc1d/osc2d/osc3d).
ProblemPreset oscillator_preset(Dimension dim);

struct Pairing {
  int n;
  double epsilon;
};

/// Published (n, eps) pairings with a global smoothing error of 1e-2 on the
/// unit ball, n in {0, 1, 2, 4, 10}.
std::vector<Pairing> smoothing_pairings(Dimension dim);

/// Published (n, eps) pairings sharing a modelling error of 4.89e-6 on the
/// two-body oscillators, n in {0, 1, 2, 4, 10}.
std::vector<Pairing> modelling_pairings(Dimension dim);

inline constexpr double kPublishedModellingTarget = 4.89e-6;

struct ConvergenceOptions {
  /// Points with error <= plateau_factor * plateau are excluded from the fit.
  double plateau_factor = 3.0;
  /// Worker threads for independent (spec, dt) cells; 0 picks hardware concurrency.
  unsigned threads = 0;
};

struct ConvergenceReport {
  KernelSpec spec;
  std::vector<double> dt_values;
  /// max_t |H^{eps,n}(t) - H(0)| per dt; NaN where the run blew up.
  std::vector<double> max_h_error;
  /// NaN when fewer than two points survive the window selection.
  double fitted_order;
  /// Intercept of the fit, log(err) = log(c) + order * log(dt).
  double fitted_log_constant;
  /// modelling_error(spec, system); zero for the singular kernel.
  double plateau;
  /// Error level reachable by rounding alone; see roundoff_floor().
  double roundoff_floor;
  /// Indices into dt_values used by the fit.
  std::vector<std::size_t> fit_indices;
  std::vector<std::size_t> blowups;
};

/// 1e3 machine epsilons of max(|H(0)|, kinetic energy).
double roundoff_floor(const KernelSpec& spec, const ParticleSystem& system);

/// Dyadic dt values 2^-first, ..., 2^-last.
std::vector<double> dyadic_dts(int first_exponent, int last_exponent);

/// Least-squares slope of log(error) against log(dt). Candidates are the
/// finite points, taken in order of decreasing dt, that precede the first
/// error at or below plateau_factor * max(plateau, roundoff_floor). The fit
/// uses the longest run of candidates ending at the smallest dt in which every
/// local slope between neighbours lies within half an order of the run's
/// fitted slope; larger-dt points outside it are pre-asymptotic.
void fit_convergence_order(ConvergenceReport& report, double plateau_factor);

std::vector<ConvergenceReport> convergence_study(const ProblemPreset& problem,
                                                 std::span<const KernelSpec> specs,
                                                 std::span<const double> dts, double horizon,
                                                 const ConvergenceOptions& options = {});

struct PhaseSample {
  double t;
  double z;
  double z_dot;
};

struct PhasePlane {
  /// (z, z') of the relative coordinate z = x1 - x2 at the start of every step.
  std::vector<PhaseSample> samples;
  /// max_t |H^{eps,n}(t) - H^{eps,n}(0)| over the run.
  double max_h_drift;
};

inline constexpr double kPhaseDefaultDt = 3.125e-2;
inline constexpr double kPhaseDefaultHorizon = 400.0;

/// Runs the osc1d preset.
PhasePlane phase_plane(const KernelSpec& spec, double dt = kPhaseDefaultDt,
                       double horizon = kPhaseDefaultHorizon);

struct OrbitMetrics {
  /// Step actually used: T / round(T / requested dt).
  double dt;
  /// |x(T) - x(0)| / |x(0)| over all particles.
  double period_error;
  /// max_t |H^{eps,n}(t) - H^{eps,n}(0)|
  double hamiltonian_error;
  /// |H^{eps,n}(0) - H(0)|
  double modelling_error;
};

/// One period of the five_body preset. `observer` sees every step.
OrbitMetrics orbit_metrics(const KernelSpec& spec, double dt, const StepObserver& observer = {});

inline constexpr double kPeriodThreshold = 1e-2;

struct PeriodScan {
  std::vector<double> dt_values;
  std::vector<double> period_errors;
  std::optional<double> largest_dt;
};

/// Scans dt_min * ratio^k up to dt_max and reports the largest grid dt whose
/// period error stays at or below `threshold`.
PeriodScan largest_periodic_dt(const KernelSpec& spec, double dt_min = 5e-4, double dt_max = 5e-3,
                               double ratio = 1.05, double threshold = kPeriodThreshold);

}  // namespace regkernel
