#include "regkernel/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "regkernel/error_analysis.hpp"
#include "regkernel/errors.hpp"

namespace regkernel {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Exact five-body initial condition in the z = 0 plane; returns to itself
// after T = 2 pi / 5.
constexpr double kFiveBodyPositions[5][2] = {{+3.315332e-1, 0.0},
                                             {+8.795500e-2, -3.394340e-2},
                                             {-2.537216e-1, -5.353020e-2},
                                             {-2.537216e-1, +5.353020e-2},
                                             {+8.795500e-2, +3.394340e-2}};
constexpr double kFiveBodyVelocities[5][2] = {{0.0, -5.937860e-1},
                                              {+1.822785e0, +1.282480e-1},
                                              {+1.271564e0, +1.686450e-1},
                                              {-1.271564e0, +1.686450e-1},
                                              {-1.822785e0, +1.282480e-1}};

// Gravitational coupling m_j m_k = 0.2 with unit gravitational constant. The
// kernel carries 1/(4 pi), so the pair weight absorbs 4 pi.
constexpr double kFiveBodyWeight = 0.2 * 4.0 * std::numbers::pi;

ProblemPreset make_oscillator(Dimension dim) {
  // Equal masses with opposite unit charges; attractive sign, w = 1.
  switch (dim) {
    case Dimension::one:
      return {"osc1d",
              ParticleSystem::with_uniform_weight(dim, {-0.125, 0.125}, {0.1, 0.0}, 1.0,
                                                  ForceSign::attractive),
              8.0, "two-body oscillator on the line; particles cross repeatedly"};
    case Dimension::two:
      return {"osc2d",
              ParticleSystem::with_uniform_weight(dim, {-0.25, 0.0, 0.25, 0.0},
                                                  {0.0, 1e-3, 0.0, 0.0}, 1.0,
                                                  ForceSign::attractive),
              8.0, "two-body oscillator in the plane; close approaches without crossing"};
    case Dimension::three:
      return {"osc3d",
              ParticleSystem::with_uniform_weight(dim, {-0.1, 0.0, 0.0, 0.1, 0.0, 0.0},
                                                  {0.0, 1e-3, 0.0, 0.0, 0.0, 0.0}, 1.0,
                                                  ForceSign::attractive),
              8.0, "two-body oscillator in space; close approaches without crossing"};
  }
  throw std::invalid_argument("oscillator_preset: bad dimension");
}

ProblemPreset make_five_body() {
  std::vector<double> x;
  std::vector<double> v;
  for (int j = 0; j < 5; ++j) {
    x.insert(x.end(), {kFiveBodyPositions[j][0], kFiveBodyPositions[j][1], 0.0});
    v.insert(v.end(), {kFiveBodyVelocities[j][0], kFiveBodyVelocities[j][1], 0.0});
  }
  return {"five_body",
          ParticleSystem::with_uniform_weight(Dimension::three, std::move(x), std::move(v),
                                              kFiveBodyWeight, ForceSign::attractive),
          2.0 * std::numbers::pi / 5.0,
          "five equal masses on a periodic orbit in the z = 0 plane; m_j m_k = 0.2"};
}

// Uniform double in [0, 1) from the top 53 bits, so the stream depends only
// on the (standardized) mt19937_64 output.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ProblemPreset make_random25(std::uint64_t seed) {
  constexpr std::size_t count = 25;
  std::mt19937_64 rng(seed);
  std::vector<double> x(2 * count);
  for (double& value : x) value = -1.0 + 2.0 * unit_uniform(rng);
  std::vector<double> v(2 * count, 0.0);
  std::vector<double> charges(count);
  for (std::size_t j = 0; j < count; ++j) charges[j] = (j % 2 == 0) ? 1.0 : -1.0;
  ProblemPreset p{"random25",
                  ParticleSystem::from_charges(Dimension::two, std::move(x), std::move(v),
                                               charges, ForceSign::repulsive),
                  8.0,
                  "25 particles uniform in [-1,1]^2 at rest, alternating charges +-1, "
                  "w_jk = q_j q_k, like charges repel"};
  p.seed = seed;
  return p;
}

}  // namespace

double roundoff_floor(const KernelSpec& spec, const ParticleSystem& system) {
  double kinetic = 0.0;
  for (double v : system.velocities()) kinetic += 0.5 * v * v;
  double scale = kinetic;
  try {
    scale = std::max(scale, std::abs(hamiltonian(spec, system)));
  } catch (const DomainError&) {
  }
  return 1e3 * std::numeric_limits<double>::epsilon() * scale;
}

ProblemPreset preset(std::string_view name, std::uint64_t seed) {
  if (name == "osc1d") return make_oscillator(Dimension::one);
  if (name == "osc2d") return make_oscillator(Dimension::two);
  if (name == "osc3d") return make_oscillator(Dimension::three);
  if (name == "five_body") return make_five_body();
  if (name == "random25") return make_random25(seed);
  throw std::invalid_argument("unknown preset '" + std::string(name) +
                              "' (expected osc1d, osc2d, osc3d, five_body or random25)");
}

std::vector<std::string> preset_names() {
  return {"osc1d", "osc2d", "osc3d", "five_body", "random25"};
}

ProblemPreset oscillator_preset(Dimension dim) { return make_oscillator(dim); }

std::vector<Pairing> smoothing_pairings(Dimension dim) {
  switch (dim) {
    case Dimension::one:
      return {{0, 1.0051e-2}, {1, 2.0001e-2}, {2, 2.6667e-2}, {4, 3.6572e-2}, {10, 5.6755e-2}};
    case Dimension::two:
      return {{0, 6.3923e-3}, {1, 1.2733e-2}, {2, 1.6977e-2}, {4, 2.3283e-2}, {10, 3.6132e-2}};
    case Dimension::three:
      return {{0, 5.0189e-3}, {1, 1.0001e-2}, {2, 1.3333e-2}, {4, 1.8286e-2}, {10, 2.8378e-2}};
  }
  return {};
}

std::vector<Pairing> modelling_pairings(Dimension dim) {
  switch (dim) {
    case Dimension::one:
      return {{0, 7.9753e-4}, {1, 2.0001e-2}, {2, 5.2761e-2}, {4, 1.1366e-1}, {10, 2.3711e-1}};
    case Dimension::two:
      return {{0, 1.3022e-3}, {1, 3.0382e-2}, {2, 8.3471e-2}, {4, 1.8888e-1}, {10, 4.1171e-1}};
    case Dimension::three:
      return {{0, 6.2537e-4}, {1, 1.2038e-2}, {2, 3.1985e-2}, {4, 7.1597e-2}, {10, 1.5639e-1}};
  }
  return {};
}

std::vector<double> dyadic_dts(int first_exponent, int last_exponent) {
  std::vector<double> dts;
  for (int e = first_exponent; e <= last_exponent; ++e) dts.push_back(std::ldexp(1.0, -e));
  return dts;
}

void fit_convergence_order(ConvergenceReport& report, double plateau_factor) {
  report.fit_indices.clear();
  report.fitted_order = nan;
  report.fitted_log_constant = nan;

  // Pre-plateau points: walking from the largest dt down, everything before
  // the first error at or below the floor. Blown-up runs are skipped.
  const double floor = plateau_factor * std::max(report.plateau, report.roundoff_floor);
  std::vector<std::size_t> order(report.dt_values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.dt_values[a] > report.dt_values[b];
  });
  std::vector<std::size_t> window;
  for (std::size_t i : order) {
    const double e = report.max_h_error[i];
    if (!std::isfinite(e)) continue;
    if (e <= floor) break;
    window.push_back(i);
  }

  auto slope_of = [&](std::span<const std::size_t> idx, double* intercept) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(idx.size());
    for (std::size_t i : idx) {
      const double x = std::log(report.dt_values[i]);
      const double y = std::log(report.max_h_error[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (intercept) *intercept = (sy - slope * sx) / m;
    return slope;
  };
  auto local_slope = [&](std::size_t a, std::size_t b) {
    return std::log(report.max_h_error[a] / report.max_h_error[b]) /
           std::log(report.dt_values[a] / report.dt_values[b]);
  };

  // Longest run ending at the smallest pre-plateau dt whose neighbouring
  // local slopes all stay within half an order of the run's own fit.
  std::size_t first = window.size() >= 2 ? window.size() - 2 : 0;
  for (std::size_t start = 0; start + 2 < window.size(); ++start) {
    const std::span<const std::size_t> run(window.data() + start, window.size() - start);
    const double slope = slope_of(run, nullptr);
    bool steady = true;
    for (std::size_t i = 0; i + 1 < run.size() && steady; ++i) {
      steady = std::abs(local_slope(run[i], run[i + 1]) - slope) <= 0.5;
    }
    if (steady) {
      first = start;
      break;
    }
  }

  report.fit_indices.assign(window.begin() + static_cast<std::ptrdiff_t>(first), window.end());
  if (report.fit_indices.size() >= 2) {
    report.fitted_order = slope_of(report.fit_indices, &report.fitted_log_constant);
  }
}

std::vector<ConvergenceReport> convergence_study(const ProblemPreset& problem,
                                                 std::span<const KernelSpec> specs,
                                                 std::span<const double> dts, double horizon,
                                                 const ConvergenceOptions& options) {
  if (dts.empty()) throw std::invalid_argument("convergence_study: empty dt list");
  for (double dt : dts) {
    if (!(dt > 0.0) || dt > horizon) {
      throw std::invalid_argument("convergence_study: every dt must be in (0, T]");
    }
  }

  std::vector<ConvergenceReport> reports;
  reports.reserve(specs.size());
  for (const auto& spec : specs) {
    ConvergenceReport report{spec, {dts.begin(), dts.end()}, std::vector<double>(dts.size(), nan),
                             nan, nan, 0.0, 0.0, {}, {}};
    report.plateau = spec.is_regularized() ? modelling_error(spec, problem.system) : 0.0;
    report.roundoff_floor = roundoff_floor(spec, problem.system);
    reports.push_back(std::move(report));
  }

  // Each (spec, dt) cell owns its copy of the initial state.
  const std::size_t cells = specs.size() * dts.size();
  std::vector<char> blew_up(cells, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t cell = next++; cell < cells; cell = next++) {
      const std::size_t s = cell / dts.size();
      const std::size_t d = cell % dts.size();
      try {
        const auto result = simulate(specs[s], problem.system,
                                     {.dt = dts[d], .t_end = horizon, .record_every = 1, .observer = {}});
        reports[s].max_h_error[d] = result.trace.total_error();
      } catch (const IntegrationBlowup&) {
        blew_up[cell] = 1;
      } catch (const DomainError&) {
        blew_up[cell] = 1;
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();

  for (std::size_t s = 0; s < reports.size(); ++s) {
    for (std::size_t d = 0; d < dts.size(); ++d) {
      if (blew_up[s * dts.size() + d]) reports[s].blowups.push_back(d);
    }
    fit_convergence_order(reports[s], options.plateau_factor);
  }
  return reports;
}

PhasePlane phase_plane(const KernelSpec& spec, double dt, double horizon) {
  const auto problem = preset("osc1d");
  PhasePlane out;
  const std::size_t steps = step_count(horizon, dt);
  out.samples.reserve(steps);
  auto observer = [&](std::size_t step, double t, const ParticleSystem& s) {
    if (step >= steps) return;
    const auto x = s.positions();
    const auto v = s.velocities();
    out.samples.push_back({t, x[0] - x[1], v[0] - v[1]});
  };
  const auto result =
      simulate(spec, problem.system, {.dt = dt, .t_end = horizon, .record_every = 1, .observer = observer});
  out.max_h_drift = result.trace.time_stepping_error();
  return out;
}

OrbitMetrics orbit_metrics(const KernelSpec& spec, double dt, const StepObserver& observer) {
  if (!(dt > 0.0)) throw std::invalid_argument("orbit_metrics: dt must be > 0");
  const auto problem = preset("five_body");
  const double period = problem.default_t;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(period / dt)));
  const double step = period / static_cast<double>(steps);

  const auto result = simulate(spec, problem.system,
                               {.dt = step, .t_end = period, .record_every = 1, .observer = observer});

  const auto x0 = problem.system.positions();
  const auto x1 = result.final_state.positions();
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    diff += (x1[i] - x0[i]) * (x1[i] - x0[i]);
    norm += x0[i] * x0[i];
  }
  return {step, std::sqrt(diff / norm), result.trace.time_stepping_error(),
          result.trace.modelling_error()};
}

PeriodScan largest_periodic_dt(const KernelSpec& spec, double dt_min, double dt_max, double ratio,
                               double threshold) {
  if (!(dt_min > 0.0 && dt_max >= dt_min && ratio > 1.0)) {
    throw std::invalid_argument("largest_periodic_dt: invalid dt grid");
  }
  PeriodScan scan;
  for (double dt = dt_min; dt <= dt_max * (1.0 + 1e-12); dt *= ratio) {
    double error = std::numeric_limits<double>::infinity();
    try {
      error = orbit_metrics(spec, dt).period_error;
    } catch (const IntegrationBlowup&) {
    }
    scan.dt_values.push_back(dt);
    scan.period_errors.push_back(error);
    if (error <= threshold) scan.largest_dt = dt;
  }
  return scan;
}

}  // namespace regkernel
