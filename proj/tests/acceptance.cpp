// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "regkernel/dynamics.hpp"
#include "regkernel/error_analysis.hpp"
#include "regkernel/errors.hpp"
#include "regkernel/experiments.hpp"
#include "regkernel/kernel.hpp"

using namespace regkernel;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, std::string line) {
    pass = pass && ok;
    details.push_back((ok ? "ok    " : "FAIL  ") + std::move(line));
  }
  void note(std::string line) { details.push_back("      " + std::move(line)); }
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

double rel(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

bool within_factor(double value, double reference, double factor) {
  return value >= reference / factor && value <= reference * factor;
}

Outcome closed_form_laplacian() {
  Outcome out;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto dim = make_dimension(1 + static_cast<int>(rng() % 3));
    const double eps = std::pow(10.0, -4.0 + 4.0 * u(rng));
    const int n = static_cast<int>(rng() % 13);
    const double r = 10.0 * u(rng);
    const auto spec = KernelSpec::regularized(dim, eps, n);
    const double e = rel(laplacian_reg_closed(spec, r), laplacian_reg_series(spec, r));
    worst = std::max(worst, e);
    failures += e > 1e-11;
  }
  out.check(failures == 0, fmt("1000 samples, eps in [1e-4, 1], n <= 12, r <= 10: worst relative difference %.3g, %d above 1e-11",
                               worst, failures));
  return out;
}

Outcome delta_mass() {
  Outcome out;
  for (int d = 1; d <= 3; ++d) {
    for (int n : {0, 1, 4, 10}) {
      for (double eps : {1e-1, 1e-2}) {
        const double mass = laplacian_mass(KernelSpec::regularized(make_dimension(d), eps, n), 1e4 * eps);
        out.check(std::abs(mass + 1.0) <= 1e-6,
                  fmt("dim %d n %2d eps %.0e: mass %+.12f (r_max = 1e4 eps)", d, n, eps, mass));
      }
    }
  }
  return out;
}

Outcome smoothing_table() {
  Outcome out;
  for (int d = 1; d <= 3; ++d) {
    const auto dim = make_dimension(d);
    for (const auto& p : smoothing_pairings(dim)) {
      const double eps = solve_epsilon_smoothing(p.n, dim, 1e-2);
      out.check(rel(eps, p.epsilon) <= 1e-4,
                fmt("dim %d n %2d: eps %.6e vs published %.4e (rel %.2e)", d, p.n, eps, p.epsilon, rel(eps, p.epsilon)));
    }
  }
  return out;
}

Outcome modelling_table() {
  Outcome out;
  std::optional<double> shared;
  for (int d = 1; d <= 3; ++d) {
    const auto dim = make_dimension(d);
    const auto system = oscillator_preset(dim).system;
    for (const auto& p : modelling_pairings(dim)) {
      try {
        const double eps = solve_epsilon_modelling(p.n, dim, kPublishedModellingTarget, system);
        if (d == 1 && p.n == 1) shared = eps;
        out.check(rel(eps, p.epsilon) <= 1e-3,
                  fmt("dim %d n %2d: eps %.6e vs published %.4e (rel %.2e)", d, p.n, eps, p.epsilon,
                      rel(eps, p.epsilon)));
      } catch (const CalibrationError& e) {
        out.check(false, fmt("dim %d n %2d: %s", d, p.n, e.what()));
      }
    }
  }
  if (shared) {
    out.check(rel(*shared, 2.0001e-2) <= 1e-3,
              fmt("shared entry dim 1 n 1: eps %.6e vs smoothing-table 2.0001e-2", *shared));
  }
  for (int d = 1; d <= 3; ++d) {
    const auto dim = make_dimension(d);
    const auto p = modelling_pairings(dim).front();
    out.note(fmt("dim %d: published eps for n %d gives modelling error %.4e on the preset (target %.2e)", d, p.n,
                 modelling_error(KernelSpec::regularized(dim, p.epsilon, p.n), oscillator_preset(dim).system),
                 kPublishedModellingTarget));
  }
  return out;
}

Outcome convergence_order() {
  Outcome out;
  const auto dts = dyadic_dts(2, 18);
  for (int d = 1; d <= 3; ++d) {
    const auto dim = make_dimension(d);
    const auto problem = oscillator_preset(dim);
    std::vector<KernelSpec> specs;
    for (const auto& p : smoothing_pairings(dim)) specs.push_back(KernelSpec::regularized(dim, p.epsilon, p.n));
    const auto reports = convergence_study(problem, specs, dts, 8.0);
    for (const auto& r : reports) {
      const auto& s = r.spec;
      out.check(std::abs(r.fitted_order - 4.0) <= 0.3,
                fmt("%s n %2d: fitted order %.3f over dt %.3g..%.3g (%zu points)", problem.name.c_str(), s.order(),
                    r.fitted_order, r.dt_values[r.fit_indices.front()], r.dt_values[r.fit_indices.back()],
                    r.fit_indices.size()));
      // Observed floor of the curve. Total error never drops below the
      // modelling error, and at the smallest steps round-off lifts it again.
      double observed = INFINITY;
      for (double e : r.max_h_error) {
        if (std::isfinite(e)) observed = std::min(observed, e);
      }
      const double model = modelling_error(s, problem.system);
      if (model > r.roundoff_floor) {
        out.check(within_factor(observed, model, 2.0),
                  fmt("%s n %2d: observed plateau %.3e vs modelling error %.3e", problem.name.c_str(), s.order(),
                      observed, model));
      } else {
        out.note(fmt("%s n %2d: modelling error %.3e is below the round-off floor %.3e; observed floor %.3e",
                     problem.name.c_str(), s.order(), model, r.roundoff_floor, observed));
      }
    }
  }
  return out;
}

Outcome five_body_orbit() {
  Outcome out;
  struct Row {
    int n;
    double dt, period, hamiltonian, modelling, modelling_factor;
  };
  const Row rows[] = {{4, 1.58e-3, 9.99e-3, 3.65e-7, 2.50e-7, 2.0}, {10, 2.29e-3, 9.98e-3, 5.13e-7, 9.87e-11, 5.0}};
  std::optional<double> largest[2];
  int i = 0;
  for (const auto& row : rows) {
    double eps = 0.0;
    for (const auto& p : smoothing_pairings(Dimension::three)) {
      if (p.n == row.n) eps = p.epsilon;
    }
    const auto spec = KernelSpec::regularized(Dimension::three, eps, row.n);
    const auto m = orbit_metrics(spec, row.dt);
    out.check(rel(m.period_error, row.period) <= 0.1,
              fmt("n %2d dt %.3g: period error %.4e vs %.2e", row.n, row.dt, m.period_error, row.period));
    out.check(within_factor(m.hamiltonian_error, row.hamiltonian, 2.0),
              fmt("n %2d: Hamiltonian error %.4e vs %.2e", row.n, m.hamiltonian_error, row.hamiltonian));
    out.check(within_factor(m.modelling_error, row.modelling, row.modelling_factor),
              fmt("n %2d: modelling error %.4e vs %.2e (factor %.0f)", row.n, m.modelling_error, row.modelling,
                  row.modelling_factor));
    const auto scan = largest_periodic_dt(spec);
    largest[i++] = scan.largest_dt;
    const auto best = std::min_element(scan.period_errors.begin(), scan.period_errors.end());
    out.note(fmt("n %2d: largest dt with period error <= 1e-2 in [5e-4, 5e-3]: %s (smallest period error %.4e)",
                 row.n, scan.largest_dt ? fmt("%.4e", *scan.largest_dt).c_str() : "none", *best));
  }
  out.check(largest[1].has_value() && (!largest[0] || *largest[1] > *largest[0]),
            "n 10 admits a larger periodic dt than n 4");
  return out;
}

struct StepRecord {
  double jump;
  double d_min;
};

std::vector<StepRecord> step_jumps(const KernelSpec& spec, const ProblemPreset& problem, double dt, double t_end) {
  std::vector<double> h, d_min;
  h.push_back(hamiltonian(spec, problem.system));
  d_min.push_back(problem.system.min_pair_distance());
  SimulationOptions options{.dt = dt, .t_end = t_end, .record_every = 1, .observer = {}};
  options.observer = [&](std::size_t, double, const ParticleSystem& s) {
    h.push_back(hamiltonian(spec, s));
    d_min.push_back(s.min_pair_distance());
  };
  simulate(spec, problem.system, options);
  std::vector<StepRecord> steps;
  for (std::size_t k = 1; k < h.size(); ++k) steps.push_back({std::abs(h[k] - h[k - 1]), std::min(d_min[k], d_min[k - 1])});
  return steps;
}

double quantile_d_min(std::vector<StepRecord> steps, double q) {
  std::vector<double> d;
  for (const auto& s : steps) d.push_back(s.d_min);
  std::sort(d.begin(), d.end());
  return d[static_cast<std::size_t>(q * static_cast<double>(d.size() - 1))];
}

std::vector<StepRecord> largest_jumps(std::vector<StepRecord> steps, std::size_t count) {
  std::partial_sort(steps.begin(), steps.begin() + count, steps.end(),
                    [](const auto& a, const auto& b) { return a.jump > b.jump; });
  steps.resize(count);
  return steps;
}

Outcome random25_spikes() {
  Outcome out;
  const auto problem = preset("random25");
  const double dt = std::ldexp(1.0, -8);
  const double t_end = 8.0;

  const auto singular = step_jumps(KernelSpec::singular(Dimension::two), problem, dt, t_end);
  const double p5 = quantile_d_min(singular, 0.05);
  const auto top = largest_jumps(singular, 10);
  const bool near = std::all_of(top.begin(), top.end(), [&](const auto& s) { return s.d_min <= p5; });
  out.check(near, fmt("singular: the 10 largest per-step |dH| (max %.3e) all occur at d_min <= %.3e, the 5th "
                      "percentile of d_min (their largest d_min %.3e)",
                      top.front().jump, p5,
                      std::max_element(top.begin(), top.end(), [](auto a, auto b) { return a.d_min < b.d_min; })->d_min));

  const auto sharp = step_jumps(KernelSpec::regularized(Dimension::two, 6.3923e-3, 0), problem, dt, t_end);
  const auto smooth = step_jumps(KernelSpec::regularized(Dimension::two, 2e-2, 0), problem, dt, t_end);
  const double sharp_max = largest_jumps(sharp, 1).front().jump;
  const double smooth_max = largest_jumps(smooth, 1).front().jump;
  out.check(sharp_max > 10.0 * smooth_max,
            fmt("n 0, dt %.3g: max per-step |dH| %.3e for eps 6.3923e-3 vs %.3e for eps 2e-2", dt, sharp_max, smooth_max));
  const double sharp_p5 = quantile_d_min(sharp, 0.05);
  const auto sharp_top = largest_jumps(sharp, 10);
  out.check(std::all_of(sharp_top.begin(), sharp_top.end(), [&](const auto& s) { return s.d_min <= sharp_p5; }),
            fmt("eps 6.3923e-3: the 10 largest spikes all occur at d_min <= %.3e (5th percentile)", sharp_p5));
  return out;
}

Outcome integrator_invariants() {
  Outcome out;
  std::vector<std::pair<KernelSpec, ProblemPreset>> cases{
      {KernelSpec::regularized(Dimension::one, 2.0001e-2, 1), preset("osc1d")},
      {KernelSpec::regularized(Dimension::two, 2e-2, 2), preset("random25")},
      {KernelSpec::regularized(Dimension::three, 1.8286e-2, 4), preset("five_body")},
  };
  for (const auto& [spec, problem] : cases) {
    const std::size_t d = problem.system.stride();
    auto momentum = [&](const ParticleSystem& s) {
      std::vector<double> p(d, 0.0);
      double scale = 0.0;
      for (std::size_t i = 0; i < s.velocities().size(); ++i) {
        p[i % d] += s.velocities()[i];
        scale += std::abs(s.velocities()[i]);
      }
      return std::pair{p, scale};
    };
    auto s = problem.system;
    std::vector<double> scratch;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const auto [before, scale_before] = momentum(s);
      step4_inplace(s, 1e-3, spec, scratch);
      const auto [after, scale_after] = momentum(s);
      for (std::size_t c = 0; c < d; ++c) {
        worst = std::max(worst, std::abs(after[c] - before[c]) / std::max({1.0, scale_before, scale_after}));
      }
    }
    out.check(worst <= 1e-13, fmt("%s: largest per-step momentum change %.2e (relative to sum |v|)",
                                  problem.name.c_str(), worst));

    const double dt = problem.name == "random25" ? 1e-3 : 1e-2;
    auto t = problem.system;
    for (int k = 0; k < 100; ++k) step4_inplace(t, dt, spec, scratch);
    for (int k = 0; k < 100; ++k) step4_inplace(t, -dt, spec, scratch);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < t.positions().size(); ++i) {
      diff += std::pow(t.positions()[i] - problem.system.positions()[i], 2) +
              std::pow(t.velocities()[i] - problem.system.velocities()[i], 2);
      norm += std::pow(problem.system.positions()[i], 2) + std::pow(problem.system.velocities()[i], 2);
    }
    const double back = std::sqrt(diff / norm);
    out.check(back <= 1e-10, fmt("%s: 100 steps forward and back, relative state error %.2e", problem.name.c_str(), back));

    auto still = problem.system;
    for (double& v : still.velocities()) v = 0.0;
    const auto a = accelerations(spec, still);
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    double fd_worst = 0.0;
    for (std::size_t i = 0; i < still.positions().size(); ++i) {
      const double x = still.positions()[i];
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      still.positions()[i] = x + h;
      const double up = hamiltonian(spec, still);
      still.positions()[i] = x - h;
      const double down = hamiltonian(spec, still);
      still.positions()[i] = x;
      fd_worst = std::max(fd_worst, std::abs(a[i] + (up - down) / (2 * h)) / scale);
    }
    out.check(fd_worst <= 1e-6, fmt("%s: force vs finite-difference gradient, worst %.2e relative to max |a|",
                                    problem.name.c_str(), fd_worst));
  }
  return out;
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "closed-form Laplacian equals the series", 1.0, closed_form_laplacian},
      {2, "Laplacian carries unit delta mass", 10.0, delta_mass},
      {3, "smoothing calibration reproduces the published table", 60.0, smoothing_table},
      {4, "modelling calibration reproduces the published table", 60.0, modelling_table},
      {5, "fourth-order convergence and modelling-error plateau", 600.0, convergence_order},
      {6, "five-body periodic orbit metrics", 900.0, five_body_orbit},
      {7, "random25 drift spikes track close approaches", 60.0, random25_spikes},
      {8, "integrator invariants", 30.0, integrator_invariants},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.check(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    outcome.check(seconds < c.budget_seconds, fmt("runtime %.2f s (budget %.0f s)", seconds, c.budget_seconds));
    failed += !outcome.pass;
    std::printf("%s %d %s [%.2f s]\n", outcome.pass ? "PASS" : "FAIL", c.id, c.title, seconds);
    for (const auto& line : outcome.details) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
