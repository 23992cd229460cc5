// regkernel_cli: kernel sampling, calibration tables, simulations, convergence
// studies, phase planes and five-body orbit metrics as CSV/JSON.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "regkernel/dynamics.hpp"
#include "regkernel/error_analysis.hpp"
#include "regkernel/errors.hpp"
#include "regkernel/experiments.hpp"
#include "regkernel/io.hpp"
#include "regkernel/kernel.hpp"
#include "regkernel/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace regkernel;

namespace {

constexpr const char* kOutputDirEnv = "REGKERNEL_OUTPUT_DIR";

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

json spec_json(const KernelSpec& spec) {
  json j{{"dim", to_int(spec.dim())}, {"regularized", spec.is_regularized()}};
  if (spec.is_regularized()) {
    j["epsilon"] = spec.epsilon();
    j["n"] = spec.order();
  }
  return j;
}

std::string human(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

fs::path resolve(const std::string& output) {
  fs::path path(output);
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir && path.is_relative()) {
    return fs::path(dir) / path;
  }
  return path;
}

// Single-artifact commands: a file, or stdout when no output is configured.
void emit(const RunConfig& c, const std::string& default_name, const std::string& content) {
  std::string output = c.output;
  if (output.empty() && std::getenv(kOutputDirEnv) && *std::getenv(kOutputDirEnv)) {
    output = default_name;
  }
  if (output.empty()) {
    std::cout << content;
    return;
  }
  write_file_atomic(resolve(output), content);
}

std::string ext(const RunConfig& c) { return c.format == OutputFormat::csv ? ".csv" : ".json"; }

KernelSpec single_spec(const RunConfig& c, Dimension dim) {
  if (c.singular || c.epsilon.empty()) return KernelSpec::singular(dim);
  return KernelSpec::regularized(dim, c.epsilon.front(), c.n.front());
}

double published_smoothing_epsilon(Dimension dim, int n) {
  for (const auto& p : smoothing_pairings(dim)) {
    if (p.n == n) return p.epsilon;
  }
  throw UsageError("no published pairing for n = " + std::to_string(n) +
                   "; pass --epsilon explicitly (published orders: 0, 1, 2, 4, 10)");
}

void run_sample(const RunConfig& c) {
  const auto spec = KernelSpec::regularized(make_dimension(c.dim), c.epsilon.front(), c.n.front());
  const auto values = sample_curve(spec, c.quantity, c.r);
  if (c.format == OutputFormat::csv) {
    CsvTable table{{"r", "value"}, {}};
    for (const auto& v : values) table.rows.push_back({v.r, v.value});
    emit(c, "sample.csv", table.to_string());
  } else {
    json j{{"spec", spec_json(spec)}, {"quantity", to_string(c.quantity)}};
    for (const auto& v : values) {
      j["r"].push_back(v.r);
      j["value"].push_back(number(v.value));
    }
    emit(c, "sample.json", j.dump(2) + "\n");
  }
}

void run_tables(const RunConfig& c) {
  const auto dim = make_dimension(c.dim);
  const PairingTable table =
      c.mode == ErrorMode::smoothing
          ? calibrate_smoothing_table(dim, *c.target, c.n, c.radius)
          : calibrate_modelling_table(dim, *c.target, c.n, oscillator_preset(dim).system);
  if (!table.epsilon_increasing_in_n()) {
    std::cerr << "warning: epsilon is not strictly increasing in n\n";
  }
  if (c.format == OutputFormat::csv) {
    CsvTable csv{{"n", "epsilon", "achieved_error"}, {}};
    for (const auto& row : table.rows) {
      csv.rows.push_back({static_cast<double>(row.n), row.epsilon, row.achieved_error});
    }
    emit(c, "tables.csv", csv.to_string());
  } else {
    json j{{"dim", c.dim},
           {"mode", to_string(c.mode)},
           {"target", *c.target},
           {"epsilon_increasing_in_n", table.epsilon_increasing_in_n()},
           {"rows", json::array()}};
    for (const auto& row : table.rows) {
      j["rows"].push_back({{"n", row.n}, {"epsilon", row.epsilon}, {"achieved_error", row.achieved_error}});
    }
    emit(c, "tables.json", j.dump(2) + "\n");
  }
}

void run_simulate(const RunConfig& c) {
  const auto problem = preset(c.preset, c.seed);
  const auto spec = single_spec(c, problem.system.dim());
  const double t_end = c.t_end.value_or(problem.default_t);
  std::vector<std::vector<double>> positions;
  SimulationOptions options{.dt = c.dt.front(), .t_end = t_end, .record_every = c.record_every,
                            .observer = {}};
  const std::size_t steps = step_count(t_end, options.dt);
  if (c.positions) {
    options.observer = [&](std::size_t k, double, const ParticleSystem& s) {
      if (k % c.record_every == 0 || k == steps) positions.emplace_back(s.positions().begin(), s.positions().end());
    };
  }
  const auto result = simulate(spec, problem.system, options);
  const auto& trace = result.trace;
  std::cerr << "simulate " << problem.name << ": drift " << human(trace.time_stepping_error())
            << ", modelling " << human(trace.modelling_error()) << ", total "
            << human(trace.total_error()) << "\n";
  if (c.format == OutputFormat::csv) {
    emit(c, "simulate.csv", trace_table(trace, positions, problem.system.stride()).to_string());
  } else {
    json j{{"preset", problem.name},
           {"seed", problem.seed},
           {"spec", spec_json(spec)},
           {"dt", options.dt},
           {"T", t_end},
           {"steps", steps},
           {"H_reg_0", trace.h_reg_0},
           {"H_exact_0", trace.h_exact_0 ? json(*trace.h_exact_0) : json(nullptr)},
           {"time_stepping_error", number(trace.time_stepping_error())},
           {"modelling_error", number(trace.modelling_error())},
           {"total_error", number(trace.total_error())},
           {"t", trace.times},
           {"H_reg", trace.h_reg}};
    emit(c, "simulate.json", j.dump(2) + "\n");
  }
}

std::string report_name(const std::string& preset_name, const KernelSpec& spec) {
  if (!spec.is_regularized()) return preset_name + "_singular.csv";
  return preset_name + "_n" + std::to_string(spec.order()) + "_eps" + format_double(spec.epsilon()) + ".csv";
}

void run_converge(const RunConfig& c) {
  const auto problem = preset(c.preset, c.seed);
  const auto dim = problem.system.dim();
  std::vector<KernelSpec> specs;
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    const double eps = c.epsilon.empty()     ? published_smoothing_epsilon(dim, c.n[i])
                       : c.epsilon.size() == 1 ? c.epsilon[0]
                                               : c.epsilon[i];
    specs.push_back(KernelSpec::regularized(dim, eps, c.n[i]));
  }
  if (c.singular) specs.push_back(KernelSpec::singular(dim));
  const auto dts = c.dt.empty() ? dyadic_dts(2, 14) : c.dt;
  const double t_end = c.t_end.value_or(problem.default_t);
  const auto reports = convergence_study(problem, specs, dts, t_end, {.plateau_factor = 3.0, .threads = c.threads});

  json summary{{"preset", problem.name}, {"seed", problem.seed}, {"T", t_end}, {"reports", json::array()}};
  const bool to_dir = !c.output.empty() || (std::getenv(kOutputDirEnv) && *std::getenv(kOutputDirEnv));
  const fs::path dir = resolve(c.output.empty() ? "." : c.output);
  if (to_dir) fs::create_directories(dir);
  for (const auto& r : reports) {
    json entry{{"spec", spec_json(r.spec)},
               {"fitted_order", number(r.fitted_order)},
               {"plateau", r.plateau},
               {"fit_indices", r.fit_indices},
               {"blowups", r.blowups}};
    if (to_dir) {
      CsvTable csv{{"dt", "max_H_error"}, {}};
      for (std::size_t i = 0; i < r.dt_values.size(); ++i) csv.rows.push_back({r.dt_values[i], r.max_h_error[i]});
      const auto name = report_name(problem.name, r.spec);
      write_file_atomic(dir / name, csv.to_string());
      entry["csv"] = name;
    } else {
      entry["dt"] = r.dt_values;
      json errors = json::array();
      for (double e : r.max_h_error) errors.push_back(number(e));
      entry["max_H_error"] = errors;
    }
    std::cerr << report_name(problem.name, r.spec) << ": order " << human(r.fitted_order)
              << ", plateau " << human(r.plateau) << "\n";
    summary["reports"].push_back(entry);
  }
  if (to_dir) {
    write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  } else {
    std::cout << summary.dump(2) << "\n";
  }
}

void run_phase(const RunConfig& c) {
  const auto spec = single_spec(c, Dimension::one);
  const double dt = c.dt.empty() ? kPhaseDefaultDt : c.dt.front();
  const double t_end = c.t_end.value_or(kPhaseDefaultHorizon);
  const auto plane = phase_plane(spec, dt, t_end);
  std::cerr << "phase: max drift " << human(plane.max_h_drift) << "\n";
  if (c.format == OutputFormat::csv) {
    CsvTable csv{{"t", "z", "zdot"}, {}};
    for (const auto& s : plane.samples) csv.rows.push_back({s.t, s.z, s.z_dot});
    emit(c, "phase.csv", csv.to_string());
  } else {
    json j{{"spec", spec_json(spec)}, {"dt", dt}, {"T", t_end}, {"max_H_drift", plane.max_h_drift}};
    for (const auto& s : plane.samples) {
      j["t"].push_back(s.t);
      j["z"].push_back(s.z);
      j["zdot"].push_back(s.z_dot);
    }
    emit(c, "phase.json", j.dump(2) + "\n");
  }
}

void run_orbit(const RunConfig& c) {
  const auto dim = Dimension::three;
  const KernelSpec spec = c.singular ? KernelSpec::singular(dim)
                          : c.epsilon.empty()
                              ? KernelSpec::regularized(dim, published_smoothing_epsilon(dim, c.n.front()), c.n.front())
                              : KernelSpec::regularized(dim, c.epsilon.front(), c.n.front());
  CsvTable trajectory{{"t"}, {}};
  StepObserver observer;
  if (c.format == OutputFormat::csv) {
    for (int j = 0; j < 5; ++j) {
      for (int d = 0; d < 3; ++d) trajectory.header.push_back("x" + std::to_string(j) + "_" + std::to_string(d));
    }
    observer = [&](std::size_t k, double t, const ParticleSystem& s) {
      if (k % c.record_every != 0) return;
      std::vector<double> row{t};
      row.insert(row.end(), s.positions().begin(), s.positions().end());
      trajectory.rows.push_back(std::move(row));
    };
  }
  const auto m = orbit_metrics(spec, c.dt.front(), observer);
  std::cerr << "orbit: dt " << human(m.dt) << ", period error " << human(m.period_error)
            << ", Hamiltonian error " << human(m.hamiltonian_error) << ", modelling error "
            << human(m.modelling_error) << "\n";
  if (c.format == OutputFormat::csv) {
    emit(c, "orbit.csv", trajectory.to_string());
  } else {
    json j{{"spec", spec_json(spec)},
           {"dt", m.dt},
           {"period_error", m.period_error},
           {"hamiltonian_error", m.hamiltonian_error},
           {"modelling_error", m.modelling_error}};
    emit(c, "orbit.json", j.dump(2) + "\n");
  }
}

void dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::sample:
      return run_sample(c);
    case Command::tables:
      return run_tables(c);
    case Command::simulate:
      return run_simulate(c);
    case Command::converge:
      return run_converge(c);
    case Command::phase:
      return run_phase(c);
    case Command::orbit:
      return run_orbit(c);
  }
}

int report_error(const std::string& type, const std::string& message, int code,
                 json extra = json::object()) {
  json j{{"error", {{"type", type}, {"message", message}}}};
  for (auto& [key, value] : extra.items()) j["error"][key] = value;
  std::cerr << j.dump() << "\n";
  return code;
}

struct Flags {
  std::vector<double> epsilon;
  std::vector<int> n;
  std::optional<double> target;
  std::string mode = "smoothing";
  std::string quantity = "green_reg";
  std::string format = "csv";
  std::string orbit_format = "json";
  std::optional<double> t_end;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized Laplace kernels: sampling, calibration and N-body studies"};
  app.require_subcommand(0, 1);
  std::string config_path;
  bool dump_config = false;
  app.add_option("--config", config_path, "Run the JSON config in this file")->check(CLI::ExistingFile);
  app.add_flag("--dump-config", dump_config, "Print the resolved config as JSON and exit");

  RunConfig c;
  Flags f;

  auto common_kernel = [&](CLI::App* sub) {
    sub->add_option("--dim", c.dim, "Dimension (1, 2 or 3)");
    sub->add_option("--epsilon", f.epsilon, "Regularization scale(s)")->delimiter(',');
    sub->add_option("--n", f.n, "Truncation order(s)")->delimiter(',');
  };
  auto common_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", c.output, "Output file (directory for converge); stdout if omitted");
    sub->add_option("--format", f.format, "csv or json");
  };

  auto* sample = app.add_subcommand("sample", "Evaluate a kernel quantity on radii");
  common_kernel(sample);
  sample->add_option("--r", c.r, "Radii")->delimiter(',')->required();
  sample->add_option("--quantity", f.quantity, "green, green_reg, grad_green_reg or laplacian");
  common_output(sample);

  auto* tables = app.add_subcommand("tables", "Calibrate epsilon for each n against a target error");
  tables->add_option("--dim", c.dim, "Dimension (1, 2 or 3)");
  tables->add_option("--n", f.n, "Truncation orders")->delimiter(',');
  tables->add_option("--mode", f.mode, "smoothing or modelling");
  tables->add_option("--target", f.target, "Target error")->required();
  tables->add_option("--radius", c.radius, "Ball radius R for the smoothing error");
  common_output(tables);

  auto* sim = app.add_subcommand("simulate", "Integrate a preset and record the Hamiltonian");
  sim->add_option("--preset", c.preset, "osc1d, osc2d, osc3d, five_body or random25");
  sim->add_option("--seed", c.seed, "Seed for random25");
  sim->add_option("--epsilon", f.epsilon, "Regularization scale (omit for the singular kernel)");
  sim->add_option("--n", f.n, "Truncation order");
  sim->add_option("--dt", c.dt, "Time step")->required();
  sim->add_option("--T", f.t_end, "Final time (preset default if omitted)");
  sim->add_option("--record-every", c.record_every, "Record every k-th step");
  sim->add_flag("--positions", c.positions, "Append flattened positions to the trace");
  common_output(sim);

  auto* conv = app.add_subcommand("converge", "Hamiltonian error against dt for several kernels");
  conv->add_option("--preset", c.preset, "osc1d, osc2d, osc3d, five_body or random25");
  conv->add_option("--seed", c.seed, "Seed for random25");
  conv->add_option("--epsilon", f.epsilon, "Scales, one per n (published pairing if omitted)")->delimiter(',');
  conv->add_option("--n", f.n, "Truncation orders")->delimiter(',');
  conv->add_flag("--singular", c.singular, "Add the singular kernel");
  conv->add_option("--dt", c.dt, "Time steps (2^-2 ... 2^-14 if omitted)")->delimiter(',');
  conv->add_option("--T", f.t_end, "Final time (preset default if omitted)");
  conv->add_option("--threads", c.threads, "Worker threads (0: hardware concurrency)");
  conv->add_option("-o,--output", c.output, "Output directory; JSON summary on stdout if omitted");

  auto* phase = app.add_subcommand("phase", "Phase plane (z, z') of the 1D oscillator");
  phase->add_option("--epsilon", f.epsilon, "Regularization scale (omit for the singular kernel)");
  phase->add_option("--n", f.n, "Truncation order");
  phase->add_option("--dt", c.dt, "Time step");
  phase->add_option("--T", f.t_end, "Final time");
  common_output(phase);

  auto* orbit = app.add_subcommand("orbit", "One period of the five-body orbit");
  orbit->add_option("--epsilon", f.epsilon, "Regularization scale (published pairing if omitted)");
  orbit->add_option("--n", f.n, "Truncation order");
  orbit->add_flag("--singular", c.singular, "Use the singular kernel");
  orbit->add_option("--dt", c.dt, "Requested time step")->required();
  orbit->add_option("--record-every", c.record_every, "Trajectory stride for CSV output");
  orbit->add_option("-o,--output", c.output, "Output file; stdout if omitted");
  orbit->add_option("--format", f.orbit_format, "json (metrics) or csv (trajectory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    if (!config_path.empty()) {
      if (!app.get_subcommands().empty()) throw UsageError("--config cannot be combined with a subcommand");
      std::ifstream in(config_path);
      std::stringstream text;
      text << in.rdbuf();
      c = run_config_from_json(text.str());
    } else {
      const auto subs = app.get_subcommands();
      if (subs.empty()) throw UsageError("a subcommand or --config is required (see --help)");
      c.command = parse_command(subs.front()->get_name());
      if (!f.epsilon.empty()) c.epsilon = f.epsilon;
      if (!f.n.empty()) c.n = f.n;
      else if (c.command == Command::tables || c.command == Command::converge) c.n = {0, 1, 2, 4, 10};
      c.target = f.target;
      c.t_end = f.t_end;
      c.mode = parse_error_mode(f.mode);
      c.quantity = parse_kernel_quantity(f.quantity);
      c.format = parse_output_format(c.command == Command::orbit ? f.orbit_format : f.format);
      if (c.command == Command::orbit) c.dim = 3;
      if (c.command == Command::phase) c.dim = 1;
      if (c.command == Command::simulate || c.command == Command::converge) {
        c.dim = to_int(preset(c.preset, c.seed).system.dim());
      }
    }
    validate(c);
    if (dump_config) {
      std::cout << to_json(c);
      return 0;
    }
    dispatch(c);
    return 0;
  } catch (const UsageError& e) {
    return report_error("usage", e.what(), 2);
  } catch (const DomainError& e) {
    return report_error("domain_error", e.what(), 2);
  } catch (const std::invalid_argument& e) {
    return report_error("invalid_argument", e.what(), 2);
  } catch (const CalibrationError& e) {
    return report_error("calibration_error", e.what(), 3);
  } catch (const NumericalError& e) {
    return report_error("numerical_error", e.what(), 3,
                        {{"estimate", e.estimate()}, {"error_estimate", e.error_estimate()}});
  } catch (const IntegrationBlowup& e) {
    return report_error("integration_blowup", e.what(), 3, {{"step", e.step()}});
  } catch (const fs::filesystem_error& e) {
    return report_error("io_error", e.what(), 4);
  } catch (const std::exception& e) {
    return report_error("io_error", e.what(), 4);
  }
}
