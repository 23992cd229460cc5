#include "regkernel/run_config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace regkernel {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) fail(std::string(what) + " must be finite and > 0");
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::sample:
      return "sample";
    case Command::tables:
      return "tables";
    case Command::simulate:
      return "simulate";
    case Command::converge:
      return "converge";
    case Command::phase:
      return "phase";
    case Command::orbit:
      return "orbit";
  }
  return "";
}

Command parse_command(std::string_view text) {
  for (Command c : {Command::sample, Command::tables, Command::simulate, Command::converge,
                    Command::phase, Command::orbit}) {
    if (text == to_string(c)) return c;
  }
  fail("unknown command '" + std::string(text) + "'");
}

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  fail("unknown format '" + std::string(text) + "' (expected csv or json)");
}

std::string_view to_string(KernelQuantity quantity) {
  switch (quantity) {
    case KernelQuantity::green:
      return "green";
    case KernelQuantity::green_reg:
      return "green_reg";
    case KernelQuantity::grad_green_reg:
      return "grad_green_reg";
    case KernelQuantity::laplacian:
      return "laplacian";
  }
  return "";
}

KernelQuantity parse_kernel_quantity(std::string_view text) {
  for (KernelQuantity q : {KernelQuantity::green, KernelQuantity::green_reg,
                           KernelQuantity::grad_green_reg, KernelQuantity::laplacian}) {
    if (text == to_string(q)) return q;
  }
  fail("unknown quantity '" + std::string(text) +
       "' (expected green, green_reg, grad_green_reg or laplacian)");
}

void validate(const RunConfig& c) {
  if (c.dim < 1 || c.dim > 3) fail("dim must be 1, 2 or 3");
  if (c.n.empty()) fail("n must list at least one order");
  for (int n : c.n) {
    if (n < 0) fail("n must be >= 0");
  }
  for (double e : c.epsilon) require_positive(e, "epsilon");
  if (!c.epsilon.empty() && c.epsilon.size() != 1 && c.epsilon.size() != c.n.size()) {
    fail("epsilon must have one entry or one per order in n");
  }
  for (double dt : c.dt) require_positive(dt, "dt");
  if (c.t_end) require_positive(*c.t_end, "T");
  if (c.record_every == 0) fail("record_every must be >= 1");
  require_positive(c.radius, "radius");

  const bool known_preset = [&] {
    for (const auto& name : preset_names()) {
      if (name == c.preset) return true;
    }
    return false;
  }();

  switch (c.command) {
    case Command::sample:
      if (c.epsilon.size() != 1) fail("sample needs exactly one epsilon");
      if (c.n.size() != 1) fail("sample needs exactly one n");
      if (c.r.empty()) fail("sample needs at least one radius r");
      for (double r : c.r) {
        if (!(r >= 0.0) || !std::isfinite(r)) fail("r must be finite and >= 0");
      }
      break;
    case Command::tables:
      if (!c.target) fail("tables needs a target");
      require_positive(*c.target, "target");
      break;
    case Command::simulate:
      if (!known_preset) fail("unknown preset '" + c.preset + "'");
      if (c.n.size() != 1 || c.epsilon.size() > 1) fail("simulate takes a single (epsilon, n)");
      if (c.dt.size() != 1) fail("simulate needs exactly one dt");
      if (c.t_end && *c.t_end < c.dt[0]) fail("simulate requires T >= dt");
      break;
    case Command::converge:
      if (!known_preset) fail("unknown preset '" + c.preset + "'");
      if (!c.dt.empty() && c.dt.size() < 4) fail("converge needs at least 4 dt values");
      break;
    case Command::phase:
      if (c.n.size() != 1 || c.epsilon.size() > 1) fail("phase takes a single (epsilon, n)");
      if (c.dt.size() > 1) fail("phase takes a single dt");
      break;
    case Command::orbit:
      if (c.n.size() != 1 || c.epsilon.size() > 1) fail("orbit takes a single (epsilon, n)");
      if (c.dt.size() != 1) fail("orbit needs exactly one dt");
      break;
  }
}

std::string to_json(const RunConfig& c) {
  json j;
  j["command"] = std::string(to_string(c.command));
  j["dim"] = c.dim;
  j["epsilon"] = c.epsilon;
  j["n"] = c.n;
  j["target"] = c.target ? json(*c.target) : json(nullptr);
  j["mode"] = std::string(to_string(c.mode));
  j["radius"] = c.radius;
  j["dt"] = c.dt;
  j["T"] = c.t_end ? json(*c.t_end) : json(nullptr);
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["r"] = c.r;
  j["quantity"] = std::string(to_string(c.quantity));
  j["record_every"] = c.record_every;
  j["positions"] = c.positions;
  j["singular"] = c.singular;
  j["threads"] = c.threads;
  j["output"] = c.output;
  j["format"] = std::string(to_string(c.format));
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config: top level must be an object");

  static const std::set<std::string> keys{
      "command", "dim",  "epsilon", "n",  "target",   "mode",         "radius",
      "dt",      "T",    "preset",  "seed", "r",      "quantity",     "record_every",
      "positions", "singular", "threads", "output", "format"};
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) fail("config: unknown key '" + item.key() + "'");
  }
  if (!j.contains("command")) fail("config: missing 'command'");

  RunConfig c;
  c.command = parse_command(get<std::string>(j, "command"));
  if (j.contains("dim")) c.dim = get<int>(j, "dim");
  if (j.contains("epsilon")) c.epsilon = get<std::vector<double>>(j, "epsilon");
  if (j.contains("n")) c.n = get<std::vector<int>>(j, "n");
  if (j.contains("target") && !j["target"].is_null()) c.target = get<double>(j, "target");
  if (j.contains("mode")) c.mode = parse_error_mode(get<std::string>(j, "mode"));
  if (j.contains("radius")) c.radius = get<double>(j, "radius");
  if (j.contains("dt")) c.dt = get<std::vector<double>>(j, "dt");
  if (j.contains("T") && !j["T"].is_null()) c.t_end = get<double>(j, "T");
  if (j.contains("preset")) c.preset = get<std::string>(j, "preset");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("r")) c.r = get<std::vector<double>>(j, "r");
  if (j.contains("quantity")) c.quantity = parse_kernel_quantity(get<std::string>(j, "quantity"));
  if (j.contains("record_every")) c.record_every = get<std::size_t>(j, "record_every");
  if (j.contains("positions")) c.positions = get<bool>(j, "positions");
  if (j.contains("singular")) c.singular = get<bool>(j, "singular");
  if (j.contains("threads")) c.threads = get<unsigned>(j, "threads");
  if (j.contains("output")) c.output = get<std::string>(j, "output");
  if (j.contains("format")) c.format = parse_output_format(get<std::string>(j, "format"));
  return c;
}

}  // namespace regkernel
