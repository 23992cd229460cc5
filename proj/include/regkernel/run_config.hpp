#pragma once

// Validated run description shared by the command-line tool and config files.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regkernel/error_analysis.hpp"
#include "regkernel/experiments.hpp"

namespace regkernel {

enum class Command { sample, tables, simulate, converge, phase, orbit };
enum class OutputFormat { csv, json };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);
std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view text);
std::string_view to_string(KernelQuantity quantity);
KernelQuantity parse_kernel_quantity(std::string_view text);

struct RunConfig {
  Command command = Command::sample;
  int dim = 1;
  /// One entry per order in `n`, or a single entry; empty selects the
  /// published pairing (orbit, converge) or the singular kernel (simulate,
  /// phase).
  std::vector<double> epsilon;
  std::vector<int> n{0};
  std::optional<double> target;
  ErrorMode mode = ErrorMode::smoothing;
  double radius = 1.0;
  std::vector<double> dt;
  std::optional<double> t_end;
  std::string preset = "osc1d";
  std::uint64_t seed = kDefaultRandomSeed;
  std::vector<double> r;
  KernelQuantity quantity = KernelQuantity::green_reg;
  std::size_t record_every = 1;
  bool positions = false;
  bool singular = false;
  unsigned threads = 0;
  /// File or directory, depending on the command; empty writes to stdout.
  std::string output;
  OutputFormat format = OutputFormat::csv;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws std::invalid_argument naming the first violated precondition.
void validate(const RunConfig& config);

std::string to_json(const RunConfig& config);
/// Unknown keys are rejected. Throws std::invalid_argument on schema errors.
RunConfig run_config_from_json(std::string_view text);

}  // namespace regkernel
