#pragma once

// CSV formatting and whole-file atomic writes.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "regkernel/dynamics.hpp"

namespace regkernel {

/// Shortest form that round-trips (at most 17 significant digits).
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Throws std::invalid_argument if a row width differs from the header.
  std::string to_string() const;
};

/// Parses text produced by CsvTable::to_string. Throws std::runtime_error on a
/// row whose column count differs from the header.
CsvTable parse_csv(std::string_view text);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Columns t,H_reg,H_err_vs_reg0,H_err_vs_exact0; the last is NaN when the
/// singular Hamiltonian is undefined. `positions`, if non-empty, holds one
/// flattened position row per trace entry and adds x<j>_<c> columns.
CsvTable trace_table(const HamiltonianTrace& trace,
                     const std::vector<std::vector<double>>& positions = {},
                     std::size_t dim = 0);

}  // namespace regkernel
