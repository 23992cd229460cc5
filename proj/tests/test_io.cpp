#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "regkernel/experiments.hpp"
#include "regkernel/io.hpp"

using namespace regkernel;

TEST_CASE("doubles round-trip through text") {
  for (double v : {0.1, 1.0 / 3.0, 6.3923e-3, -2.2553522134621844e-14, 1e300, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv round trip") {
  CsvTable table{{"n", "epsilon", "achieved_error"}, {{0, 1.0051e-2, 1e-2}, {10, 5.6755e-2, NAN}}};
  const auto text = table.to_string();
  CHECK(text.rfind("n,epsilon,achieved_error\n", 0) == 0);
  const auto back = parse_csv(text);
  CHECK(back.header == table.header);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0] == table.rows[0]);
  CHECK(std::isnan(back.rows[1][2]));
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_csv("a,b\n1,x\n"), std::runtime_error);
  CsvTable bad{{"a"}, {{1, 2}}};
  CHECK_THROWS_AS(bad.to_string(), std::invalid_argument);
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "regkernel_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.csv";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second\n");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    CHECK(entry.path().filename() == "out.csv");
  }
  CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "x.csv", "x"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("trace table") {
  const auto p = preset("osc1d");
  std::vector<std::vector<double>> rows;
  const auto result = simulate(KernelSpec::regularized(Dimension::one, 0.05, 2), p.system,
                               {.dt = 0.1, .t_end = 0.3, .record_every = 1,
                                .observer = [&](std::size_t, double, const ParticleSystem& s) {
                                  rows.emplace_back(s.positions().begin(), s.positions().end());
                                }});
  const auto table = trace_table(result.trace, rows, 1);
  CHECK(table.header == std::vector<std::string>{"t", "H_reg", "H_err_vs_reg0", "H_err_vs_exact0", "x0_0", "x1_0"});
  REQUIRE(table.rows.size() == 4);
  CHECK(table.rows[0][2] == 0.0);
  CHECK(table.rows[0][3] == doctest::Approx(result.trace.modelling_error()));
  CHECK(table.rows[3][4] == rows[3][0]);
  const auto reparsed = parse_csv(table.to_string());
  CHECK(reparsed.rows == table.rows);
  CHECK(trace_table(result.trace).header.size() == 4);
}
