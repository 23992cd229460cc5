#include <stdexcept>

#include "doctest.h"
#include "regkernel/run_config.hpp"

using namespace regkernel;

TEST_CASE("run config round-trips through json") {
  RunConfig c;
  c.command = Command::converge;
  c.dim = 2;
  c.epsilon = {6.3923e-3, 1.0 / 3.0};
  c.n = {0, 4};
  c.dt = {0.25, 0.125, 0.0625, 0.03125};
  c.t_end = 8.0;
  c.preset = "osc2d";
  c.seed = 18446744073709551615ull;
  c.singular = true;
  c.threads = 3;
  c.output = "out/conv";
  c.format = OutputFormat::json;
  validate(c);
  CHECK(run_config_from_json(to_json(c)) == c);

  RunConfig t;
  t.command = Command::tables;
  t.target = 4.89e-6;
  t.mode = ErrorMode::modelling;
  t.n = {0, 1, 2, 4, 10};
  CHECK(run_config_from_json(to_json(t)) == t);
}

TEST_CASE("run config json schema errors") {
  CHECK_THROWS_AS(run_config_from_json("{}"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"command":"sample","bogus":1})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"command":"launch"})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"command":"sample","dim":"two"})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json("not json"), std::invalid_argument);
}

TEST_CASE("run config validation") {
  RunConfig c;
  c.command = Command::sample;
  c.epsilon = {0.5};
  c.r = {0.0, 1.0};
  CHECK_NOTHROW(validate(c));
  c.dim = 4;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.dim = 1;
  c.r = {-1.0};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.r = {1.0};
  c.epsilon = {};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);

  RunConfig t;
  t.command = Command::tables;
  CHECK_THROWS_AS(validate(t), std::invalid_argument);
  t.target = 1e-2;
  CHECK_NOTHROW(validate(t));

  RunConfig s;
  s.command = Command::simulate;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.dt = {0.1};
  s.t_end = 0.05;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.t_end = 1.0;
  CHECK_NOTHROW(validate(s));

  RunConfig v;
  v.command = Command::converge;
  v.dt = {0.1, 0.05};
  CHECK_THROWS_AS(validate(v), std::invalid_argument);
}
