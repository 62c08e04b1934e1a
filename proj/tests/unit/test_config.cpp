#include <doctest.h>

#include "eam/config.hpp"
#include "eam/error.hpp"

#include <cmath>

using namespace eam;

namespace {

ErrorCode code_of(const std::string &text) {
  try {
    (void)build_sim_config(parse_config(text));
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

} // namespace

TEST_CASE("defaults") {
  const auto c = build_sim_config(parse_config(R"({"trace": {"wave": "constant", "length_s": 60}, "app": "hvac"})"));
  CHECK(c.policy == PolicyKind::Eam);
  CHECK(c.dt == 1e-3);
  CHECK(c.horizon == 60.0);
  REQUIRE(c.capacitors.size() == 2);
  CHECK(c.capacitors[0].capacitance == doctest::Approx(33e-6));
  CHECK(c.capacitors[1].capacitance == doctest::Approx(220e-6));
  CHECK(c.initial_voltages[0] == c.capacitors[0].v_on);
  const double full = 0.5 * 253e-6 * 9.0;
  CHECK(c.params.omega0 == doctest::Approx(0.2 * full));
  CHECK(c.params.omega1 == doctest::Approx(0.6 * full));
  CHECK(c.component_map[2] == 1);
}

TEST_CASE("per-second drain becomes a per-slot fraction") {
  const auto caps = default_capacitors(1e-3);
  CHECK(std::pow(1.0 - caps[0].drain_fraction, 1000.0) == doctest::Approx(0.999).epsilon(1e-12));
}

TEST_CASE("comments and overrides") {
  auto doc = parse_config(R"({
    // two-minute run
    "trace": {"wave": "sinusoid", "period_s": 30, "length_s": 120},
    "app": "greenhouse",
    "bank": {"capacitors": [{"c_uf": 33}, {"c_uf": 220}]}
  })");
  apply_override(doc, "policy=central");
  apply_override(doc, "bank.capacitors.1.c_uf=100");
  apply_override(doc, "sim.log_every_attack_slot=true");
  const auto c = build_sim_config(doc);
  CHECK(c.policy == PolicyKind::Central);
  CHECK(c.capacitors[1].capacitance == doctest::Approx(100e-6));
  CHECK(c.log_every_attack_slot);
  CHECK(c.app.name == "greenhouse");
  CHECK_THROWS_AS(apply_override(doc, "no-equals-sign"), Error);
}

TEST_CASE("inline application") {
  const auto c = build_sim_config(parse_config(R"({
    "trace": {"wave": "constant", "length_s": 60},
    "app": {"name": "pair", "sink": "B", "tasks": [
      {"id": "A", "energy_uj": 10, "duration_ms": 5, "rates_per_h": {"SA": 1, "LA": 1, "NML": 60, "LP": 30, "CTL": 10}},
      {"id": "B", "energy_uj": 50, "duration_ms": 20, "buffer": 1, "component": "actuation", "predecessors": ["A"],
       "rates_per_h": {"SA": 1, "LA": 1, "NML": 60, "LP": 30, "CTL": 10}}]}
  })"));
  REQUIRE(c.app.tasks.size() == 2);
  CHECK(c.app.tasks[1].energy_cost == doctest::Approx(50e-6));
  CHECK(c.app.tasks[1].predecessors == std::vector<std::string>{"A"});
}

TEST_CASE("rejections") {
  CHECK(code_of("{not json") == ErrorCode::Parse);
  CHECK(code_of(R"({"trace": {"wave": "constant"}, "app": "hvac", "bogus": 1})") == ErrorCode::Config);
  CHECK(code_of(R"({"trace": {"wave": "constant", "capacitance_farads": 1}, "app": "hvac"})") == ErrorCode::Config);
  CHECK(code_of(R"({"trace": {"wave": "square"}, "app": "hvac"})") == ErrorCode::Config);
  CHECK(code_of(R"({"trace": {"wave": "constant"}, "app": "hvac", "policy": "rr"})") != ErrorCode::Internal);
  CHECK(code_of(R"({"trace": {"wave": "constant", "length_s": 60}, "app": "hvac",
                    "attacks": [{"start_s": 50, "duration_s": 30}]})") == ErrorCode::Internal);
  CHECK(code_of(R"({"trace": {"wave": "constant", "length_s": 60}, "app": "hvac",
                    "attacks": [{"start_s": 70, "duration_s": 30}]})") == ErrorCode::Config);
  CHECK(code_of(R"({"trace": {"wave": "constant"}, "app": "hvac", "sim": {"dt_ms": -1}})") != ErrorCode::Internal);
  CHECK_THROWS_AS(load_config("/nonexistent/run.json"), Error);
}
