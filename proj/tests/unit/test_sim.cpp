#include <doctest.h>

#include "eam/config.hpp"
#include "eam/error.hpp"
#include "eam/sim.hpp"

#include <cmath>

using namespace eam;

namespace {

SimConfig config_for(const std::string &policy, double amplitude, double horizon,
                     const std::string &attacks = "[]") {
  const auto text = R"({"trace": {"wave": "constant", "amplitude_v": )" + std::to_string(amplitude) +
                    R"(, "length_s": )" + std::to_string(horizon) + R"(}, "attacks": )" + attacks +
                    R"(, "app": "hvac", "policy": ")" + policy + R"(", "sim": {"seed": 3}})";
  return build_sim_config(parse_config(text));
}

std::size_t count(const EventLog &log, EventKind k) {
  std::size_t n = 0;
  for (const auto &e : log.events) n += e.kind == k;
  return n;
}

} // namespace

TEST_CASE("energy ledger balances slot by slot") {
  for (const auto *p : {"eam", "fh", "central"}) {
    const auto r = run(config_for(p, 0.6, 900, R"([{"start_s": 300, "duration_s": 120}])"));
    CHECK(r.log.ledger.max_residual < 1e-9);
    const auto &l = r.log.ledger;
    const double balance = r.log.initial_energy + l.harvested - l.drained - l.withdrawn - l.overhead - l.spilled;
    CHECK(r.log.final_energy == doctest::Approx(balance).epsilon(1e-9));
  }
}

TEST_CASE("completions agree with the event log") {
  const auto r = run(config_for("eam", 1.0, 1800));
  CHECK(r.metrics.completions > 0);
  CHECK(r.metrics.completions == count(r.log, EventKind::Completion));
  CHECK(r.metrics.app_exec_rate == doctest::Approx(r.metrics.completions / 0.5));
  CHECK(r.metrics.hours == doctest::Approx(0.5));
  CHECK(std::isnan(r.metrics.availability_latency[0]));
}

TEST_CASE("overhead is decision cost times invocations") {
  auto c = config_for("eam", 1.0, 600);
  const auto r = run(c);
  CHECK(r.metrics.invocations > 0);
  CHECK(r.metrics.overhead_energy == doctest::Approx(c.params.decision_cost * r.metrics.invocations));
  CHECK(r.log.ledger.overhead == doctest::Approx(r.metrics.overhead_energy));
}

TEST_CASE("nothing starts while the MCU is off") {
  const auto r = run(config_for("eam", 0.3, 1800));
  bool on = true;
  for (const auto &e : r.log.events) {
    if (e.kind == EventKind::McuOn) on = true;
    if (e.kind == EventKind::McuOff) on = false;
    if (e.kind == EventKind::Start) CHECK(on);
  }
}

TEST_CASE("attack withholds tasks whose period exceeds the remaining time") {
  const auto c = config_for("eam", 1.0, 1200, R"([{"start_s": 300, "duration_s": 90}])");
  const auto r = run(c);
  const auto &app = c.app;
  for (const auto &e : r.log.events) {
    if (e.kind != EventKind::Start || e.time < 300 || e.time >= 390) continue;
    const double remaining = 390 - e.time;
    const double period = 3600.0 / rate_for(app, app.tasks[e.task].id, e.profile);
    CHECK(remaining > period - 1e-9);
    CHECK(e.value > e.value2 - 1e-15);
  }
}

TEST_CASE("central runs on one buffer") {
  const auto r = run(config_for("central", 1.0, 300));
  CHECK(r.log.slots_at_or_above_on.size() == 1);
  CHECK(r.metrics.availability[0] == r.metrics.availability[2]);
}

TEST_CASE("runs are deterministic") {
  const auto c = config_for("eam", 0.5, 900, R"([{"start_s": 200, "duration_s": 300}])");
  const auto a = run(c), b = run(c);
  REQUIRE(a.log.events.size() == b.log.events.size());
  for (std::size_t i = 0; i < a.log.events.size(); ++i) {
    CHECK(a.log.events[i].slot == b.log.events[i].slot);
    CHECK(a.log.events[i].kind == b.log.events[i].kind);
    CHECK(a.log.events[i].value == b.log.events[i].value);
  }
  CHECK(a.metrics.completions == b.metrics.completions);
}

TEST_CASE("stepping matches run") {
  const auto c = config_for("fh", 1.0, 120);
  Simulation s(c);
  while (!s.done()) s.step();
  CHECK(s.slot() == 120000);
  CHECK(s.finish().metrics.completions == run(c).metrics.completions);
}

TEST_CASE("configuration errors") {
  auto c = config_for("eam", 1.0, 60);
  c.horizon = 120;
  CHECK_THROWS_AS(validate(c), Error);
  c = config_for("eam", 1.0, 60);
  c.dt = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = config_for("eam", 1.0, 60);
  c.initial_voltages = {5.0, 1.0};
  CHECK_THROWS_AS(validate(c), Error);
}
