#include <doctest.h>

#include "eam/error.hpp"
#include "eam/trace.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace eam;

TEST_CASE("parse two rows") {
  const auto t = parse_trace("0,1.0\n1,1.2\n", 30000.0);
  CHECK(t.samples().size() == 2);
  CHECK(t.load_resistance() == 30000.0);
  CHECK(t.samples()[1].voltage == doctest::Approx(1.2));
}

TEST_CASE("parse skips comments and a header, accepts whitespace") {
  const auto t = parse_trace("# recorded indoors\ntime_s voltage_v\n0 0.5\n2\t0.7\n", 1000.0);
  REQUIRE(t.samples().size() == 2);
  CHECK(t.samples()[1].time == 2.0);
}

TEST_CASE("parse rejects bad input") {
  auto code = [](const std::string &text) {
    try {
      (void)parse_trace(text, 30000.0);
    } catch (const Error &e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  CHECK(code("1,1.0\n0,1.2\n") == ErrorCode::InvalidArgument);
  CHECK(code("0,-0.5\n") == ErrorCode::InvalidArgument);
  CHECK(code("0,1\n1,abc\n") == ErrorCode::Parse);
  CHECK(code("0,1,2\n") == ErrorCode::Parse);
  CHECK(code("# only a comment\n") == ErrorCode::Parse);
  CHECK_THROWS_AS(EnergyTrace({{0, 1}}, 0.0), Error);
}

TEST_CASE("synthesized waveforms") {
  SynthParams p;
  p.amplitude = 1.0;
  p.length = 10.0;
  p.interval = 1.0;
  const auto c = synthesize_trace(WaveKind::Constant, p);
  CHECK(c.samples().size() == 11);
  for (const auto &s : c.samples()) CHECK(s.voltage == 1.0);

  p.period = 10.0;
  p.interval = 0.5;
  const auto s = synthesize_trace(WaveKind::Sinusoid, p);
  CHECK(s.voltage_at(2.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.voltage_at(5.0) == doctest::Approx(0.0).epsilon(1e-12));

  p.amplitude = 2.0;
  p.length = 4.0;
  p.interval = 1.0;
  const auto st = synthesize_trace(WaveKind::Step, p);
  CHECK(st.voltage_at(0.0) == 0.0);
  CHECK(st.voltage_at(1.0) == 0.0);
  CHECK(st.voltage_at(2.0) == 2.0);
  CHECK(st.voltage_at(4.0) == 2.0);
}

TEST_CASE("inject attack zeroes the half-open window") {
  SynthParams p;
  p.length = 10.0;
  const auto t = synthesize_trace(WaveKind::Constant, p);
  const auto z = inject_attack(t, {3.0, 2.0});
  CHECK(z.voltage_at(2.0) == 1.0);
  CHECK(z.voltage_at(3.0) == 0.0);
  CHECK(z.voltage_at(4.0) == 0.0);
  CHECK(z.voltage_at(5.0) == 1.0);
  CHECK(t.voltage_at(3.0) == 1.0);

  const auto all = inject_attack(t, {0.0, 11.0});
  for (const auto &s : all.samples()) CHECK(s.voltage == 0.0);

  CHECK_THROWS_AS((void)inject_attack(t, {20.0, 5.0}), Error);
}

TEST_CASE("power under zero-order hold") {
  const EnergyTrace t({{0.0, 1.0}, {1.0, 2.0}}, 30000.0);
  CHECK(power_from_voltage(t, 0.0) == doctest::Approx(1.0 / 30000.0));
  CHECK(power_from_voltage(t, 0.5) == doctest::Approx(33.333e-6).epsilon(1e-4));
  CHECK(power_from_voltage(EnergyTrace({{0.0, 0.0}}, 30000.0), 0.0) == 0.0);
  CHECK_THROWS_AS((void)t.voltage_at(-1.0), Error);

  TraceCursor cur(t);
  CHECK(cur.power_at(0.2) == doctest::Approx(1.0 / 30000.0));
  CHECK(cur.power_at(1.0) == doctest::Approx(4.0 / 30000.0));
  CHECK_THROWS_AS((void)cur.power_at(1.5), Error);
}

TEST_CASE("write then load round trip") {
  SynthParams p;
  p.length = 5.0;
  p.amplitude = 0.3;
  const auto t = synthesize_trace(WaveKind::Sinusoid, p);
  const auto path = std::filesystem::temp_directory_path() / "eam_trace_roundtrip.csv";
  write_trace(t, path);
  const auto back = load_trace(path, p.load_resistance);
  REQUIRE(back.samples().size() == t.samples().size());
  for (std::size_t i = 0; i < t.samples().size(); ++i) {
    CHECK(back.samples()[i].time == t.samples()[i].time);
    CHECK(back.samples()[i].voltage == t.samples()[i].voltage);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS((void)load_trace(path, 1.0), Error);
}

TEST_CASE("scenario validation") {
  CHECK_NOTHROW(validate_scenarios({{10, 5}, {15, 5}}));
  CHECK_THROWS_AS(validate_scenarios({{10, 0}}), Error);
  CHECK_THROWS_AS(validate_scenarios({{10, 10}, {15, 5}}), Error);
  CHECK_THROWS_AS(validate_scenarios({{-1, 5}}), Error);
}
