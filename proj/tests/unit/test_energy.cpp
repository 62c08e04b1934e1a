#include <doctest.h>

#include "eam/energy.hpp"
#include "eam/error.hpp"

#include <cmath>
#include <random>

using namespace eam;

namespace {

CapacitorParams params(double c, double rp, double v_max = 3.0) {
  CapacitorParams p;
  p.capacitance = c;
  p.parallel_resistance = rp;
  p.v_max = v_max;
  p.v_on = 0.8 * v_max;
  p.v_off = 0.6 * v_max;
  return p;
}

} // namespace

TEST_CASE("RC charging curve") {
  const Capacitor cap(params(100e-6, 10e3), 0.0);
  const double expected = std::sqrt(10.0 * (1.0 - std::exp(-2.0)));
  CHECK(charge_voltage(cap, 1e-3, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(charge_voltage(cap, 1e-3, 1.0) == doctest::Approx(2.9406).epsilon(1e-4));
  CHECK(charge_voltage(cap, 0.0, 5.0) == 0.0);

  const Capacitor small(params(10e-6, 1e3, 5.0), 0.0);
  const double dt = 100 * 10e-6 * 1e3;
  CHECK(charge_voltage(small, 1e-3, dt) == doctest::Approx(std::sqrt(1.0)).epsilon(1e-6));

  const Capacitor ceiling(params(100e-6, 10e3, 2.0), 1.0);
  CHECK(charge_voltage(ceiling, 1.0, 10.0) == 2.0);
  CHECK_THROWS_AS((void)charge_voltage(cap, -1.0, 1.0), Error);
}

TEST_CASE("charge time inverts the curve") {
  const Capacitor cap(params(100e-6, 10e3), 0.5);
  const double t = charge_time_to(cap, 1e-3, 2.0);
  REQUIRE(std::isfinite(t));
  CHECK(charge_voltage(cap, 1e-3, t) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::isinf(charge_time_to(cap, 1e-6, 2.9)));
}

TEST_CASE("buffer update") {
  CapacitorParams p = params(1.0, 1e3, 1.0);
  p.drain_fraction = 0.0;
  p.efficiency = 1.0;
  Capacitor a(p, 0.0);
  buffer_step(a, 1e-3, 1.0);
  CHECK(a.energy() == doctest::Approx(1e-3));

  p.drain_fraction = 0.1;
  p.efficiency = 0.8;
  Capacitor b(p, 0.0);
  b.set_energy(10e-3);
  BufferFlows f;
  buffer_step(b, 5e-3, 1.0, &f);
  CHECK(b.energy() == doctest::Approx(13e-3));
  CHECK(f.drained == doctest::Approx(1e-3));
  CHECK(f.harvested == doctest::Approx(4e-3));
  CHECK(f.spilled == 0.0);

  Capacitor c(params(33e-6, 30e3), 2.9);
  buffer_step(c, 1.0, 1.0, &f);
  CHECK(c.energy() == doctest::Approx(0.5 * 33e-6 * 9.0));
  CHECK(f.spilled > 0.0);
  CHECK_THROWS_AS(buffer_step(c, -1.0, 1.0), Error);
}

TEST_CASE("buffer update is bit-identical to the closed form away from the ceiling") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    CapacitorParams p = params(1.0, 1e3, 1e3);
    p.drain_fraction = 0.5 * u(rng);
    p.efficiency = 0.05 + 0.95 * u(rng);
    const double e = 10.0 * u(rng);
    const double power = u(rng);
    const double dt = 1e-3 + u(rng);
    Capacitor cap(p, 0.0);
    cap.set_energy(e);
    buffer_step(cap, power, dt);
    const double oracle = (1.0 - p.drain_fraction) * e + p.efficiency * power * dt;
    CHECK(cap.energy() == oracle);
  }
}

TEST_CASE("energy conversions") {
  CHECK(energy_at_voltage(100e-6, 3.0) == doctest::Approx(450e-6));
  CHECK(energy_at_voltage(100e-6, 0.0) == 0.0);
  CHECK(voltage_at_energy(100e-6, 450e-6) == doctest::Approx(3.0));
}

TEST_CASE("withdraw gate") {
  CapacitorParams p = params(100e-6, 30e3, 3.0);
  p.v_off = 1.0; // 50 uJ floor
  p.v_on = 2.0;
  Capacitor cap(p, 3.0);
  CHECK(cap.off_energy() == doctest::Approx(50e-6));
  CHECK(withdraw(cap, 19.066e-6) == WithdrawOutcome::Ok);
  CHECK(cap.energy() == doctest::Approx(430.934e-6));

  const double before = cap.energy();
  CHECK(withdraw(cap, before - 40e-6) == WithdrawOutcome::Insufficient);
  CHECK(cap.energy() == before);
  CHECK(withdraw(cap, 0.0) == WithdrawOutcome::Ok);
  CHECK(cap.energy() == before);
}

TEST_CASE("power hysteresis") {
  Capacitor cap(params(100e-6, 30e3), 2.0); // on at 2.4, off at 1.8
  CHECK_FALSE(cap.powered());
  CHECK(cap.available_energy() == 0.0);
  cap.set_voltage(cap.params().v_on);
  CHECK(cap.update_power_state());
  cap.set_voltage(2.0);
  CHECK(cap.update_power_state());
  CHECK(cap.available_energy() == doctest::Approx(0.5 * 100e-6 * (4.0 - 1.8 * 1.8)));
  cap.set_voltage(1.7);
  CHECK_FALSE(cap.update_power_state());
}

TEST_CASE("parameter validation") {
  CapacitorParams p;
  p.v_off = 2.5;
  CHECK_THROWS_AS(validate(p), Error);
  p = {};
  p.efficiency = 0.0;
  CHECK_THROWS_AS(validate(p), Error);
  p = {};
  p.capacitance = -1;
  CHECK_THROWS_AS(validate(p), Error);
}

TEST_CASE("bank bookkeeping") {
  CapacitorBank bank({Capacitor(params(33e-6, 30e3), 3.0), Capacitor(params(220e-6, 30e3), 3.0)}, {0, 0, 1});
  CHECK(bank.size() == 2);
  CHECK(bank.buffer_for(Component::Actuation) == 1);
  CHECK(bank.total_capacitance() == doctest::Approx(253e-6));
  CHECK(bank.total_energy() == doctest::Approx(0.5 * 253e-6 * 9.0));
}
