#include "eam/energy.hpp"

#include "eam/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace eam {

void validate(const CapacitorParams &p) {
  if (!(p.capacitance > 0.0)) throw invalid_argument("capacitance must be > 0");
  if (!(p.parallel_resistance > 0.0)) throw invalid_argument("parallel resistance must be > 0");
  if (!(p.efficiency > 0.0 && p.efficiency <= 1.0)) throw invalid_argument("efficiency must be in (0, 1]");
  if (!(p.drain_fraction >= 0.0 && p.drain_fraction < 1.0)) throw invalid_argument("drain fraction must be in [0, 1)");
  if (!(p.v_off >= 0.0 && p.v_off < p.v_on && p.v_on <= p.v_max))
    throw invalid_argument(
        fmt::format("thresholds must satisfy 0 <= v_off < v_on <= v_max (got {}, {}, {})", p.v_off, p.v_on, p.v_max));
}

double energy_at_voltage(double capacitance, double voltage) noexcept { return 0.5 * capacitance * voltage * voltage; }

double voltage_at_energy(double capacitance, double energy) noexcept {
  return energy <= 0.0 ? 0.0 : std::sqrt(2.0 * energy / capacitance);
}

Capacitor::Capacitor(const CapacitorParams &params, double initial_voltage) : params_(params) {
  validate(params_);
  e_max_ = energy_at_voltage(params_.capacitance, params_.v_max);
  e_off_ = energy_at_voltage(params_.capacitance, params_.v_off);
  e_on_ = energy_at_voltage(params_.capacitance, params_.v_on);
  set_voltage(initial_voltage);
  powered_ = voltage() >= params_.v_on;
}

double Capacitor::voltage() const noexcept { return voltage_at_energy(params_.capacitance, energy_); }

void Capacitor::set_energy(double joules) {
  if (!(joules >= 0.0)) throw invalid_argument("stored energy must be >= 0");
  energy_ = std::min(joules, e_max_);
}

void Capacitor::set_voltage(double volts) {
  if (!(volts >= 0.0)) throw invalid_argument("voltage must be >= 0");
  if (volts > params_.v_max) throw invalid_argument(fmt::format("voltage {} exceeds v_max {}", volts, params_.v_max));
  energy_ = energy_at_voltage(params_.capacitance, volts);
}

bool Capacitor::update_power_state() noexcept {
  // compare in energy space; avoids a sqrt per slot
  if (energy_ >= e_on_)
    powered_ = true;
  else if (energy_ < e_off_)
    powered_ = false;
  return powered_;
}

double Capacitor::available_energy() const noexcept { return powered_ ? std::max(0.0, energy_ - e_off_) : 0.0; }

double charge_voltage(const Capacitor &cap, double power, double dt) {
  if (!(power >= 0.0)) throw invalid_argument("power must be >= 0");
  if (!(dt >= 0.0)) throw invalid_argument("dt must be >= 0");
  const auto &p = cap.params();
  const double v0 = cap.voltage();
  const double pr = power * p.parallel_resistance;
  const double decay = std::exp(-2.0 * dt / (p.capacitance * p.parallel_resistance));
  const double v2 = pr - decay * (pr - v0 * v0);
  return std::clamp(std::sqrt(std::max(0.0, v2)), 0.0, p.v_max);
}

double charge_time_to(const Capacitor &cap, double power, double target) {
  if (!(power >= 0.0)) throw invalid_argument("power must be >= 0");
  const auto &p = cap.params();
  const double v0 = cap.voltage();
  if (target <= v0) return 0.0;
  const double pr = power * p.parallel_resistance;
  if (pr <= target * target) return std::numeric_limits<double>::infinity();
  const double ratio = (pr - target * target) / (pr - v0 * v0);
  return -0.5 * p.capacitance * p.parallel_resistance * std::log(ratio);
}

double buffer_step(Capacitor &cap, double allotted_power, double dt, BufferFlows *flows) {
  if (!(allotted_power >= 0.0)) throw invalid_argument("allotted power must be >= 0");
  if (!(dt > 0.0)) throw invalid_argument("dt must be > 0");
  const auto &p = cap.params();
  const double drained = p.drain_fraction * cap.energy();
  const double harvested = p.efficiency * allotted_power * dt;
  const double next = (1.0 - p.drain_fraction) * cap.energy() + p.efficiency * allotted_power * dt;
  const double clamped = std::min(next, cap.max_energy());
  cap.set_energy(clamped);
  if (flows) {
    flows->drained = drained;
    flows->harvested = harvested;
    flows->spilled = next - clamped;
  }
  return clamped;
}

double energy_of(const Capacitor &cap) noexcept { return energy_at_voltage(cap.params().capacitance, cap.voltage()); }

double voltage_of(double energy, const Capacitor &cap) {
  if (!(energy >= 0.0)) throw invalid_argument("energy must be >= 0");
  return voltage_at_energy(cap.params().capacitance, energy);
}

WithdrawOutcome withdraw(Capacitor &cap, double amount) {
  if (!(amount >= 0.0)) throw invalid_argument("withdrawal must be >= 0");
  if (amount == 0.0) return WithdrawOutcome::Ok;
  const double remaining = cap.energy() - amount;
  if (remaining < cap.off_energy()) return WithdrawOutcome::Insufficient;
  cap.set_energy(remaining);
  return WithdrawOutcome::Ok;
}

const char *to_string(Component c) noexcept {
  switch (c) {
  case Component::Mcu: return "mcu";
  case Component::Sensing: return "sensing";
  case Component::Actuation: return "actuation";
  }
  return "?";
}

CapacitorBank::CapacitorBank(std::vector<Capacitor> caps, std::array<std::size_t, kComponentCount> component_buffer)
    : caps_(std::move(caps)), component_buffer_(component_buffer) {
  if (caps_.empty()) throw invalid_argument("capacitor bank needs at least one buffer");
  for (auto b : component_buffer_) {
    if (b >= caps_.size()) throw invalid_argument(fmt::format("component mapped to missing buffer {}", b));
  }
}

double CapacitorBank::total_energy() const noexcept {
  double sum = 0.0;
  for (const auto &c : caps_) sum += c.energy();
  return sum;
}

double CapacitorBank::total_capacity() const noexcept {
  double sum = 0.0;
  for (const auto &c : caps_) sum += c.max_energy();
  return sum;
}

double CapacitorBank::total_capacitance() const noexcept {
  double sum = 0.0;
  for (const auto &c : caps_) sum += c.params().capacitance;
  return sum;
}

} // namespace eam
