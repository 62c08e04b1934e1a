#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace eam {

struct CapacitorParams {
  double capacitance = 33e-6;          // F
  double parallel_resistance = 30e3;   // ohm, only used by the RC charging curve
  double efficiency = 0.9;             // eta in (0, 1]
  double drain_fraction = 1e-6;        // sigma in [0, 1), applied once per slot
  double v_on = 2.4;                   // V
  double v_off = 1.8;                  // V
  double v_max = 3.0;                  // V
};

/// Throws InvalidArgument when the threshold ordering or coefficient ranges are violated.
void validate(const CapacitorParams &params);

/// E = C V^2 / 2
double energy_at_voltage(double capacitance, double voltage) noexcept;
/// V = sqrt(2 E / C)
double voltage_at_energy(double capacitance, double energy) noexcept;

/// One federated energy buffer. Stored energy is the state; voltage is derived.
///
/// `powered` models the on/off hysteresis of whatever the buffer supplies: it turns on once
/// the voltage reaches v_on and off when it falls below v_off.
class Capacitor {
public:
  Capacitor() : Capacitor(CapacitorParams{}) {}
  explicit Capacitor(const CapacitorParams &params, double initial_voltage = 0.0);

  const CapacitorParams &params() const noexcept { return params_; }

  double energy() const noexcept { return energy_; }
  double voltage() const noexcept;
  void set_energy(double joules);
  void set_voltage(double volts);

  double max_energy() const noexcept { return e_max_; }
  double off_energy() const noexcept { return e_off_; }
  double on_energy() const noexcept { return e_on_; }

  bool powered() const noexcept { return powered_; }
  void set_powered(bool on) noexcept { powered_ = on; }
  /// Applies the v_on / v_off hysteresis to the current voltage. Returns the new state.
  bool update_power_state() noexcept;

  /// Energy a task may draw right now: stored energy above the v_off floor, or 0 when unpowered.
  double available_energy() const noexcept;

private:
  CapacitorParams params_;
  double energy_ = 0.0;
  double e_max_ = 0.0;
  double e_off_ = 0.0;
  double e_on_ = 0.0;
  bool powered_ = false;
};

/// Eq.-1 style RC charging: V(dt) = sqrt(P Rp - exp(-2 dt / (C Rp)) (P Rp - V0^2)), with V0 the
/// capacitor's present voltage. Clamped to [0, v_max]. Does not mutate the capacitor.
double charge_voltage(const Capacitor &cap, double power, double dt);

/// Time for the RC curve to carry the capacitor from its present voltage up to `target`.
/// Returns +inf when the steady state sqrt(P Rp) never reaches the target.
double charge_time_to(const Capacitor &cap, double power, double target);

struct BufferFlows {
  double drained = 0.0;   // sigma * E
  double harvested = 0.0; // eta * P * dt
  double spilled = 0.0;   // excess above the v_max ceiling
};

/// E(n+1) = (1 - sigma) E(n) + eta P dt, clamped at the v_max energy ceiling.
/// Returns the new stored energy.
double buffer_step(Capacitor &cap, double allotted_power, double dt, BufferFlows *flows = nullptr);

double energy_of(const Capacitor &cap) noexcept;
double voltage_of(double energy, const Capacitor &cap);

enum class WithdrawOutcome { Ok, Insufficient };

/// Deducts `amount` only if the post-withdrawal voltage stays at or above v_off.
WithdrawOutcome withdraw(Capacitor &cap, double amount);

enum class Component : int { Mcu = 0, Sensing = 1, Actuation = 2 };
inline constexpr std::size_t kComponentCount = 3;
const char *to_string(Component c) noexcept;

class CapacitorBank {
public:
  CapacitorBank() = default;
  CapacitorBank(std::vector<Capacitor> caps, std::array<std::size_t, kComponentCount> component_buffer);

  std::size_t size() const noexcept { return caps_.size(); }
  Capacitor &operator[](std::size_t i) { return caps_[i]; }
  const Capacitor &operator[](std::size_t i) const { return caps_[i]; }
  std::vector<Capacitor> &capacitors() noexcept { return caps_; }
  const std::vector<Capacitor> &capacitors() const noexcept { return caps_; }

  /// Buffer that powers a hardware component.
  std::size_t buffer_for(Component c) const noexcept { return component_buffer_[static_cast<int>(c)]; }
  const std::array<std::size_t, kComponentCount> &component_map() const noexcept { return component_buffer_; }

  /// Sum of stored energies over all buffers.
  double total_energy() const noexcept;
  /// Sum of v_max energies over all buffers.
  double total_capacity() const noexcept;
  double total_capacitance() const noexcept;

private:
  std::vector<Capacitor> caps_;
  std::array<std::size_t, kComponentCount> component_buffer_{0, 0, 0};
};

} // namespace eam
