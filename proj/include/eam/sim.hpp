#pragma once

#include "eam/app.hpp"
#include "eam/attack.hpp"
#include "eam/baseline.hpp"
#include "eam/energy.hpp"
#include "eam/policy.hpp"
#include "eam/trace.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace eam {

/// Test hooks that bend EAM towards a baseline for composition checks.
struct EamOverrides {
  bool pin_nml = false;       // ignore the detector and stay in NML
  bool fh_allocation = false; // replace federated harvesting with fh_allocate
};

struct SimConfig {
  std::shared_ptr<const EnergyTrace> trace;
  std::vector<AttackScenario> attacks;
  AppSpec app;
  PolicyKind policy = PolicyKind::Eam;
  PolicyParams params;
  std::vector<CapacitorParams> capacitors; // drain_fraction is per slot
  std::vector<double> initial_voltages;    // V, one per capacitor
  std::array<std::size_t, kComponentCount> component_map{0, 0, 1};
  DetectorConfig detector;
  double dt = 1e-3;          // s
  double start_time = 0.0;   // s
  double horizon = 3600.0;   // s, end of the run
  std::uint64_t seed = 1;
  std::size_t queue_capacity = 4;
  double timeline_interval = 1.0; // s between timeline samples
  bool log_every_attack_slot = false;
  double attack_window_tail = 0.0; // s appended after each attack for attack_window_rate
  EamOverrides overrides;
};

/// Throws Config/InvalidArgument describing the first problem.
void validate(const SimConfig &config);

/// Bank and application as the selected policy sees them (Central collapses to one buffer).
CapacitorBank make_bank(const SimConfig &config);
AppSpec effective_app(const SimConfig &config);

enum class EventKind {
  Release,
  Miss,       // a pending release was superseded before it completed
  Start,      // value = available energy at selection, value2 = task cost
  Finish,     // value = release time served
  Abort,      // value = energy wasted
  Completion, // value = cumulative completions
  ProfileChange,
  McuOn,
  McuOff,
  AboveOn, // buffer voltage reached v_on
  BelowOn, // buffer voltage fell below v_on
  Drop,    // queue overflow; value = tokens dropped
};
const char *to_string(EventKind k) noexcept;

struct Event {
  std::int64_t slot = 0;
  double time = 0.0;
  EventKind kind = EventKind::Release;
  int task = -1;
  int buffer = -1;
  double value = 0.0;
  double value2 = 0.0;
  Profile profile = Profile::NML;
};

/// Policy output for one slot. Logged whenever profile, states, running task or attack flag
/// change, and on every attack slot when SimConfig::log_every_attack_slot is set.
struct DecisionRecord {
  std::int64_t slot = 0;
  double time = 0.0;
  Profile profile = Profile::NML;
  bool attack = false;
  double remaining = 0.0;
  int running = -1;
  int started = -1;
  std::vector<TaskState> states;
  std::vector<double> shares;
  std::vector<double> split;    // harvest fractions, meaningful even when no power arrives
  std::vector<double> energies; // buffer energies when the decision was taken
};

struct TimelineSample {
  double time = 0.0;
  Profile profile = Profile::NML;
  bool attack = false;
  bool mcu_on = false;
  int running = -1;
  double power = 0.0;
  std::vector<double> voltages;
  std::vector<double> shares;
};

struct EnergyLedger {
  double harvested = 0.0; // eta * share * dt summed
  double drained = 0.0;
  double withdrawn = 0.0;
  double overhead = 0.0;
  double spilled = 0.0;
  double wasted = 0.0;    // drawn by executions that later aborted
  double max_residual = 0.0; // worst per-slot relative conservation error
};

struct EventLog {
  std::vector<std::string> task_ids;
  std::vector<Event> events;
  std::vector<DecisionRecord> decisions;
  std::vector<TimelineSample> timeline;
  std::int64_t total_slots = 0;
  std::vector<std::int64_t> slots_at_or_above_on; // per buffer
  std::uint64_t invocations = 0;
  double start_time = 0.0;
  double end_time = 0.0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  EnergyLedger ledger;
};

struct TaskSchedulability {
  std::string task;
  std::uint64_t releases = 0;
  std::uint64_t scheduled = 0;
  double fraction = 0.0;
};

struct MetricsReport {
  std::string policy;
  std::string app;
  double hours = 0.0;
  std::uint64_t completions = 0;
  double app_exec_rate = 0.0; // completions per hour
  std::vector<TaskSchedulability> schedulability;
  double mean_schedulability = 0.0;
  std::array<double, kComponentCount> availability{};
  /// Mean seconds from attack end until the component's buffer is back at v_on; NaN without attacks.
  std::array<double, kComponentCount> availability_latency{};
  double overhead_energy = 0.0;
  std::uint64_t invocations = 0;
  double attack_window_rate = 0.0; // completions per hour inside attack windows (+ tail)
  std::uint64_t aborts = 0;
  double wasted_energy = 0.0;
  std::vector<std::pair<double, std::uint64_t>> completions_timeline;
};

MetricsReport compute_metrics(const EventLog &log, const SimConfig &config);

struct SimResult {
  MetricsReport metrics;
  EventLog log;
};

/// Deterministic slot loop. One instance per run; nothing is shared between instances
/// except the immutable trace.
class Simulation {
public:
  explicit Simulation(SimConfig config);

  bool done() const noexcept { return slot_ >= slots_; }
  double now() const noexcept;
  std::int64_t slot() const noexcept { return slot_; }

  /// Advances one slot: power, detector, policy, buffer update, task progress.
  void step();
  void run_to_end();
  SimResult finish();

  const SimConfig &config() const noexcept { return config_; }
  const CapacitorBank &bank() const noexcept { return bank_; }
  CapacitorBank &bank() noexcept { return bank_; }
  const SchedulerState &scheduler() const noexcept { return state_; }
  const QueueSet &queues() const noexcept { return queues_; }
  const EventLog &log() const noexcept { return log_; }
  const SlotDecision &last_decision() const noexcept { return decision_; }
  std::uint64_t completions() const noexcept { return completions_; }
  bool mcu_on() const noexcept;

private:
  void log_event(EventKind kind, int task = -1, int buffer = -1, double value = 0.0, double value2 = 0.0);
  void abort_execution();
  void finish_execution();
  void record_decision(bool force);
  void sample_timeline(double power);

  SimConfig config_;
  AppSpec app_;
  TaskGraph graph_;
  CapacitorBank bank_;
  QueueSet queues_;
  SchedulerState state_;
  TraceCursor cursor_;
  EventLog log_;
  SlotDecision decision_;
  std::optional<DecisionRecord> last_record_;
  std::vector<bool> above_on_;
  std::vector<double> shares_;
  std::vector<double> last_split_;
  BufferFlows flows_;
  std::int64_t slot_ = 0;
  std::int64_t slots_ = 0;
  std::int64_t timeline_every_ = 1;
  std::uint64_t completions_ = 0;
  std::uint64_t next_payload_ = 1;
  bool decided_this_slot_ = false;
};

SimResult run(const SimConfig &config);

} // namespace eam
