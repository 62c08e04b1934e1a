#pragma once

#include "eam/app.hpp"
#include "eam/attack.hpp"
#include "eam/energy.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace eam {

enum class Dispatch { Index, Edf };

struct PolicyParams {
  double alpha = 60.0;            // s, a_rt above which an attack is treated as long
  double omega0 = 0.0;            // J, below: CTL
  double omega1 = 0.0;            // J, above: NML
  double lambda_hi = 0.8;         // share weight for buffers backing ready/running work
  double lambda_lo = 0.2;         // share weight for everything else
  double decision_cost = 1.781e-9; // J per invocation
  double decision_time = 1.237e-6; // s per invocation
  bool accuracy_gate = false;     // require a_oa > accuracy_threshold before reacting
  double accuracy_threshold = 0.5;
  Dispatch dispatch = Dispatch::Index;
};

void validate(const PolicyParams &params);

enum class TaskState : unsigned char { Ready, Running, Blocked, Suspended };
const char *to_string(TaskState s) noexcept;

/// Allowed task-state transitions between consecutive slots.
bool is_allowed_transition(TaskState from, TaskState to) noexcept;

/// Periodic-release bookkeeping for one task.
struct TaskClock {
  bool pending = false;       // released and not yet completed
  bool ever_released = false;
  double last_release = 0.0;  // s
  double deadline = std::numeric_limits<double>::infinity();
};

struct Execution {
  std::size_t task = 0;
  std::size_t steps_total = 0;
  std::size_t steps_left = 0;
  double energy_per_step = 0.0;
  double started = 0.0;
  double release_time = 0.0;
  double drawn = 0.0; // J withdrawn so far
};

struct SchedulerState {
  Profile profile = Profile::NML;
  std::vector<bool> active;      // T
  std::vector<double> rates;     // R, executions per hour; 0 when inactive
  std::vector<TaskState> states; // S
  std::optional<Execution> executing;
  std::vector<TaskClock> clocks;

  /// NML active set, nothing released, nothing running.
  static SchedulerState initial(const AppSpec &spec);
  double period(std::size_t task) const noexcept;
};

struct ActiveSet {
  std::vector<std::size_t> tasks; // spec index order
  std::vector<double> rates;      // indexed by task; 0 when excluded
};

Profile select_profile(const AttackInfo &info, double total_energy, const PolicyParams &params);

/// Whether the policy should treat the detector report as an ongoing attack.
bool attack_effective(const AttackInfo &info, const PolicyParams &params) noexcept;

ActiveSet build_active_set(const AppSpec &spec, Profile profile);

/// Installs the active set for `profile` into the state.
void apply_profile(SchedulerState &state, const AppSpec &spec, Profile profile);

struct ReleaseEvent {
  std::size_t task = 0;
  double time = 0.0;
  double deadline = 0.0;
  bool replaced_pending = false; // an uncompleted release was superseded
};

/// Releases periodic source tasks whose period elapsed and dependent tasks whose input arrived
/// after their minimum separation. A source never holds more than one pending release.
void release_due_tasks(SchedulerState &state, const AppSpec &spec, const TaskGraph &graph, const QueueSet &queues,
                       double now, std::vector<ReleaseEvent> &out);

/// Recomputes S for every task. `attack` selects the attack-time deferral rule.
void set_task_states(SchedulerState &state, const AppSpec &spec, const CapacitorBank &bank, const AttackInfo &info,
                     bool attack);

/// Picks the first Ready, funded task (in dispatch order) when nothing is running.
/// The chosen task becomes Running; the caller starts its execution.
std::optional<std::size_t> pick_execution_task(SchedulerState &state, const AppSpec &spec,
                                               const CapacitorBank &bank, Dispatch dispatch = Dispatch::Index);

/// Builds the Execution record for a freshly picked task.
Execution begin_execution(const SchedulerState &state, const AppSpec &spec, std::size_t task, double now, double dt);

/// Federated harvesting: a buffer weighs lambda_hi when it backs a Ready, Running or Suspended
/// task of the active set, lambda_lo otherwise; buffers backing no task weigh 0. Weights are
/// normalised so the shares sum to `harvested_power`.
std::vector<double> allocate_harvest(const SchedulerState &state, const AppSpec &spec, std::size_t buffer_count,
                                     double harvested_power, const PolicyParams &params);

struct SlotDecision {
  double time = 0.0;
  Profile profile = Profile::NML;
  bool profile_changed = false;
  bool attack = false;
  double remaining = 0.0; // a_rt seen by the policy
  std::optional<std::size_t> started;
  std::optional<std::size_t> running;
  std::vector<TaskState> states;
  std::vector<double> shares;
  std::vector<double> split; // fraction of harvest per buffer, sums to 1
  std::vector<ReleaseEvent> releases;
  double decision_energy = 0.0;
};

struct PolicyInputs {
  const AppSpec &spec;
  const TaskGraph &graph;
  CapacitorBank &bank;
  const QueueSet &queues;
  const AttackInfo &info;
  const PolicyParams &params;
  double now;
  double dt;
  double harvested_power; // W available for allocation this slot
};

/// One EAM slot: profile -> active set -> releases -> states -> dispatch -> allocation,
/// then the decision cost is drawn from the MCU buffer.
void policy_step(SchedulerState &state, const PolicyInputs &in, SlotDecision &out);

/// Draws the per-invocation overhead from the MCU buffer (never below zero). Returns the energy taken.
double charge_decision_cost(CapacitorBank &bank, double cost);

} // namespace eam
