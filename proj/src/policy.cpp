#include "eam/policy.hpp"

#include "eam/error.hpp"

#include <algorithm>
#include <cmath>

namespace eam {

void validate(const PolicyParams &p) {
  if (!(p.alpha >= 0.0)) throw invalid_argument("alpha must be >= 0");
  if (!(p.omega0 >= 0.0 && p.omega1 > p.omega0)) throw invalid_argument("thresholds must satisfy omega1 > omega0 >= 0");
  if (!(p.lambda_lo >= 0.0 && p.lambda_hi > p.lambda_lo))
    throw invalid_argument("share weights must satisfy lambda_hi > lambda_lo >= 0");
  if (!(p.decision_cost >= 0.0)) throw invalid_argument("decision cost must be >= 0");
  if (!(p.decision_time >= 0.0)) throw invalid_argument("decision time must be >= 0");
  if (!(p.accuracy_threshold >= 0.0 && p.accuracy_threshold <= 1.0))
    throw invalid_argument("accuracy threshold must be in [0, 1]");
}

const char *to_string(TaskState s) noexcept {
  switch (s) {
  case TaskState::Ready: return "ready";
  case TaskState::Running: return "running";
  case TaskState::Blocked: return "blocked";
  case TaskState::Suspended: return "suspended";
  }
  return "?";
}

bool is_allowed_transition(TaskState from, TaskState to) noexcept {
  // Running is entered only through Ready.
  if (to == TaskState::Running) return from == TaskState::Ready || from == TaskState::Running;
  return true;
}

SchedulerState SchedulerState::initial(const AppSpec &spec) {
  SchedulerState s;
  const auto n = spec.tasks.size();
  s.states.assign(n, TaskState::Blocked);
  s.clocks.assign(n, TaskClock{});
  apply_profile(s, spec, Profile::NML);
  return s;
}

double SchedulerState::period(std::size_t task) const noexcept {
  const double r = rates[task];
  return r > 0.0 ? 3600.0 / r : std::numeric_limits<double>::infinity();
}

Profile select_profile(const AttackInfo &info, double total_energy, const PolicyParams &params) {
  if (info.ongoing) return info.remaining > params.alpha ? Profile::LA : Profile::SA;
  if (total_energy > params.omega1) return Profile::NML;
  if (total_energy < params.omega0) return Profile::CTL;
  return Profile::LP;
}

bool attack_effective(const AttackInfo &info, const PolicyParams &params) noexcept {
  return info.ongoing && (!params.accuracy_gate || info.accuracy > params.accuracy_threshold);
}

ActiveSet build_active_set(const AppSpec &spec, Profile profile) {
  ActiveSet set;
  set.rates.assign(spec.tasks.size(), 0.0);
  for (std::size_t i = 0; i < spec.tasks.size(); ++i) {
    const double r = spec.tasks[i].rate(profile);
    if (r > 0.0) {
      set.tasks.push_back(i);
      set.rates[i] = r;
    }
  }
  return set;
}

void apply_profile(SchedulerState &state, const AppSpec &spec, Profile profile) {
  state.profile = profile;
  const auto n = spec.tasks.size();
  state.active.assign(n, false);
  state.rates.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = spec.tasks[i].rate(profile);
    if (r > 0.0) {
      state.active[i] = true;
      state.rates[i] = r;
    }
  }
}

void release_due_tasks(SchedulerState &state, const AppSpec &spec, const TaskGraph &graph, const QueueSet &queues,
                       double now, std::vector<ReleaseEvent> &out) {
  for (std::size_t i = 0; i < spec.tasks.size(); ++i) {
    if (!state.active[i]) continue;
    auto &clock = state.clocks[i];
    const double period = state.period(i);
    const bool separated = !clock.ever_released || now >= clock.last_release + period;
    if (!separated) continue;
    if (graph.is_source[i]) {
      const bool replaced = clock.pending;
      clock.pending = true;
      clock.ever_released = true;
      clock.last_release = now;
      clock.deadline = now + period;
      out.push_back({i, now, clock.deadline, replaced});
    } else if (!clock.pending && queues.has_input(i, spec.tasks[i].join)) {
      clock.pending = true;
      clock.ever_released = true;
      clock.last_release = now;
      clock.deadline = now + period;
      out.push_back({i, now, clock.deadline, false});
    }
  }
}

void set_task_states(SchedulerState &state, const AppSpec &spec, const CapacitorBank &bank, const AttackInfo &info,
                     bool attack) {
  for (std::size_t i = 0; i < spec.tasks.size(); ++i) {
    if (state.executing && state.executing->task == i) {
      state.states[i] = TaskState::Running;
      continue;
    }
    if (!state.active[i] || !state.clocks[i].pending) {
      state.states[i] = TaskState::Blocked;
      continue;
    }
    const auto &task = spec.tasks[i];
    const double available = bank[task.buffer].available_energy();
    if (attack) {
      // defer unless the attack outlasts the task period
      state.states[i] = (info.remaining > state.period(i) && available > task.energy_cost) ? TaskState::Ready
                                                                                           : TaskState::Blocked;
    } else {
      state.states[i] = available >= task.energy_cost ? TaskState::Ready : TaskState::Suspended;
    }
  }
}

std::optional<std::size_t> pick_execution_task(SchedulerState &state, const AppSpec &spec,
                                               const CapacitorBank &bank, Dispatch dispatch) {
  if (state.executing) return std::nullopt;
  std::optional<std::size_t> chosen;
  for (std::size_t i = 0; i < spec.tasks.size(); ++i) {
    if (state.states[i] != TaskState::Ready) continue;
    const auto &task = spec.tasks[i];
    if (!(bank[task.buffer].available_energy() >= task.energy_cost)) continue;
    if (dispatch == Dispatch::Index) {
      chosen = i;
      break;
    }
    if (!chosen || state.clocks[i].deadline < state.clocks[*chosen].deadline) chosen = i;
  }
  if (chosen) state.states[*chosen] = TaskState::Running;
  return chosen;
}

Execution begin_execution(const SchedulerState &state, const AppSpec &spec, std::size_t task, double now, double dt) {
  const auto &t = spec.tasks[task];
  Execution e;
  e.task = task;
  e.steps_total = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t.duration / dt - 1e-9)));
  e.steps_left = e.steps_total;
  e.energy_per_step = t.energy_cost / static_cast<double>(e.steps_total);
  e.started = now;
  e.release_time = state.clocks[task].last_release;
  return e;
}

std::vector<double> allocate_harvest(const SchedulerState &state, const AppSpec &spec, std::size_t buffer_count,
                                     double harvested_power, const PolicyParams &params) {
  std::vector<double> weight(buffer_count, 0.0);
  std::vector<bool> hot(buffer_count, false);
  for (std::size_t i = 0; i < spec.tasks.size(); ++i) {
    const auto b = spec.tasks[i].buffer;
    weight[b] = params.lambda_lo;
    if (!state.active[i]) continue;
    const auto s = state.states[i];
    if (s == TaskState::Ready || s == TaskState::Running || s == TaskState::Suspended) hot[b] = true;
  }
  double total = 0.0;
  for (std::size_t b = 0; b < buffer_count; ++b) {
    if (hot[b]) weight[b] = params.lambda_hi;
    total += weight[b];
  }
  std::vector<double> shares(buffer_count, 0.0);
  if (buffer_count == 0) return shares;
  if (!(total > 0.0)) {
    shares[0] = harvested_power;
    return shares;
  }
  // the last weighted buffer takes the remainder so the shares sum to P exactly
  std::size_t last = 0;
  for (std::size_t b = 0; b < buffer_count; ++b) {
    if (weight[b] > 0.0) last = b;
  }
  double assigned = 0.0;
  for (std::size_t b = 0; b < buffer_count; ++b) {
    if (b == last || weight[b] == 0.0) continue;
    shares[b] = weight[b] / total * harvested_power;
    assigned += shares[b];
  }
  shares[last] = std::max(0.0, harvested_power - assigned);
  return shares;
}

double charge_decision_cost(CapacitorBank &bank, double cost) {
  auto &mcu = bank[bank.buffer_for(Component::Mcu)];
  const double taken = std::min(cost, mcu.energy());
  mcu.set_energy(mcu.energy() - taken);
  return taken;
}

void policy_step(SchedulerState &state, const PolicyInputs &in, SlotDecision &out) {
  const bool attack = attack_effective(in.info, in.params);
  AttackInfo seen = in.info;
  seen.ongoing = attack;

  out.time = in.now;
  out.attack = attack;
  out.remaining = attack ? in.info.remaining : 0.0;
  out.releases.clear();
  out.started.reset();

  // profile changes wait for the running task to finish
  const Profile wanted = select_profile(seen, in.bank.total_energy(), in.params);
  out.profile_changed = false;
  if (wanted != state.profile && !state.executing) {
    apply_profile(state, in.spec, wanted);
    out.profile_changed = true;
  }
  out.profile = state.profile;

  release_due_tasks(state, in.spec, in.graph, in.queues, in.now, out.releases);
  set_task_states(state, in.spec, in.bank, seen, attack);
  if (auto picked = pick_execution_task(state, in.spec, in.bank, in.params.dispatch)) {
    state.executing = begin_execution(state, in.spec, *picked, in.now, in.dt);
    out.started = picked;
  }
  out.running = state.executing ? std::optional<std::size_t>(state.executing->task) : std::nullopt;
  out.states = state.states;

  out.shares = allocate_harvest(state, in.spec, in.bank.size(), in.harvested_power, in.params);
  out.split = allocate_harvest(state, in.spec, in.bank.size(), 1.0, in.params);
  out.decision_energy = charge_decision_cost(in.bank, in.params.decision_cost);
}

} // namespace eam
