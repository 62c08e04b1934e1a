#include "eam/sim.hpp"

#include "eam/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace eam {

const char *to_string(EventKind k) noexcept {
  switch (k) {
  case EventKind::Release: return "release";
  case EventKind::Miss: return "miss";
  case EventKind::Start: return "start";
  case EventKind::Finish: return "finish";
  case EventKind::Abort: return "abort";
  case EventKind::Completion: return "completion";
  case EventKind::ProfileChange: return "profile";
  case EventKind::McuOn: return "mcu_on";
  case EventKind::McuOff: return "mcu_off";
  case EventKind::AboveOn: return "above_von";
  case EventKind::BelowOn: return "below_von";
  case EventKind::Drop: return "drop";
  }
  return "?";
}

void validate(const SimConfig &c) {
  if (!c.trace) throw config_error("sim: no trace");
  if (!(c.dt > 0.0)) throw config_error("sim: dt must be > 0");
  if (!(c.horizon - c.start_time >= c.dt)) throw config_error("sim: horizon must exceed start time by at least dt");
  if (c.start_time < c.trace->start_time() || c.horizon - c.dt > c.trace->end_time() + 1e-9)
    throw config_error(fmt::format("sim: run [{}, {}] not covered by trace span [{}, {}]", c.start_time, c.horizon,
                                   c.trace->start_time(), c.trace->end_time()));
  if (c.capacitors.empty()) throw config_error("bank: at least one capacitor required");
  if (c.initial_voltages.size() != c.capacitors.size())
    throw config_error("bank: one initial voltage per capacitor required");
  for (std::size_t i = 0; i < c.capacitors.size(); ++i) {
    try {
      validate(c.capacitors[i]);
    } catch (const Error &e) {
      throw config_error(fmt::format("bank.capacitors[{}]: {}", i, e.what()));
    }
    if (c.initial_voltages[i] < 0.0 || c.initial_voltages[i] > c.capacitors[i].v_max)
      throw config_error(fmt::format("bank.capacitors[{}]: initial voltage outside [0, v_max]", i));
  }
  for (auto b : c.component_map) {
    if (b >= c.capacitors.size()) throw config_error("bank: component mapped to a missing capacitor");
  }
  require_valid(c.app, c.capacitors.size());
  validate_scenarios(c.attacks);
  for (std::size_t i = 0; i < c.attacks.size(); ++i) {
    if (c.attacks[i].start >= c.horizon || c.attacks[i].end() <= c.start_time)
      throw config_error(fmt::format("attacks[{}]: window [{}, {}) outside the run [{}, {}]", i, c.attacks[i].start,
                                     c.attacks[i].end(), c.start_time, c.horizon));
  }
  validate(c.detector);
  try {
    validate(c.params);
  } catch (const Error &e) {
    throw config_error(fmt::format("params: {}", e.what()));
  }
  if (c.queue_capacity == 0) throw config_error("sim: queue capacity must be >= 1");
  if (!(c.timeline_interval > 0.0)) throw config_error("sim: timeline interval must be > 0");
  if (!(c.attack_window_tail >= 0.0)) throw config_error("sim: attack window tail must be >= 0");
}

CapacitorBank make_bank(const SimConfig &config) {
  std::vector<Capacitor> caps;
  for (std::size_t i = 0; i < config.capacitors.size(); ++i)
    caps.emplace_back(config.capacitors[i], config.initial_voltages[i]);
  CapacitorBank bank(std::move(caps), config.component_map);
  if (config.policy == PolicyKind::Central) return central_bank(bank);
  return bank;
}

AppSpec effective_app(const SimConfig &config) {
  return config.policy == PolicyKind::Central ? central_app(config.app) : config.app;
}

namespace {

bool in_attack(const std::vector<AttackScenario> &attacks, double t) {
  return std::any_of(attacks.begin(), attacks.end(), [t](const auto &s) { return s.contains(t); });
}

// The charging switches keep the last split the controller chose; before any decision everything
// goes to the first buffer.
std::vector<double> held_shares(const std::vector<double> &last, std::size_t buffers, double power) {
  std::vector<double> shares(buffers, 0.0);
  double total = 0.0;
  for (double s : last) total += s;
  if (last.size() != buffers || !(total > 0.0)) {
    shares[0] = power;
    return shares;
  }
  std::size_t tail = 0;
  for (std::size_t b = 0; b < buffers; ++b) {
    if (last[b] > 0.0) tail = b;
  }
  double assigned = 0.0;
  for (std::size_t b = 0; b < buffers; ++b) {
    if (b == tail) continue;
    shares[b] = last[b] / total * power;
    assigned += shares[b];
  }
  shares[tail] = std::max(0.0, power - assigned);
  return shares;
}

} // namespace

Simulation::Simulation(SimConfig config)
    : config_((validate(config), std::move(config))), app_(effective_app(config_)), graph_(app_),
      bank_(make_bank(config_)), queues_(graph_, config_.queue_capacity), state_(SchedulerState::initial(app_)),
      cursor_(*config_.trace) {
  slots_ = static_cast<std::int64_t>(std::llround((config_.horizon - config_.start_time) / config_.dt));
  timeline_every_ = std::max<std::int64_t>(1, std::llround(config_.timeline_interval / config_.dt));
  for (const auto &t : app_.tasks) log_.task_ids.push_back(t.id);
  log_.slots_at_or_above_on.assign(bank_.size(), 0);
  log_.start_time = config_.start_time;
  log_.end_time = config_.start_time + static_cast<double>(slots_) * config_.dt;
  log_.initial_energy = bank_.total_energy();
  above_on_.assign(bank_.size(), false);
  for (std::size_t b = 0; b < bank_.size(); ++b) {
    above_on_[b] = bank_[b].energy() >= bank_[b].on_energy();
    if (above_on_[b]) log_event(EventKind::AboveOn, -1, static_cast<int>(b));
  }
  if (mcu_on()) log_event(EventKind::McuOn);
  log_event(EventKind::ProfileChange);
}

double Simulation::now() const noexcept { return config_.start_time + static_cast<double>(slot_) * config_.dt; }

bool Simulation::mcu_on() const noexcept { return bank_[bank_.buffer_for(Component::Mcu)].powered(); }

void Simulation::log_event(EventKind kind, int task, int buffer, double value, double value2) {
  log_.events.push_back({slot_, now(), kind, task, buffer, value, value2, state_.profile});
}

void Simulation::abort_execution() {
  const auto &exec = *state_.executing;
  log_.ledger.wasted += exec.drawn;
  log_event(EventKind::Abort, static_cast<int>(exec.task), static_cast<int>(app_.tasks[exec.task].buffer), exec.drawn);
  // transactional: nothing consumed, nothing emitted, the release stays pending
  state_.executing.reset();
}

void Simulation::finish_execution() {
  const auto exec = *state_.executing;
  const auto i = exec.task;
  state_.executing.reset();

  Lineage lineage = queues_.consume(i);
  if (graph_.is_source[i]) lineage |= Lineage{1} << i;
  const double t_end = now() + config_.dt;
  const Token token{next_payload_++, t_end, lineage};
  const auto drops = queues_.emit(i, token);

  auto &clock = state_.clocks[i];
  if (clock.last_release == exec.release_time) clock.pending = false;

  log_event(EventKind::Finish, static_cast<int>(i), static_cast<int>(app_.tasks[i].buffer), exec.release_time);
  if (drops > 0) log_event(EventKind::Drop, static_cast<int>(i), -1, static_cast<double>(drops));
  if (i == graph_.sink && lineage != 0) {
    ++completions_;
    log_event(EventKind::Completion, static_cast<int>(i), -1, static_cast<double>(completions_));
  }
}

void Simulation::record_decision(bool force) {
  const auto running = decision_.running ? static_cast<int>(*decision_.running) : -1;
  if (!force && last_record_) {
    const auto &r = *last_record_;
    if (r.profile == decision_.profile && r.attack == decision_.attack && r.running == running &&
        r.states == decision_.states && !decision_.started)
      return;
  }
  DecisionRecord rec;
  rec.slot = slot_;
  rec.time = now();
  rec.profile = decision_.profile;
  rec.attack = decision_.attack;
  rec.remaining = decision_.remaining;
  rec.running = running;
  rec.started = decision_.started ? static_cast<int>(*decision_.started) : -1;
  rec.states = decision_.states;
  rec.shares = decision_.shares;
  rec.split = decision_.split;
  rec.energies.reserve(bank_.size());
  for (const auto &c : bank_.capacitors()) rec.energies.push_back(c.energy());
  last_record_ = rec;
  log_.decisions.push_back(std::move(rec));
}

void Simulation::sample_timeline(double power) {
  TimelineSample s;
  s.time = now();
  s.profile = state_.profile;
  s.attack = decided_this_slot_ && decision_.attack;
  s.mcu_on = mcu_on();
  s.running = state_.executing ? static_cast<int>(state_.executing->task) : -1;
  s.power = power;
  for (const auto &c : bank_.capacitors()) s.voltages.push_back(c.voltage());
  s.shares = shares_;
  log_.timeline.push_back(std::move(s));
}

void Simulation::step() {
  if (done()) throw invalid_argument("simulation already finished");
  const double t = now();
  const double dt = config_.dt;
  auto &ledger = log_.ledger;
  const double energy_before = bank_.total_energy();
  double slot_harvest = 0.0, slot_drain = 0.0, slot_spill = 0.0, slot_withdraw = 0.0, slot_overhead = 0.0;

  // 1. harvester power; nothing arrives while an attack is on
  const double power = in_attack(config_.attacks, t) ? 0.0 : cursor_.power_at(t);

  // 2. detector
  const AttackInfo info = detect(t, config_.attacks, config_.detector);

  // 3. policy, only while the MCU has power
  decided_this_slot_ = mcu_on();
  if (decided_this_slot_) {
    const Profile before = state_.profile;
    if (config_.policy == PolicyKind::Eam) {
      PolicyParams params = config_.params;
      AttackInfo seen = info;
      if (config_.overrides.pin_nml) {
        seen = AttackInfo{};
        params.omega0 = -std::numeric_limits<double>::infinity();
        params.omega1 = -std::numeric_limits<double>::infinity();
      }
      const PolicyInputs in{app_, graph_, bank_, queues_, seen, params, t, dt, power};
      policy_step(state_, in, decision_);
      if (config_.overrides.fh_allocation) {
        decision_.shares = fh_allocate(bank_, power);
        decision_.split = fh_allocate(bank_, 1.0);
      }
    } else {
      const PolicyInputs in{app_, graph_, bank_, queues_, info, config_.params, t, dt, power};
      rts_schedule(state_, in, config_.policy, decision_);
    }
    ++log_.invocations;
    slot_overhead = decision_.decision_energy;
    if (state_.profile != before) log_event(EventKind::ProfileChange);
    for (const auto &r : decision_.releases) {
      if (r.replaced_pending) log_event(EventKind::Miss, static_cast<int>(r.task));
      log_event(EventKind::Release, static_cast<int>(r.task), -1, r.deadline);
    }
    if (decision_.started) {
      const auto i = *decision_.started;
      const auto &task = app_.tasks[i];
      log_event(EventKind::Start, static_cast<int>(i), static_cast<int>(task.buffer),
                bank_[task.buffer].available_energy() + slot_overhead * (task.buffer == bank_.buffer_for(Component::Mcu)),
                task.energy_cost);
    }
    shares_ = decision_.shares;
    if (power > 0.0) last_split_ = shares_;
  } else {
    shares_ = config_.policy == PolicyKind::Fh ? fh_allocate(bank_, power)
                                               : held_shares(last_split_, bank_.size(), power);
  }

  // 4. buffer update
  for (std::size_t b = 0; b < bank_.size(); ++b) {
    buffer_step(bank_[b], shares_[b], dt, &flows_);
    slot_harvest += flows_.harvested;
    slot_drain += flows_.drained;
    slot_spill += flows_.spilled;
  }

  // 5. running task draws its pro-rata energy
  if (state_.executing) {
    auto &exec = *state_.executing;
    auto &cap = bank_[app_.tasks[exec.task].buffer];
    if (!cap.powered() || withdraw(cap, exec.energy_per_step) == WithdrawOutcome::Insufficient) {
      abort_execution();
    } else {
      exec.drawn += exec.energy_per_step;
      slot_withdraw += exec.energy_per_step;
      if (--exec.steps_left == 0) finish_execution();
    }
  }

  // power-state hysteresis and v_on bookkeeping
  const bool mcu_was_on = mcu_on();
  for (std::size_t b = 0; b < bank_.size(); ++b) {
    bank_[b].update_power_state();
    const bool above = bank_[b].energy() >= bank_[b].on_energy();
    if (above) ++log_.slots_at_or_above_on[b];
    if (above != above_on_[b]) {
      above_on_[b] = above;
      log_event(above ? EventKind::AboveOn : EventKind::BelowOn, -1, static_cast<int>(b));
    }
  }
  if (mcu_was_on != mcu_on()) {
    log_event(mcu_on() ? EventKind::McuOn : EventKind::McuOff);
    if (!mcu_on() && state_.executing) abort_execution();
  }

  ledger.harvested += slot_harvest;
  ledger.drained += slot_drain;
  ledger.spilled += slot_spill;
  ledger.withdrawn += slot_withdraw;
  ledger.overhead += slot_overhead;
  const double energy_after = bank_.total_energy();
  const double expected = energy_before + slot_harvest - slot_drain - slot_spill - slot_withdraw - slot_overhead;
  const double scale = std::max({energy_before, energy_after, 1e-12});
  ledger.max_residual = std::max(ledger.max_residual, std::abs(energy_after - expected) / scale);

  if (decided_this_slot_) record_decision(config_.log_every_attack_slot && decision_.attack);
  if (slot_ % timeline_every_ == 0) sample_timeline(power);
  ++slot_;
  ++log_.total_slots;
}

void Simulation::run_to_end() {
  while (!done()) step();
}

SimResult Simulation::finish() {
  run_to_end();
  log_.final_energy = bank_.total_energy();
  SimResult result;
  result.metrics = compute_metrics(log_, config_);
  result.log = std::move(log_);
  return result;
}

SimResult run(const SimConfig &config) {
  Simulation sim(config);
  return sim.finish();
}

MetricsReport compute_metrics(const EventLog &log, const SimConfig &config) {
  MetricsReport m;
  m.policy = to_string(config.policy);
  m.app = config.app.name;
  const double span = log.end_time - log.start_time;
  m.hours = span / 3600.0;

  const auto n_tasks = log.task_ids.size();
  struct Pending {
    double release;
    double deadline;
    bool done;
  };
  std::vector<std::vector<Pending>> releases(n_tasks);

  for (const auto &e : log.events) {
    switch (e.kind) {
    case EventKind::Completion:
      ++m.completions;
      m.completions_timeline.emplace_back(e.time + config.dt, m.completions);
      break;
    case EventKind::Release: releases[e.task].push_back({e.time, e.value, false}); break;
    case EventKind::Finish: {
      const double finished = e.time + config.dt;
      for (auto &r : releases[e.task]) {
        if (r.release == e.value && !r.done) {
          r.done = finished <= r.deadline;
          break;
        }
      }
      break;
    }
    case EventKind::Abort:
      ++m.aborts;
      m.wasted_energy += e.value;
      break;
    default: break;
    }
  }
  m.app_exec_rate = m.hours > 0.0 ? static_cast<double>(m.completions) / m.hours : 0.0;

  double sched_sum = 0.0;
  std::size_t sched_count = 0;
  for (std::size_t i = 0; i < n_tasks; ++i) {
    TaskSchedulability s;
    s.task = log.task_ids[i];
    for (const auto &r : releases[i]) {
      // releases whose deadline lies beyond the run and were not served are undecided
      if (!r.done && r.deadline > log.end_time) continue;
      ++s.releases;
      if (r.done) ++s.scheduled;
    }
    s.fraction = s.releases > 0 ? static_cast<double>(s.scheduled) / static_cast<double>(s.releases) : 0.0;
    if (s.releases > 0) {
      sched_sum += s.fraction;
      ++sched_count;
    }
    m.schedulability.push_back(std::move(s));
  }
  m.mean_schedulability = sched_count > 0 ? sched_sum / static_cast<double>(sched_count) : 0.0;

  // component -> buffer as the run saw it
  std::array<std::size_t, kComponentCount> buffer_of = config.component_map;
  if (config.policy == PolicyKind::Central) buffer_of = {0, 0, 0};

  for (std::size_t c = 0; c < kComponentCount; ++c) {
    const auto b = buffer_of[c];
    m.availability[c] = log.total_slots > 0 ? static_cast<double>(log.slots_at_or_above_on[b]) /
                                                  static_cast<double>(log.total_slots)
                                            : 0.0;
    if (config.attacks.empty()) {
      m.availability_latency[c] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto &a : config.attacks) {
      const double end = a.end();
      if (end < log.start_time || end > log.end_time) continue;
      bool above = false;
      double latency = log.end_time - end; // censored when the buffer never recovers
      bool found = false;
      for (const auto &e : log.events) {
        if (e.buffer != static_cast<int>(b)) continue;
        if (e.kind != EventKind::AboveOn && e.kind != EventKind::BelowOn) continue;
        if (e.time < end) {
          above = e.kind == EventKind::AboveOn;
          continue;
        }
        if (above) {
          latency = 0.0;
          found = true;
          break;
        }
        if (e.kind == EventKind::AboveOn) {
          latency = e.time - end;
          found = true;
          break;
        }
      }
      if (!found && above) latency = 0.0;
      sum += latency;
      ++counted;
    }
    m.availability_latency[c] = counted > 0 ? sum / static_cast<double>(counted)
                                            : std::numeric_limits<double>::quiet_NaN();
  }

  m.invocations = log.invocations;
  m.overhead_energy = config.params.decision_cost * static_cast<double>(log.invocations);

  double window_hours = 0.0;
  std::uint64_t window_completions = 0;
  for (const auto &a : config.attacks) {
    const double lo = std::max(a.start, log.start_time);
    const double hi = std::min(a.end() + config.attack_window_tail, log.end_time);
    if (hi <= lo) continue;
    window_hours += (hi - lo) / 3600.0;
    for (const auto &[t, count] : m.completions_timeline) {
      if (t > lo && t <= hi) ++window_completions;
    }
  }
  m.attack_window_rate = window_hours > 0.0 ? static_cast<double>(window_completions) / window_hours : 0.0;
  return m;
}

} // namespace eam
