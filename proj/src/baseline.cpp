#include "eam/baseline.hpp"

#include "eam/error.hpp"

#include <fmt/format.h>

namespace eam {

const char *to_string(PolicyKind k) noexcept {
  switch (k) {
  case PolicyKind::Eam: return "eam";
  case PolicyKind::Fh: return "fh";
  case PolicyKind::Central: return "central";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string &s) {
  if (s == "eam") return PolicyKind::Eam;
  if (s == "fh") return PolicyKind::Fh;
  if (s == "central") return PolicyKind::Central;
  throw invalid_argument(fmt::format("unknown policy '{}' (expected eam, fh or central)", s));
}

std::vector<double> fh_allocate(const CapacitorBank &bank, double harvested_power) {
  if (!(harvested_power >= 0.0)) throw invalid_argument("harvested power must be >= 0");
  std::vector<double> shares(bank.size(), 0.0);
  const double total = bank.total_capacitance();
  double assigned = 0.0;
  for (std::size_t i = 0; i + 1 < bank.size(); ++i) {
    shares[i] = bank[i].params().capacitance / total * harvested_power;
    assigned += shares[i];
  }
  shares.back() = std::max(0.0, harvested_power - assigned);
  return shares;
}

CapacitorBank central_bank(const CapacitorBank &bank) {
  CapacitorParams p = bank[0].params();
  p.capacitance = bank.total_capacitance();
  Capacitor cap(p);
  cap.set_energy(bank.total_energy());
  cap.set_powered(cap.voltage() >= p.v_on);
  return CapacitorBank({cap}, {0, 0, 0});
}

AppSpec central_app(const AppSpec &spec) {
  AppSpec out = spec;
  for (auto &t : out.tasks) t.buffer = 0;
  return out;
}

void rts_schedule(SchedulerState &state, const PolicyInputs &in, PolicyKind kind, SlotDecision &out) {
  out.time = in.now;
  out.attack = false;
  out.remaining = 0.0;
  out.releases.clear();
  out.started.reset();
  out.profile_changed = false;
  if (state.profile != Profile::NML) {
    apply_profile(state, in.spec, Profile::NML);
    out.profile_changed = true;
  }
  out.profile = Profile::NML;

  const AttackInfo none{};
  release_due_tasks(state, in.spec, in.graph, in.queues, in.now, out.releases);
  set_task_states(state, in.spec, in.bank, none, false);
  if (auto picked = pick_execution_task(state, in.spec, in.bank, in.params.dispatch)) {
    state.executing = begin_execution(state, in.spec, *picked, in.now, in.dt);
    out.started = picked;
  }
  out.running = state.executing ? std::optional<std::size_t>(state.executing->task) : std::nullopt;
  out.states = state.states;

  if (kind == PolicyKind::Fh) {
    out.shares = fh_allocate(in.bank, in.harvested_power);
    out.split = fh_allocate(in.bank, 1.0);
  } else {
    out.shares.assign(in.bank.size(), 0.0);
    out.shares[0] = in.harvested_power;
    out.split.assign(in.bank.size(), 0.0);
    out.split[0] = 1.0;
  }
  out.decision_energy = charge_decision_cost(in.bank, in.params.decision_cost);
}

} // namespace eam
