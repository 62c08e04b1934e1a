#pragma once

#include "eam/app.hpp"
#include "eam/energy.hpp"
#include "eam/policy.hpp"

#include <string>
#include <vector>

namespace eam {

enum class PolicyKind { Eam, Fh, Central };
const char *to_string(PolicyKind k) noexcept;
PolicyKind policy_kind_from_string(const std::string &s);

/// Static federated charging: share_i = C_i / sum(C) * P, independent of task state.
std::vector<double> fh_allocate(const CapacitorBank &bank, double harvested_power);

/// Single-buffer equivalent of `bank`: capacitance is the sum of all buffers, other physics
/// parameters come from buffer 0, and the stored energy is the bank's total.
CapacitorBank central_bank(const CapacitorBank &bank);

/// Same application with every task drawing from buffer 0.
AppSpec central_app(const AppSpec &spec);

/// Profile-unaware RTS slot shared by both baselines: NML rates, no attack rule, same
/// release/dependency/energy gating as EAM. Allocation is FH-proportional for Fh and
/// all-to-buffer-0 for Central.
void rts_schedule(SchedulerState &state, const PolicyInputs &in, PolicyKind kind, SlotDecision &out);

} // namespace eam
