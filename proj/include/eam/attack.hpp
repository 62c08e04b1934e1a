#pragma once

#include "eam/trace.hpp"

#include <cstdint>
#include <span>

namespace eam {

/// What the attack detector reports to the mitigation policy.
struct AttackInfo {
  bool ongoing = false;  // a_o
  double accuracy = 0.0; // a_oa
  double elapsed = 0.0;  // a_et, s
  double remaining = 0.0; // a_rt, s

  friend bool operator==(const AttackInfo &, const AttackInfo &) = default;
};

struct DetectorConfig {
  double detection_delay = 0.0;      // s before a_o flips to 1
  double remaining_time_error = 0.0; // e: a_rt is scaled by (1 + u), u ~ U(-e, e)
  double reported_accuracy = 1.0;
  std::uint64_t rng_seed = 1;
};

void validate(const DetectorConfig &cfg);

/// Ground-truth detector over the injected scenarios. Stateless: the noise draw is a hash of
/// (seed, t), so the same inputs always give the same AttackInfo.
AttackInfo detect(double t, std::span<const AttackScenario> scenarios, const DetectorConfig &cfg);

} // namespace eam
