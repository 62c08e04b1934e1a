#include "eam/attack.hpp"

#include "eam/error.hpp"

#include <algorithm>
#include <bit>

namespace eam {

namespace {

// splitmix64 finaliser
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// uniform in [-1, 1)
double symmetric_unit(std::uint64_t seed, double t) {
  const std::uint64_t h = mix(seed ^ mix(std::bit_cast<std::uint64_t>(t)));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

} // namespace

void validate(const DetectorConfig &cfg) {
  if (!(cfg.detection_delay >= 0.0)) throw invalid_argument("detection delay must be >= 0");
  if (!(cfg.remaining_time_error >= 0.0)) throw invalid_argument("remaining-time error must be >= 0");
  if (!(cfg.reported_accuracy >= 0.0 && cfg.reported_accuracy <= 1.0))
    throw invalid_argument("reported accuracy must be in [0, 1]");
}

AttackInfo detect(double t, std::span<const AttackScenario> scenarios, const DetectorConfig &cfg) {
  AttackInfo info;
  info.accuracy = cfg.reported_accuracy;
  if (t < 0.0) return info;
  for (const auto &s : scenarios) {
    const double seen_from = s.start + cfg.detection_delay;
    if (t < seen_from || t >= s.end() + cfg.detection_delay) continue;
    info.ongoing = true;
    info.elapsed = t - s.start;
    double remaining = s.end() - t;
    if (cfg.remaining_time_error > 0.0) remaining *= 1.0 + cfg.remaining_time_error * symmetric_unit(cfg.rng_seed, t);
    info.remaining = std::max(0.0, remaining);
    return info;
  }
  return info;
}

} // namespace eam
