#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace eam {

struct TraceSample {
  double time;    // s
  double voltage; // V
};

/// Harvester output voltage recorded across a known load resistor.
/// Samples are held with a zero-order hold between timestamps.
class EnergyTrace {
public:
  EnergyTrace(std::vector<TraceSample> samples, double load_resistance, std::string name = "trace");

  const std::vector<TraceSample> &samples() const noexcept { return samples_; }
  double load_resistance() const noexcept { return load_resistance_; }
  const std::string &name() const noexcept { return name_; }

  double start_time() const noexcept { return samples_.front().time; }
  double end_time() const noexcept { return samples_.back().time; }
  bool covers(double t) const noexcept { return t >= start_time() && t <= end_time(); }

  /// Voltage at t under the zero-order hold. Throws OutOfRange outside the span.
  double voltage_at(double t) const;

  /// Index of the sample governing t (last sample with time <= t).
  std::size_t index_at(double t) const;

private:
  std::vector<TraceSample> samples_;
  double load_resistance_;
  std::string name_;
};

enum class AttackKind { Short, Long };

struct AttackScenario {
  double start = 0.0;    // s
  double duration = 0.0; // s
  AttackKind kind = AttackKind::Short;
  std::string id;

  double end() const noexcept { return start + duration; }
  bool contains(double t) const noexcept { return t >= start && t < end(); }
};

/// Throws InvalidArgument on bad fields or overlapping windows.
void validate_scenarios(const std::vector<AttackScenario> &scenarios);

enum class WaveKind { Constant, Sinusoid, Step };

struct SynthParams {
  double amplitude = 1.0; // V
  double period = 60.0;   // s, sinusoid only
  double length = 3600.0; // s
  double interval = 1.0;  // s
  double load_resistance = 30000.0;
};

/// Reads `time,voltage` records. '#' lines and a leading non-numeric header are skipped;
/// comma, tab and space delimiters are accepted.
EnergyTrace load_trace(const std::filesystem::path &path, double load_resistance);
EnergyTrace parse_trace(const std::string &text, double load_resistance, std::string name = "trace");

void write_trace(const EnergyTrace &trace, const std::filesystem::path &path);

/// Sinusoid is rectified: V(t) = A * |sin(2 pi t / period)|.
/// Step is 0 V for t < length/2 and A afterwards.
EnergyTrace synthesize_trace(WaveKind kind, const SynthParams &params);

/// Zeroes every sample with start <= t < start + duration. The input is not modified.
EnergyTrace inject_attack(const EnergyTrace &trace, const AttackScenario &scenario);

/// P = V^2 / R_load with V from the zero-order hold.
double power_from_voltage(const EnergyTrace &trace, double t);

/// Monotone reader for simulation loops; amortised O(1) per query when t is non-decreasing.
class TraceCursor {
public:
  explicit TraceCursor(const EnergyTrace &trace) : trace_(&trace) {}

  double power_at(double t);

private:
  const EnergyTrace *trace_;
  std::size_t index_ = 0;
};

const char *to_string(WaveKind kind) noexcept;
const char *to_string(AttackKind kind) noexcept;
WaveKind wave_kind_from_string(const std::string &s);
AttackKind attack_kind_from_string(const std::string &s);

} // namespace eam
