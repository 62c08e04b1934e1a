#pragma once

#include "eam/sim.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace eam {

/// Numeric metrics as flat (key, value) pairs in metrics.csv order.
std::vector<std::pair<std::string, double>> metric_values(const MetricsReport &m);

void write_metrics_csv(const MetricsReport &m, std::ostream &out);
void write_timeline_csv(const EventLog &log, std::ostream &out);
void write_events_log(const EventLog &log, std::ostream &out);
std::string summary_text(const MetricsReport &m);

/// metrics.csv, timeline.csv and events.log under `dir` (created when missing).
void write_run_outputs(const SimResult &result, const std::filesystem::path &dir);

struct CompareOptions {
  std::vector<PolicyKind> policies;
  std::vector<double> durations; // s
  bool equal_budget = false;
  std::optional<double> attack_start; // s; drawn per duration when unset
};

struct CompareRow {
  PolicyKind policy = PolicyKind::Eam;
  double duration = 0.0;
  double attack_start = 0.0;
  MetricsReport metrics;
};

/// Seeded uniform start over the middle 80% of [t0, t1], shared by every policy for a duration.
double draw_attack_start(std::uint64_t seed, double duration, double t0, double t1);

/// Config for one (policy, duration) cell: the base attacks are replaced by a single window.
/// With equal_budget the run begins at attack onset from the configured initial voltages.
SimConfig compare_cell(const SimConfig &base, PolicyKind policy, double duration, double start, bool equal_budget);

std::vector<CompareRow> run_compare(const SimConfig &base, const CompareOptions &options);
void write_compare_csv(const std::vector<CompareRow> &rows, std::ostream &out);

} // namespace eam
