#include "eam/report.hpp"

#include "eam/error.hpp"

#include <algorithm>
#include <bit>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

namespace eam {

namespace {

const char *component_key(std::size_t c) { return to_string(static_cast<Component>(c)); }

std::string join_numbers(const std::vector<double> &xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += fmt::format("{}{}", i ? ";" : "", xs[i]);
  return out;
}

void open_and_write(const std::filesystem::path &path, const std::function<void(std::ostream &)> &write) {
  // write to a sibling and rename so readers never see a partial file
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw io_error(fmt::format("cannot write '{}'", path.string()));
    write(out);
    if (!out) throw io_error(fmt::format("write failed for '{}'", path.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw io_error(fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
}

} // namespace

std::vector<std::pair<std::string, double>> metric_values(const MetricsReport &m) {
  std::vector<std::pair<std::string, double>> v;
  v.emplace_back("hours", m.hours);
  v.emplace_back("completions", static_cast<double>(m.completions));
  v.emplace_back("app_exec_rate_per_h", m.app_exec_rate);
  v.emplace_back("attack_window_rate_per_h", m.attack_window_rate);
  v.emplace_back("mean_schedulability", m.mean_schedulability);
  for (const auto &s : m.schedulability) {
    v.emplace_back("schedulability_" + s.task, s.fraction);
    v.emplace_back("releases_" + s.task, static_cast<double>(s.releases));
  }
  for (std::size_t c = 0; c < kComponentCount; ++c)
    v.emplace_back(fmt::format("availability_{}", component_key(c)), m.availability[c]);
  for (std::size_t c = 0; c < kComponentCount; ++c)
    v.emplace_back(fmt::format("availability_latency_{}_s", component_key(c)), m.availability_latency[c]);
  v.emplace_back("overhead_energy_j", m.overhead_energy);
  v.emplace_back("invocations", static_cast<double>(m.invocations));
  v.emplace_back("aborts", static_cast<double>(m.aborts));
  v.emplace_back("wasted_energy_j", m.wasted_energy);
  return v;
}

void write_metrics_csv(const MetricsReport &m, std::ostream &out) {
  out << "key,value\n";
  out << "policy," << m.policy << '\n';
  out << "app," << m.app << '\n';
  for (const auto &[k, x] : metric_values(m)) out << fmt::format("{},{}\n", k, x);
}

void write_timeline_csv(const EventLog &log, std::ostream &out) {
  const std::size_t buffers = log.slots_at_or_above_on.size();
  out << "time_s,profile,attack,mcu_on,running,power_w";
  for (std::size_t b = 0; b < buffers; ++b) out << fmt::format(",v{}_v", b);
  for (std::size_t b = 0; b < buffers; ++b) out << fmt::format(",share{}_w", b);
  out << '\n';
  for (const auto &s : log.timeline) {
    const std::string running = s.running >= 0 ? log.task_ids[s.running] : "";
    out << fmt::format("{},{},{},{},{},{}", s.time, to_string(s.profile), s.attack ? 1 : 0, s.mcu_on ? 1 : 0, running,
                       s.power);
    for (double v : s.voltages) out << fmt::format(",{}", v);
    for (std::size_t b = 0; b < buffers; ++b) out << fmt::format(",{}", b < s.shares.size() ? s.shares[b] : 0.0);
    out << '\n';
  }
}

void write_events_log(const EventLog &log, std::ostream &out) {
  const auto task_name = [&](int i) { return i >= 0 ? log.task_ids[i] : std::string("-"); };
  std::size_t d = 0;
  const auto flush_decisions = [&](std::int64_t upto) {
    for (; d < log.decisions.size() && log.decisions[d].slot <= upto; ++d) {
      const auto &r = log.decisions[d];
      std::string states;
      for (std::size_t i = 0; i < r.states.size(); ++i)
        states += fmt::format("{}{}={}", i ? ";" : "", log.task_ids[i], to_string(r.states[i]));
      out << fmt::format("{} {} decision profile={} attack={} remaining={} running={} started={} states={} shares={} "
                         "split={} energies={}\n",
                         r.slot, r.time, to_string(r.profile), r.attack ? 1 : 0, r.remaining, task_name(r.running),
                         task_name(r.started), states, join_numbers(r.shares), join_numbers(r.split),
                         join_numbers(r.energies));
    }
  };
  for (const auto &e : log.events) {
    flush_decisions(e.slot - 1);
    out << fmt::format("{} {} {} task={} buffer={} value={} value2={} profile={}\n", e.slot, e.time, to_string(e.kind),
                       task_name(e.task), e.buffer, e.value, e.value2, to_string(e.profile));
  }
  flush_decisions(std::numeric_limits<std::int64_t>::max());
  const auto &l = log.ledger;
  out << fmt::format("# ledger harvested={} drained={} withdrawn={} overhead={} spilled={} wasted={} max_residual={}\n",
                     l.harvested, l.drained, l.withdrawn, l.overhead, l.spilled, l.wasted, l.max_residual);
}

std::string summary_text(const MetricsReport &m) {
  std::string s = fmt::format("policy {}  app {}  {:.3f} h\n", m.policy, m.app, m.hours);
  s += fmt::format("  completions        {}\n", m.completions);
  s += fmt::format("  app_exec_rate      {:.3f} /h\n", m.app_exec_rate);
  s += fmt::format("  attack_window_rate {:.3f} /h\n", m.attack_window_rate);
  s += fmt::format("  schedulability     {:.4f} (mean)\n", m.mean_schedulability);
  for (const auto &t : m.schedulability)
    s += fmt::format("    {:<6} {:.4f} ({}/{})\n", t.task, t.fraction, t.scheduled, t.releases);
  for (std::size_t c = 0; c < kComponentCount; ++c)
    s += fmt::format("  availability {:<10} {:.4f}  latency {:.3f} s\n", component_key(c), m.availability[c],
                     m.availability_latency[c]);
  s += fmt::format("  overhead           {:.6g} J over {} invocations\n", m.overhead_energy, m.invocations);
  s += fmt::format("  aborts             {} ({:.6g} J wasted)\n", m.aborts, m.wasted_energy);
  return s;
}

void write_run_outputs(const SimResult &result, const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  open_and_write(dir / "metrics.csv", [&](std::ostream &o) { write_metrics_csv(result.metrics, o); });
  open_and_write(dir / "timeline.csv", [&](std::ostream &o) { write_timeline_csv(result.log, o); });
  open_and_write(dir / "events.log", [&](std::ostream &o) { write_events_log(result.log, o); });
}

double draw_attack_start(std::uint64_t seed, double duration, double t0, double t1) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(duration)),
                    static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(duration) >> 32)};
  std::mt19937_64 rng(seq);
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double span = t1 - t0;
  const double lo = t0 + 0.1 * span;
  const double hi = std::max(lo, t0 + 0.9 * span - duration);
  return lo + u * (hi - lo);
}

SimConfig compare_cell(const SimConfig &base, PolicyKind policy, double duration, double start, bool equal_budget) {
  SimConfig c = base;
  c.policy = policy;
  AttackScenario a;
  a.start = start;
  a.duration = duration;
  a.kind = duration > base.params.alpha ? AttackKind::Long : AttackKind::Short;
  a.id = "sweep";
  c.attacks = {a};
  if (equal_budget) c.start_time = start;
  return c;
}

std::vector<CompareRow> run_compare(const SimConfig &base, const CompareOptions &options) {
  if (options.policies.empty()) throw invalid_argument("compare needs at least one policy");
  if (options.durations.empty()) throw invalid_argument("compare needs at least one attack duration");
  for (double d : options.durations) {
    if (!(d > 0.0)) throw invalid_argument(fmt::format("attack duration {} must be > 0", d));
  }
  std::vector<CompareRow> rows;
  for (double d : options.durations) {
    const double start =
        options.attack_start ? *options.attack_start : draw_attack_start(base.seed, d, base.start_time, base.horizon);
    for (auto p : options.policies) {
      CompareRow row;
      row.policy = p;
      row.duration = d;
      row.attack_start = start;
      row.metrics = run(compare_cell(base, p, d, start, options.equal_budget)).metrics;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_compare_csv(const std::vector<CompareRow> &rows, std::ostream &out) {
  if (rows.empty()) return;
  out << "policy,duration_s,attack_start_s";
  for (const auto &[k, _] : metric_values(rows.front().metrics)) out << ',' << k;
  out << '\n';
  for (const auto &r : rows) {
    out << fmt::format("{},{},{}", to_string(r.policy), r.duration, r.attack_start);
    for (const auto &[_, x] : metric_values(r.metrics)) out << fmt::format(",{}", x);
    out << '\n';
  }
}

} // namespace eam
