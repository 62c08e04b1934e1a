#include "eam/trace.hpp"

#include "eam/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <sstream>

namespace eam {

namespace {

bool parse_double(std::string_view token, double &out) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) token.remove_suffix(1);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

// Comma-delimited when a comma is present, otherwise whitespace-delimited.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  if (line.find(',') != std::string_view::npos) {
    std::size_t pos = 0;
    while (true) {
      auto next = line.find(',', pos);
      fields.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return fields;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

} // namespace

EnergyTrace::EnergyTrace(std::vector<TraceSample> samples, double load_resistance, std::string name)
    : samples_(std::move(samples)), load_resistance_(load_resistance), name_(std::move(name)) {
  if (samples_.empty()) throw invalid_argument("trace has no samples");
  if (!(load_resistance_ > 0.0) || !std::isfinite(load_resistance_))
    throw invalid_argument("load resistance must be positive");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].time) || !std::isfinite(samples_[i].voltage))
      throw invalid_argument(fmt::format("sample {} is not finite", i));
    if (samples_[i].voltage < 0.0)
      throw invalid_argument(fmt::format("negative voltage {} at t={}", samples_[i].voltage, samples_[i].time));
    if (i > 0 && !(samples_[i].time > samples_[i - 1].time))
      throw invalid_argument(fmt::format("sample times not strictly increasing at index {} (t={})", i,
                                         samples_[i].time));
  }
}

std::size_t EnergyTrace::index_at(double t) const {
  if (!covers(t)) throw out_of_range(fmt::format("t={} outside trace span [{}, {}]", t, start_time(), end_time()));
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double value, const TraceSample &s) { return value < s.time; });
  return static_cast<std::size_t>(std::distance(samples_.begin(), it)) - 1;
}

double EnergyTrace::voltage_at(double t) const { return samples_[index_at(t)].voltage; }

void validate_scenarios(const std::vector<AttackScenario> &scenarios) {
  for (const auto &s : scenarios) {
    if (!(s.duration > 0.0)) throw invalid_argument(fmt::format("attack '{}': duration must be > 0", s.id));
    if (!(s.start >= 0.0)) throw invalid_argument(fmt::format("attack '{}': start must be >= 0", s.id));
  }
  std::vector<const AttackScenario *> sorted;
  for (const auto &s : scenarios) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](auto *a, auto *b) { return a->start < b->start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->start < sorted[i - 1]->end())
      throw invalid_argument(fmt::format("attacks '{}' and '{}' overlap", sorted[i - 1]->id, sorted[i]->id));
  }
}

EnergyTrace parse_trace(const std::string &text, double load_resistance, std::string name) {
  std::vector<TraceSample> samples;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (view[first] == '#') continue;
    auto fields = split_fields(view);
    double t = 0.0, v = 0.0;
    bool ok = fields.size() >= 2 && parse_double(fields[0], t) && parse_double(fields[1], v);
    if (!ok) {
      if (!seen_data && samples.empty()) {
        // one header line is tolerated
        seen_data = true;
        continue;
      }
      throw parse_error(fmt::format("{}: line {}: expected 'time,voltage'", name, line_no));
    }
    seen_data = true;
    if (fields.size() > 2) throw parse_error(fmt::format("{}: line {}: too many fields", name, line_no));
    if (v < 0.0) throw invalid_argument(fmt::format("{}: line {}: negative voltage {}", name, line_no, v));
    if (!samples.empty() && !(t > samples.back().time))
      throw invalid_argument(fmt::format("{}: line {}: time {} not strictly increasing", name, line_no, t));
    samples.push_back({t, v});
  }
  if (samples.empty()) throw parse_error(fmt::format("{}: no samples", name));
  return EnergyTrace(std::move(samples), load_resistance, std::move(name));
}

EnergyTrace load_trace(const std::filesystem::path &path, double load_resistance) {
  std::ifstream in(path);
  if (!in) throw io_error(fmt::format("cannot open trace '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error(fmt::format("error reading trace '{}'", path.string()));
  return parse_trace(buf.str(), load_resistance, path.stem().string());
}

void write_trace(const EnergyTrace &trace, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw io_error(fmt::format("cannot write trace '{}'", path.string()));
  out << "# trace " << trace.name() << ", load_resistance_ohm=" << fmt::format("{}", trace.load_resistance())
      << "\n";
  out << "time_s,voltage_v\n";
  for (const auto &s : trace.samples()) out << fmt::format("{},{}\n", s.time, s.voltage);
  if (!out) throw io_error(fmt::format("error writing trace '{}'", path.string()));
}

EnergyTrace synthesize_trace(WaveKind kind, const SynthParams &p) {
  if (!(p.length > 0.0)) throw invalid_argument("synthetic trace length must be > 0");
  if (!(p.interval > 0.0)) throw invalid_argument("synthetic trace interval must be > 0");
  if (!(p.amplitude >= 0.0)) throw invalid_argument("synthetic trace amplitude must be >= 0");
  if (kind == WaveKind::Sinusoid && !(p.period > 0.0)) throw invalid_argument("sinusoid period must be > 0");

  const auto steps = static_cast<std::size_t>(std::ceil(p.length / p.interval - 1e-12));
  std::vector<TraceSample> samples;
  samples.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * p.interval;
    double v = 0.0;
    switch (kind) {
    case WaveKind::Constant: v = p.amplitude; break;
    case WaveKind::Sinusoid: v = p.amplitude * std::abs(std::sin(2.0 * std::numbers::pi * t / p.period)); break;
    case WaveKind::Step: v = t < p.length / 2.0 ? 0.0 : p.amplitude; break;
    }
    samples.push_back({t, v});
  }
  return EnergyTrace(std::move(samples), p.load_resistance, to_string(kind));
}

EnergyTrace inject_attack(const EnergyTrace &trace, const AttackScenario &scenario) {
  if (!(scenario.duration > 0.0)) throw invalid_argument("attack duration must be > 0");
  if (!(scenario.start >= 0.0)) throw invalid_argument("attack start must be >= 0");
  if (scenario.start > trace.end_time() || scenario.end() <= trace.start_time())
    throw out_of_range(fmt::format("attack window [{}, {}) outside trace span [{}, {}]", scenario.start,
                                   scenario.end(), trace.start_time(), trace.end_time()));
  auto samples = trace.samples();
  for (auto &s : samples) {
    if (scenario.contains(s.time)) s.voltage = 0.0;
  }
  return EnergyTrace(std::move(samples), trace.load_resistance(), trace.name());
}

double power_from_voltage(const EnergyTrace &trace, double t) {
  const double v = trace.voltage_at(t);
  return v * v / trace.load_resistance();
}

double TraceCursor::power_at(double t) {
  const auto &s = trace_->samples();
  if (!trace_->covers(t)) throw out_of_range(fmt::format("t={} outside trace span", t));
  if (t < s[index_].time) index_ = trace_->index_at(t);
  while (index_ + 1 < s.size() && s[index_ + 1].time <= t) ++index_;
  const double v = s[index_].voltage;
  return v * v / trace_->load_resistance();
}

const char *to_string(WaveKind kind) noexcept {
  switch (kind) {
  case WaveKind::Constant: return "constant";
  case WaveKind::Sinusoid: return "sinusoid";
  case WaveKind::Step: return "step";
  }
  return "?";
}

const char *to_string(AttackKind kind) noexcept { return kind == AttackKind::Short ? "short" : "long"; }

WaveKind wave_kind_from_string(const std::string &s) {
  if (s == "constant") return WaveKind::Constant;
  if (s == "sinusoid") return WaveKind::Sinusoid;
  if (s == "step") return WaveKind::Step;
  throw invalid_argument(fmt::format("unknown waveform '{}'", s));
}

AttackKind attack_kind_from_string(const std::string &s) {
  if (s == "short") return AttackKind::Short;
  if (s == "long") return AttackKind::Long;
  throw invalid_argument(fmt::format("unknown attack kind '{}'", s));
}

} // namespace eam
