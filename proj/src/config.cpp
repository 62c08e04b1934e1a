#include "eam/config.hpp"

#include "eam/error.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

namespace eam {

using nlohmann::json;

namespace {

/// Reads keys from one JSON object and rejects whatever was not read.
class Section {
public:
  Section(const json &node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw config_error(fmt::format("{}: expected an object", path_));
  }

  bool has(const std::string &key) const { return node_.contains(key); }

  double number(const std::string &key, double fallback) {
    if (!take(key)) return fallback;
    const auto &v = node_.at(key);
    if (!v.is_number()) throw config_error(fmt::format("{}: expected a number", where(key)));
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw config_error(fmt::format("{}: must be finite", where(key)));
    return x;
  }

  std::uint64_t integer(const std::string &key, std::uint64_t fallback) {
    if (!take(key)) return fallback;
    const auto &v = node_.at(key);
    if (!v.is_number_unsigned()) throw config_error(fmt::format("{}: expected a non-negative integer", where(key)));
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string &key, bool fallback) {
    if (!take(key)) return fallback;
    const auto &v = node_.at(key);
    if (!v.is_boolean()) throw config_error(fmt::format("{}: expected true or false", where(key)));
    return v.get<bool>();
  }

  std::string string(const std::string &key, const std::string &fallback) {
    if (!take(key)) return fallback;
    const auto &v = node_.at(key);
    if (!v.is_string()) throw config_error(fmt::format("{}: expected a string", where(key)));
    return v.get<std::string>();
  }

  const json *node(const std::string &key) {
    if (!take(key)) return nullptr;
    return &node_.at(key);
  }

  std::string where(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto &[key, _] : node_.items()) {
      if (!used_.count(key)) throw config_error(fmt::format("{}: unknown key", where(key)));
    }
  }

private:
  bool take(const std::string &key) {
    if (!node_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json &node_;
  std::string path_;
  std::set<std::string> used_;
};

template <class F> auto rethrow_as_config(const std::string &where, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error &e) {
    if (e.code() == ErrorCode::Config || e.code() == ErrorCode::Io) throw;
    throw config_error(fmt::format("{}: {}", where, e.what()));
  }
}

double per_slot_drain(double sigma_per_s, double dt) {
  // continuous-time leakage rate folded into one slot
  return -std::expm1(dt * std::log1p(-sigma_per_s));
}

std::shared_ptr<const EnergyTrace> read_trace(Section s, const std::filesystem::path &base_dir) {
  const double load = s.number("load_ohm", 30000.0);
  std::shared_ptr<const EnergyTrace> trace;
  if (s.has("path")) {
    auto path = std::filesystem::path(s.string("path", ""));
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    trace = rethrow_as_config("trace.path", [&] { return std::make_shared<const EnergyTrace>(load_trace(path, load)); });
  } else if (s.has("wave")) {
    SynthParams p;
    p.load_resistance = load;
    const auto kind = rethrow_as_config("trace.wave", [&] { return wave_kind_from_string(s.string("wave", "")); });
    p.amplitude = s.number("amplitude_v", p.amplitude);
    p.period = s.number("period_s", p.period);
    p.length = s.number("length_s", p.length);
    p.interval = s.number("interval_s", p.interval);
    trace = rethrow_as_config("trace", [&] { return std::make_shared<const EnergyTrace>(synthesize_trace(kind, p)); });
  } else {
    throw config_error("trace: needs either 'path' or 'wave'");
  }
  s.finish();
  return trace;
}

std::vector<AttackScenario> read_attacks(const json &node) {
  if (!node.is_array()) throw config_error("attacks: expected an array");
  std::vector<AttackScenario> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    Section s(node[i], fmt::format("attacks[{}]", i));
    AttackScenario a;
    a.start = s.number("start_s", 0.0);
    a.duration = s.number("duration_s", 0.0);
    a.kind = rethrow_as_config(s.where("kind"), [&] { return attack_kind_from_string(s.string("kind", "short")); });
    a.id = s.string("id", fmt::format("a{}", i));
    s.finish();
    out.push_back(std::move(a));
  }
  rethrow_as_config("attacks", [&] { validate_scenarios(out); });
  return out;
}

Component component_from_string(const std::string &s, const std::string &where) {
  for (auto c : {Component::Mcu, Component::Sensing, Component::Actuation}) {
    if (s == to_string(c)) return c;
  }
  throw config_error(fmt::format("{}: unknown component '{}'", where, s));
}

AppSpec read_app(const json &node) {
  if (node.is_string()) {
    return rethrow_as_config("app", [&] { return builtin_app(builtin_app_from_string(node.get<std::string>())); });
  }
  Section s(node, "app");
  AppSpec app;
  app.name = s.string("name", "custom");
  app.sink_task = s.string("sink", "");
  const json *tasks = s.node("tasks");
  if (!tasks || !tasks->is_array()) throw config_error("app.tasks: expected an array");
  for (std::size_t i = 0; i < tasks->size(); ++i) {
    Section t((*tasks)[i], fmt::format("app.tasks[{}]", i));
    TaskSpec task;
    task.id = t.string("id", "");
    task.energy_cost = t.number("energy_uj", 0.0) * 1e-6;
    task.duration = t.number("duration_ms", 0.0) * 1e-3;
    task.buffer = static_cast<std::size_t>(t.integer("buffer", 0));
    task.component = component_from_string(t.string("component", "mcu"), t.where("component"));
    const auto join = t.string("join", "any");
    if (join == "any") task.join = JoinKind::Any;
    else if (join == "all") task.join = JoinKind::All;
    else throw config_error(fmt::format("{}: expected 'any' or 'all'", t.where("join")));
    if (const json *preds = t.node("predecessors")) {
      if (!preds->is_array()) throw config_error(fmt::format("{}: expected an array", t.where("predecessors")));
      for (const auto &p : *preds) {
        if (!p.is_string()) throw config_error(fmt::format("{}: expected task ids", t.where("predecessors")));
        task.predecessors.push_back(p.get<std::string>());
      }
    }
    const json *rates = t.node("rates_per_h");
    if (!rates) throw config_error(fmt::format("{}: missing", t.where("rates_per_h")));
    Section r(*rates, t.where("rates_per_h"));
    for (auto p : kAllProfiles) task.rates[static_cast<int>(p)] = r.number(to_string(p), 0.0);
    r.finish();
    t.finish();
    app.tasks.push_back(std::move(task));
  }
  if (app.sink_task.empty() && !app.tasks.empty()) app.sink_task = app.tasks.back().id;
  s.finish();
  return app;
}

struct BankRead {
  std::vector<CapacitorParams> caps;
  std::vector<double> v_init;
  std::array<std::size_t, kComponentCount> map{0, 0, 1};
};

BankRead read_bank(const json *node, double dt) {
  BankRead out;
  const auto defaults = default_capacitors(dt);
  if (!node) {
    out.caps = defaults;
    for (const auto &c : out.caps) out.v_init.push_back(c.v_on);
    return out;
  }
  Section s(*node, "bank");
  if (const json *caps = s.node("capacitors")) {
    if (!caps->is_array() || caps->empty()) throw config_error("bank.capacitors: expected a non-empty array");
    for (std::size_t i = 0; i < caps->size(); ++i) {
      Section c((*caps)[i], fmt::format("bank.capacitors[{}]", i));
      CapacitorParams p = i < defaults.size() ? defaults[i] : defaults.front();
      p.capacitance = c.number("c_uf", p.capacitance * 1e6) * 1e-6;
      p.parallel_resistance = c.number("rp_kohm", p.parallel_resistance * 1e-3) * 1e3;
      p.efficiency = c.number("eta", p.efficiency);
      const double sigma = c.number("sigma_per_s", 0.001);
      if (!(sigma >= 0.0 && sigma < 1.0)) throw config_error(fmt::format("{}: must be in [0, 1)", c.where("sigma_per_s")));
      p.drain_fraction = per_slot_drain(sigma, dt);
      p.v_on = c.number("v_on_v", p.v_on);
      p.v_off = c.number("v_off_v", p.v_off);
      p.v_max = c.number("v_max_v", p.v_max);
      out.v_init.push_back(c.number("v_init_v", p.v_on));
      c.finish();
      out.caps.push_back(p);
    }
  } else {
    out.caps = defaults;
    for (const auto &c : out.caps) out.v_init.push_back(c.v_on);
  }
  out.map[0] = static_cast<std::size_t>(s.integer("mcu_buffer", 0));
  out.map[1] = static_cast<std::size_t>(s.integer("sensing_buffer", 0));
  out.map[2] = static_cast<std::size_t>(s.integer("actuation_buffer", out.caps.size() > 1 ? 1 : 0));
  s.finish();
  return out;
}

} // namespace

std::vector<CapacitorParams> default_capacitors(double dt) {
  CapacitorParams light;
  light.capacitance = 33e-6;
  light.drain_fraction = per_slot_drain(0.001, dt);
  CapacitorParams heavy = light;
  heavy.capacitance = 220e-6;
  return {light, heavy};
}

ConfigDocument load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw io_error(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

ConfigDocument parse_config(const std::string &text, std::filesystem::path base_dir) {
  ConfigDocument out;
  out.base_dir = std::move(base_dir);
  try {
    out.doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error &e) {
    throw parse_error(fmt::format("config: {}", e.what()));
  }
  if (!out.doc.is_object()) throw config_error("config: top level must be an object");
  return out;
}

void apply_override(ConfigDocument &config, const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw invalid_argument(fmt::format("override '{}' is not key=value", assignment));
  const auto key = assignment.substr(0, eq);
  const auto text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error &) {
    value = text;
  }
  std::string pointer;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw invalid_argument(fmt::format("override '{}' has an empty key segment", assignment));
    pointer += "/" + part;
  }
  try {
    config.doc[json::json_pointer(pointer)] = value;
  } catch (const json::exception &e) {
    throw invalid_argument(fmt::format("override '{}': {}", assignment, e.what()));
  }
}

SimConfig build_sim_config(const ConfigDocument &config) {
  Section root(config.doc, "");
  SimConfig c;

  static const json empty = json::object();
  const json *sim_node = root.node("sim");
  Section sim(sim_node ? *sim_node : empty, "sim");
  c.dt = sim.number("dt_ms", 1.0) * 1e-3;
  if (!(c.dt > 0.0)) throw config_error("sim.dt_ms: must be > 0");
  c.seed = sim.integer("seed", 1);
  c.queue_capacity = static_cast<std::size_t>(sim.integer("queue_capacity", 4));
  c.timeline_interval = sim.number("timeline_interval_s", 1.0);
  c.log_every_attack_slot = sim.boolean("log_every_attack_slot", false);
  c.attack_window_tail = sim.number("attack_window_tail_s", 0.0);
  c.overrides.pin_nml = sim.boolean("pin_nml", false);
  c.overrides.fh_allocation = sim.boolean("fh_allocation", false);

  const json *trace = root.node("trace");
  if (!trace) throw config_error("trace: missing section");
  c.trace = read_trace(Section(*trace, "trace"), config.base_dir);
  c.start_time = sim.number("start_s", c.trace->start_time());
  c.horizon = sim.number("horizon_s", c.trace->end_time());
  sim.finish();

  if (const json *attacks = root.node("attacks")) c.attacks = read_attacks(*attacks);

  const json *app = root.node("app");
  c.app = read_app(app ? *app : json("hvac"));

  c.policy = rethrow_as_config("policy", [&] { return policy_kind_from_string(root.string("policy", "eam")); });

  auto bank = read_bank(root.node("bank"), c.dt);
  c.capacitors = std::move(bank.caps);
  c.initial_voltages = std::move(bank.v_init);
  c.component_map = bank.map;

  double capacity = 0.0;
  for (const auto &p : c.capacitors) capacity += energy_at_voltage(p.capacitance, p.v_max);

  const json *params_node = root.node("params");
  Section params(params_node ? *params_node : empty, "params");
  auto &pp = c.params;
  pp.alpha = params.number("alpha_s", 60.0);
  pp.omega0 = params.number("omega0_frac", 0.2) * capacity;
  pp.omega1 = params.number("omega1_frac", 0.6) * capacity;
  if (params.has("omega0_uj")) pp.omega0 = params.number("omega0_uj", 0.0) * 1e-6;
  if (params.has("omega1_uj")) pp.omega1 = params.number("omega1_uj", 0.0) * 1e-6;
  pp.lambda_hi = params.number("lambda_hi", pp.lambda_hi);
  pp.lambda_lo = params.number("lambda_lo", pp.lambda_lo);
  pp.decision_cost = params.number("decision_cost_nj", pp.decision_cost * 1e9) * 1e-9;
  pp.decision_time = params.number("decision_time_us", pp.decision_time * 1e6) * 1e-6;
  pp.accuracy_gate = params.boolean("accuracy_gate", pp.accuracy_gate);
  pp.accuracy_threshold = params.number("accuracy_threshold", pp.accuracy_threshold);
  const auto dispatch = params.string("dispatch", "index");
  if (dispatch == "index") pp.dispatch = Dispatch::Index;
  else if (dispatch == "edf") pp.dispatch = Dispatch::Edf;
  else throw config_error("params.dispatch: expected 'index' or 'edf'");
  params.finish();

  const json *det_node = root.node("detector");
  Section det(det_node ? *det_node : empty, "detector");
  c.detector.detection_delay = det.number("delay_s", 0.0);
  c.detector.remaining_time_error = det.number("remaining_error", 0.0);
  c.detector.reported_accuracy = det.number("accuracy", 1.0);
  c.detector.rng_seed = det.integer("seed", c.seed);
  det.finish();

  root.finish();
  validate(c);
  return c;
}

} // namespace eam
