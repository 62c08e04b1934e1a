#include "eam/app.hpp"

#include "eam/error.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <functional>

namespace eam {

const char *to_string(Profile p) noexcept {
  switch (p) {
  case Profile::SA: return "SA";
  case Profile::LA: return "LA";
  case Profile::NML: return "NML";
  case Profile::LP: return "LP";
  case Profile::CTL: return "CTL";
  }
  return "?";
}

Profile profile_from_string(const std::string &s) {
  for (auto p : kAllProfiles) {
    if (s == to_string(p)) return p;
  }
  throw invalid_argument(fmt::format("unknown profile '{}'", s));
}

std::optional<std::size_t> AppSpec::index_of(const std::string &id) const noexcept {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t AppSpec::sink_index() const {
  auto idx = index_of(sink_task);
  if (!idx) throw invalid_argument(fmt::format("sink task '{}' not found", sink_task));
  return *idx;
}

TaskGraph::TaskGraph(const AppSpec &spec)
    : predecessors(spec.tasks.size()), successors(spec.tasks.size()), is_source(spec.tasks.size(), false) {
  for (std::size_t i = 0; i < spec.tasks.size(); ++i) {
    for (const auto &pred : spec.tasks[i].predecessors) {
      auto p = spec.index_of(pred);
      if (!p) throw invalid_argument(fmt::format("task '{}' depends on unknown '{}'", spec.tasks[i].id, pred));
      predecessors[i].push_back(*p);
      successors[*p].push_back(i);
    }
    is_source[i] = predecessors[i].empty();
  }
  sink = spec.sink_index();
}

std::vector<Violation> validate(const AppSpec &spec, std::size_t buffer_count) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string rule) { out.push_back({std::move(field), std::move(rule)}); };

  if (spec.tasks.empty()) add("tasks", "application needs at least one task");
  if (spec.tasks.size() > kMaxTasks) add("tasks", fmt::format("at most {} tasks supported", kMaxTasks));

  for (std::size_t i = 0; i < spec.tasks.size(); ++i) {
    const auto &t = spec.tasks[i];
    const auto where = fmt::format("tasks[{}]({})", i, t.id);
    if (t.id.empty()) add(where + ".id", "id must be non-empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.tasks[j].id == t.id) add(where + ".id", "duplicate task id");
    }
    if (!(t.energy_cost > 0.0)) add(where + ".energy_cost", "must be > 0");
    if (!(t.duration > 0.0)) add(where + ".duration", "must be > 0");
    if (t.buffer >= buffer_count)
      add(where + ".buffer", fmt::format("buffer index {} must be < {}", t.buffer, buffer_count));
    for (auto p : kAllProfiles) {
      if (!(t.rate(p) >= 0.0)) add(where + ".rates." + to_string(p), "must be >= 0");
    }
    for (const auto &pred : t.predecessors) {
      if (!spec.index_of(pred)) add(where + ".predecessors", fmt::format("unknown task '{}'", pred));
      if (pred == t.id) add(where + ".predecessors", "task depends on itself");
    }
  }
  if (!out.empty()) return out;

  if (!spec.index_of(spec.sink_task)) {
    add("sink_task", fmt::format("unknown task '{}'", spec.sink_task));
    return out;
  }

  TaskGraph graph(spec);
  const auto n = spec.tasks.size();

  // cycle detection: colour 0 = new, 1 = on stack, 2 = done
  std::vector<int> colour(n, 0);
  bool cyclic = false;
  std::function<void(std::size_t)> dfs = [&](std::size_t u) {
    colour[u] = 1;
    for (auto v : graph.successors[u]) {
      if (colour[v] == 1) cyclic = true;
      else if (colour[v] == 0) dfs(v);
    }
    colour[u] = 2;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (colour[i] == 0) dfs(i);
  }
  if (cyclic) {
    add("predecessors", "dependency graph contains a cycle");
    return out;
  }

  for (std::size_t s = 0; s < n; ++s) {
    if (!graph.is_source[s]) continue;
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      if (seen[u]) continue;
      seen[u] = true;
      for (auto v : graph.successors[u]) stack.push_back(v);
    }
    if (!seen[graph.sink])
      add("sink_task", fmt::format("sink '{}' not reachable from source '{}'", spec.sink_task, spec.tasks[s].id));
  }
  return out;
}

void require_valid(const AppSpec &spec, std::size_t buffer_count) {
  auto violations = validate(spec, buffer_count);
  if (!violations.empty()) {
    const auto &v = violations.front();
    throw config_error(fmt::format("app '{}': {}: {}", spec.name, v.field, v.rule));
  }
}

namespace {

// rates in profile order SA, LA, NML, LP, CTL
RateTable rates(double sa, double la, double lp, double ctl, double nml) { return {sa, la, nml, lp, ctl}; }

TaskSpec sensing(std::string id, RateTable r) {
  return {std::move(id), kSensingCost.energy, kSensingCost.duration, 0, r, {}, JoinKind::Any, Component::Sensing};
}

TaskSpec decision(RateTable r, std::vector<std::string> preds) {
  return {"D", kDecisionCost.energy, kDecisionCost.duration, 0, r, std::move(preds), JoinKind::Any, Component::Mcu};
}

TaskSpec control(std::string id, RateTable r) {
  return {std::move(id), kControlCost.energy, kControlCost.duration, 1, r, {"D"}, JoinKind::Any, Component::Actuation};
}

} // namespace

AppSpec builtin_app(BuiltinApp which) {
  switch (which) {
  case BuiltinApp::Hvac: {
    const auto r = rates(8, 4, 12, 4, 30);
    return {"hvac", {sensing("TS", r), sensing("HS", r), decision(r, {"HS", "TS"}), control("AC", r)}, "AC"};
  }
  case BuiltinApp::Greenhouse: {
    const auto r = rates(4, 2, 6, 2, 12);
    return {"greenhouse", {sensing("HS", r), decision(r, {"HS"}), control("SC", r)}, "SC"};
  }
  case BuiltinApp::Ventilation: {
    const auto r = rates(20, 6, 15, 6, 45);
    return {"ventilation", {sensing("TS", r), sensing("CS", r), decision(r, {"TS", "CS"}), control("WC", r)}, "WC"};
  }
  }
  throw invalid_argument("unknown built-in application");
}

BuiltinApp builtin_app_from_string(const std::string &s) {
  if (s == "hvac") return BuiltinApp::Hvac;
  if (s == "greenhouse") return BuiltinApp::Greenhouse;
  if (s == "ventilation") return BuiltinApp::Ventilation;
  throw invalid_argument(fmt::format("unknown built-in app '{}'", s));
}

const char *to_string(BuiltinApp which) noexcept {
  switch (which) {
  case BuiltinApp::Hvac: return "hvac";
  case BuiltinApp::Greenhouse: return "greenhouse";
  case BuiltinApp::Ventilation: return "ventilation";
  }
  return "?";
}

double rate_for(const AppSpec &spec, const std::string &task, Profile profile) {
  auto idx = spec.index_of(task);
  if (!idx) throw invalid_argument(fmt::format("unknown task '{}'", task));
  return spec.tasks[*idx].rate(profile);
}

double period_for(const AppSpec &spec, const std::string &task, Profile profile) {
  const double r = rate_for(spec, task, profile);
  if (!(r > 0.0)) throw out_of_range(fmt::format("task '{}' is disabled in profile {}", task, to_string(profile)));
  return 3600.0 / r;
}

DataQueue::DataQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw invalid_argument("queue capacity must be >= 1");
}

bool DataQueue::push(const Token &token) {
  bool dropped = false;
  if (tokens_.size() == capacity_) {
    tokens_.pop_front();
    dropped = true;
  }
  tokens_.push_back(token);
  return dropped;
}

Token DataQueue::pop() {
  if (tokens_.empty()) throw invalid_argument("pop from empty queue");
  Token t = tokens_.front();
  tokens_.pop_front();
  return t;
}

QueueSet::QueueSet(const TaskGraph &graph, std::size_t capacity)
    : successors_(graph.successors), inputs_(graph.predecessors.size()) {
  for (std::size_t i = 0; i < graph.predecessors.size(); ++i) {
    for (auto p : graph.predecessors[i]) inputs_[i].emplace_back(p, DataQueue(capacity));
  }
}

bool QueueSet::has_input(std::size_t task, JoinKind join) const {
  const auto &in = inputs_[task];
  if (in.empty()) return false;
  if (join == JoinKind::All)
    return std::all_of(in.begin(), in.end(), [](const auto &e) { return !e.second.empty(); });
  return std::any_of(in.begin(), in.end(), [](const auto &e) { return !e.second.empty(); });
}

Lineage QueueSet::peek_lineage(std::size_t task) const {
  Lineage l = 0;
  for (const auto &[pred, q] : inputs_[task]) {
    if (!q.empty()) l |= q.front().lineage;
  }
  return l;
}

Lineage QueueSet::consume(std::size_t task) {
  Lineage l = 0;
  for (auto &[pred, q] : inputs_[task]) {
    if (!q.empty()) l |= q.pop().lineage;
  }
  return l;
}

std::size_t QueueSet::emit(std::size_t task, const Token &token) {
  std::size_t drops = 0;
  for (auto succ : successors_[task]) {
    for (auto &[pred, q] : inputs_[succ]) {
      if (pred == task && q.push(token)) ++drops;
    }
  }
  dropped_ += drops;
  return drops;
}

const DataQueue &QueueSet::edge(std::size_t from, std::size_t to) const {
  for (const auto &[pred, q] : inputs_.at(to)) {
    if (pred == from) return q;
  }
  throw invalid_argument(fmt::format("no edge {} -> {}", from, to));
}

std::size_t QueueSet::total_tokens() const noexcept {
  std::size_t n = 0;
  for (const auto &in : inputs_) {
    for (const auto &e : in) n += e.second.size();
  }
  return n;
}

bool operator==(const QueueSet &a, const QueueSet &b) {
  if (a.inputs_.size() != b.inputs_.size()) return false;
  for (std::size_t i = 0; i < a.inputs_.size(); ++i) {
    const auto &x = a.inputs_[i];
    const auto &y = b.inputs_[i];
    if (x.size() != y.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j].first != y[j].first || x[j].second.size() != y[j].second.size()) return false;
      const auto &tx = x[j].second.tokens();
      const auto &ty = y[j].second.tokens();
      for (std::size_t k = 0; k < tx.size(); ++k) {
        if (tx[k].payload_id != ty[k].payload_id || tx[k].birth_time != ty[k].birth_time ||
            tx[k].lineage != ty[k].lineage)
          return false;
      }
    }
  }
  return true;
}

} // namespace eam
