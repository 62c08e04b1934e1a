#pragma once

#include "eam/energy.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace eam {

enum class Profile : int { SA = 0, LA = 1, NML = 2, LP = 3, CTL = 4 };
inline constexpr std::size_t kProfileCount = 5;
inline constexpr std::array<Profile, kProfileCount> kAllProfiles{Profile::SA, Profile::LA, Profile::NML, Profile::LP,
                                                                 Profile::CTL};
const char *to_string(Profile p) noexcept;
Profile profile_from_string(const std::string &s);

/// How a task with several predecessors decides it has input.
enum class JoinKind { Any, All };

/// Executions per hour for each profile; 0 disables the task in that profile.
using RateTable = std::array<double, kProfileCount>;

struct TaskSpec {
  std::string id;
  double energy_cost = 0.0; // J
  double duration = 0.0;    // s
  std::size_t buffer = 0;
  RateTable rates{};
  std::vector<std::string> predecessors; // finish-to-start
  JoinKind join = JoinKind::Any;
  Component component = Component::Mcu;

  double rate(Profile p) const noexcept { return rates[static_cast<int>(p)]; }
};

/// Application specification. Task order is execution order.
struct AppSpec {
  std::string name;
  std::vector<TaskSpec> tasks;
  std::string sink_task;

  std::optional<std::size_t> index_of(const std::string &id) const noexcept;
  std::size_t sink_index() const;
};

/// Index-resolved view of an AppSpec's dependency graph. Build only from a validated spec.
struct TaskGraph {
  std::vector<std::vector<std::size_t>> predecessors;
  std::vector<std::vector<std::size_t>> successors;
  std::vector<bool> is_source;
  std::size_t sink = 0;

  explicit TaskGraph(const AppSpec &spec);
};

struct Violation {
  std::string field;
  std::string rule;
};

/// Empty iff every structural invariant holds for a bank of `buffer_count` buffers.
std::vector<Violation> validate(const AppSpec &spec, std::size_t buffer_count);

/// Throws Config with the first violation.
void require_valid(const AppSpec &spec, std::size_t buffer_count);

enum class BuiltinApp { Hvac, Greenhouse, Ventilation };
AppSpec builtin_app(BuiltinApp which);
BuiltinApp builtin_app_from_string(const std::string &s);
const char *to_string(BuiltinApp which) noexcept;

/// Task cost classes, measured per execution.
struct TaskCost {
  double energy;   // J
  double duration; // s
};
inline constexpr TaskCost kSensingCost{19.066e-6, 12.030e-3};
inline constexpr TaskCost kDecisionCost{15.731e-6, 10.182e-3};
inline constexpr TaskCost kControlCost{92.931e-6, 60.150e-3};

double rate_for(const AppSpec &spec, const std::string &task, Profile profile);
/// 3600 / rate. Throws OutOfRange when the task is disabled in the profile.
double period_for(const AppSpec &spec, const std::string &task, Profile profile);

/// Bitmask of source-task indices a data item descends from.
using Lineage = std::uint64_t;
inline constexpr std::size_t kMaxTasks = 64;

struct Token {
  std::uint64_t payload_id = 0;
  double birth_time = 0.0;
  Lineage lineage = 0;
};

/// Bounded FIFO on one dependency edge. Full queues drop their oldest token.
/// Contents are non-volatile: power failures never touch them.
class DataQueue {
public:
  explicit DataQueue(std::size_t capacity = 4);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const Token &front() const { return tokens_.front(); }
  const std::deque<Token> &tokens() const noexcept { return tokens_; }

  /// Returns true when a token had to be dropped.
  bool push(const Token &token);
  Token pop();

private:
  std::size_t capacity_;
  std::deque<Token> tokens_;
};

/// All edge queues of one application instance.
class QueueSet {
public:
  QueueSet(const TaskGraph &graph, std::size_t capacity);

  bool has_input(std::size_t task, JoinKind join) const;
  /// Union of lineages at the heads of the queues `consume` would pop.
  Lineage peek_lineage(std::size_t task) const;
  /// Pops the head of every non-empty input queue of `task`; returns the merged lineage.
  Lineage consume(std::size_t task);
  /// Pushes a copy of the token onto every outgoing edge of `task`. Returns the number of drops.
  std::size_t emit(std::size_t task, const Token &token);

  const DataQueue &edge(std::size_t from, std::size_t to) const;
  std::size_t total_tokens() const noexcept;
  std::uint64_t dropped() const noexcept { return dropped_; }

  friend bool operator==(const QueueSet &a, const QueueSet &b);

private:
  std::vector<std::vector<std::size_t>> successors_;
  // inputs_[task] holds (predecessor, queue) pairs in predecessor order
  std::vector<std::vector<std::pair<std::size_t, DataQueue>>> inputs_;
  std::uint64_t dropped_ = 0;
};

} // namespace eam
