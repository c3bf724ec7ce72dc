#ifndef MAXW_JPS_HPP
#define MAXW_JPS_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "model.hpp"

namespace maxw {

enum class TaskKind : std::uint8_t { work, rest };

//! A task with a fixed window [release, deadline) and a fixed duration.
struct WindowedTask {
  TaskKind kind{TaskKind::work};
  int id{0}; // flat task index (work) or flat subinterval index (rest)
  int release{0};
  int deadline{0};
  int duration{0};
};

struct Overload {
  int lo{0};
  int hi{0};
  int excess{0};
};

/// Horn's condition: every interval [a,b) spanned by a release and a deadline
/// contains at most b - a units of work. Returns the most overloaded interval
/// (ties: smallest a, then smallest b) or nothing when feasible.
inline std::optional<Overload> check_horn(std::span<const WindowedTask> tasks) {
  std::optional<Overload> worst;
  auto consider = [&](int a, int b, int excess) {
    if (excess > 0 && (!worst || excess > worst->excess))
      worst = Overload{a, b, excess};
  };
  for (const auto &t : tasks)
    if (t.duration > 0 && t.deadline - t.release < t.duration)
      consider(t.release, t.deadline, t.duration - (t.deadline - t.release));
  if (worst)
    return worst;

  std::vector<const WindowedTask *> by_deadline;
  std::vector<int> releases;
  for (const auto &t : tasks) {
    if (t.duration <= 0)
      continue;
    by_deadline.push_back(&t);
    releases.push_back(t.release);
  }
  std::sort(by_deadline.begin(), by_deadline.end(),
            [](auto *x, auto *y) { return x->deadline < y->deadline; });
  std::sort(releases.begin(), releases.end());
  releases.erase(std::unique(releases.begin(), releases.end()), releases.end());

  for (int a : releases) {
    int energy = 0;
    for (std::size_t i = 0; i < by_deadline.size(); ++i) {
      if (by_deadline[i]->release >= a)
        energy += by_deadline[i]->duration;
      int b = by_deadline[i]->deadline;
      bool last_of_b = i + 1 == by_deadline.size() || by_deadline[i + 1]->deadline != b;
      if (last_of_b && a < b)
        consider(a, b, energy - (b - a));
    }
  }
  return worst;
}

enum class CellKind : std::uint8_t { idle, work, rest };

struct Cell {
  CellKind kind{CellKind::idle};
  int id{-1};

  static Cell idle() { return {}; }
  static Cell work(int task) { return {CellKind::work, task}; }
  static Cell rest(int q) { return {CellKind::rest, q}; }
  friend bool operator==(const Cell &, const Cell &) = default;
};

//! Explicit per-operator, per-shift assignment.
struct ShiftSchedule {
  int horizon{0};
  std::vector<std::vector<Cell>> cells; // [operator][shift]

  ShiftSchedule() = default;
  ShiftSchedule(int num_operators, int horizon_)
      : horizon(horizon_), cells(num_operators, std::vector<Cell>(horizon_)) {}

  int num_operators() const { return static_cast<int>(cells.size()); }

  //! Last worked shift + 1, 0 when nothing is worked.
  int makespan() const {
    int m = 0;
    for (const auto &row : cells)
      for (int t = static_cast<int>(row.size()) - 1; t >= 0; --t)
        if (row[t].kind == CellKind::work) {
          m = std::max(m, t + 1);
          break;
        }
    return m;
  }

  int worked(int op, int lo, int hi) const {
    int n = 0;
    const auto &row = cells.at(op);
    for (int t = std::max(0, lo); t < std::min<int>(hi, row.size()); ++t)
      n += row[t].kind == CellKind::work;
    return n;
  }

  friend bool operator==(const ShiftSchedule &, const ShiftSchedule &) = default;
};

struct JpsFailure {
  int shift{0};  // first shift at which a deadline was passed
  int task{0};   // position in the input list
};

struct JpsResult {
  std::vector<Cell> cells;
  std::optional<JpsFailure> failure;

  explicit operator bool() const { return !failure; }
};

/// Earliest-deadline-first preemptive schedule on one operator over
/// [0, horizon). Ties: smaller deadline, work before rest, smaller id.
inline JpsResult build_jps(std::span<const WindowedTask> tasks, int horizon) {
  JpsResult res;
  res.cells.assign(std::max(0, horizon), Cell{});
  std::vector<int> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return tasks[x].release < tasks[y].release; });

  using Key = std::tuple<int, int, int, int>; // deadline, kind, id, position
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  std::vector<int> left(tasks.size());
  std::size_t next = 0;
  int unfinished = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    left[i] = std::max(0, tasks[i].duration);
    unfinished += left[i] > 0;
  }

  for (int t = 0; unfinished > 0; ++t) {
    while (next < order.size() && tasks[order[next]].release <= t) {
      int i = order[next++];
      if (left[i] > 0)
        ready.emplace(tasks[i].deadline, static_cast<int>(tasks[i].kind), tasks[i].id, i);
    }
    if (ready.empty()) {
      if (next == order.size())
        break;
      t = std::max(t, tasks[order[next]].release) - 1;
      continue;
    }
    auto [deadline, kind, id, i] = ready.top();
    if (deadline <= t || t >= horizon) {
      res.failure = JpsFailure{t, i};
      return res;
    }
    res.cells[t] = tasks[i].kind == TaskKind::work ? Cell::work(id) : Cell::rest(id);
    if (--left[i] == 0) {
      ready.pop();
      --unfinished;
    }
  }
  return res;
}

//! Fixed values for every model variable of one active set.
struct WindowSolution {
  std::vector<int> start; // per flat task
  std::vector<int> end;
  std::vector<int> rest;  // per plan subinterval
  int cmax{0};

  friend bool operator==(const WindowSolution &, const WindowSolution &) = default;
};

class ReconstructionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

inline std::vector<WindowedTask> operator_tasks(const WindowSolution &sol, const SubintervalPlan &plan,
                                                const Instance &inst, int op) {
  std::vector<WindowedTask> tasks;
  for (int i : inst.op_tasks[op])
    tasks.push_back({TaskKind::work, i, sol.start[i], sol.end[i], inst.tasks[i].duration});
  for (int q : plan.by_operator[op]) {
    const auto &s = plan.subintervals[q];
    tasks.push_back({TaskKind::rest, q, s.lo, s.hi, sol.rest[q]});
  }
  return tasks;
}

/// Turns a window solution into an explicit shift schedule, one EDF run per
/// operator over its work tasks and rest tasks.
inline ShiftSchedule reconstruct(const WindowSolution &sol, const SubintervalPlan &plan,
                                 const Instance &inst) {
  int horizon = sol.cmax;
  for (const auto &q : plan.subintervals)
    horizon = std::max(horizon, q.hi);
  for (int e : sol.end)
    horizon = std::max(horizon, e);
  ShiftSchedule sched(inst.num_operators, horizon);
  for (int k = 0; k < inst.num_operators; ++k) {
    auto tasks = operator_tasks(sol, plan, inst, k);
    auto res = build_jps(tasks, horizon);
    if (!res) {
      std::ostringstream os;
      os << "JPS failed on operator " << k << " at shift " << res.failure->shift
         << " (cmax=" << sol.cmax << "); tasks:";
      for (const auto &t : tasks)
        os << " " << (t.kind == TaskKind::work ? "w" : "r") << t.id << "[" << t.release << ","
           << t.deadline << ")x" << t.duration;
      throw ReconstructionError(os.str());
    }
    sched.cells[k] = std::move(res.cells);
  }
  return sched;
}

} // namespace maxw

#endif
