#ifndef MAXW_SOLVER_HPP
#define MAXW_SOLVER_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "jps.hpp"
#include "model.hpp"
#include "propagation.hpp"

namespace maxw {

using Clock = std::chrono::steady_clock;

inline Clock::time_point deadline_after(double seconds) {
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

struct GreedyResult {
  int ub{0};
  ShiftSchedule schedule;   // work cells only
  WindowSolution solution;  // windows read off the schedule, rests for `plan`
};

/// Serial greedy: tasks in (job, pos) order, each unit on the earliest shift
/// where the operator is free and no constraint of the FULL pool would exceed
/// its budget. Throws InstanceError if the schedule grows past the guard.
inline GreedyResult initial_upper_bound(const Instance &inst, const SubintervalPlan &plan) {
  int max_hi = 0, total_rest = 0;
  for (const auto &c : inst.maxw) {
    max_hi = std::max(max_hi, c.hi);
    total_rest += required_rest(c);
  }
  const int guard = inst.total_work() + total_rest + max_hi;

  std::vector<std::vector<int>> op_constraints(inst.num_operators);
  for (std::size_t c = 0; c < inst.maxw.size(); ++c)
    op_constraints[inst.maxw[c].op].push_back(static_cast<int>(c));
  std::vector<int> used(inst.maxw.size(), 0);
  std::vector<std::vector<int>> busy(inst.num_operators); // task id or -1

  auto allowed = [&](int op, int t) {
    if (t < static_cast<int>(busy[op].size()) && busy[op][t] >= 0)
      return false;
    for (int c : op_constraints[op]) {
      const auto &m = inst.maxw[c];
      if (m.lo <= t && t < m.hi && used[c] + 1 > m.delta)
        return false;
    }
    return true;
  };

  GreedyResult res;
  auto &sol = res.solution;
  sol.start.assign(inst.num_tasks(), 0);
  sol.end.assign(inst.num_tasks(), 0);
  for (std::size_t i = 0; i < inst.num_tasks(); ++i) {
    const Task &task = inst.tasks[i];
    int ready = task.pos == 0 ? 0 : sol.end[i - 1];
    sol.start[i] = ready;
    int t = ready;
    for (int u = 0; u < task.duration; ++u) {
      while (!allowed(task.op, t)) {
        if (++t > guard)
          throw InstanceError("greedy schedule exceeded " + std::to_string(guard) +
                              " shifts; instance infeasible as posed");
      }
      auto &row = busy[task.op];
      if (static_cast<int>(row.size()) <= t)
        row.resize(t + 1, -1);
      row[t] = static_cast<int>(i);
      for (int c : op_constraints[task.op]) {
        const auto &m = inst.maxw[c];
        if (m.lo <= t && t < m.hi)
          ++used[c];
      }
      ++t;
    }
    sol.end[i] = t;
    sol.cmax = std::max(sol.cmax, t);
  }
  res.ub = sol.cmax;

  int horizon = sol.cmax;
  for (const auto &q : plan.subintervals)
    horizon = std::max(horizon, q.hi);
  res.schedule = ShiftSchedule(inst.num_operators, horizon);
  for (int k = 0; k < inst.num_operators; ++k)
    for (std::size_t t = 0; t < busy[k].size(); ++t)
      if (busy[k][t] >= 0)
        res.schedule.cells[k][t] = Cell::work(busy[k][t]);
  for (const auto &q : plan.subintervals) {
    int free = q.len() - res.schedule.worked(q.op, q.lo, q.hi);
    sol.rest.push_back(std::min(q.rest_ub, free));
  }
  return res;
}

enum class SolveStatus { optimal, feasible, infeasible, timeout };

inline const char *to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::optimal: return "optimal";
  case SolveStatus::feasible: return "feasible";
  case SolveStatus::infeasible: return "infeasible";
  case SolveStatus::timeout: return "timeout";
  }
  return "?";
}

struct SolveOutcome {
  SolveStatus status{SolveStatus::timeout};
  std::optional<WindowSolution> best;
  SubintervalPlan plan; // the rest layout `best` refers to
  int makespan_iterations{0};
  std::int64_t nodes{0};
  std::chrono::milliseconds elapsed{0};
};

enum class Decision { sat, unsat, timeout };

struct DecisionResult {
  Decision status{Decision::unsat};
  std::optional<WindowSolution> solution;
  std::int64_t nodes{0};
};

namespace detail {

class Search {
public:
  Search(const Model &m, SearchState &s, Clock::time_point deadline)
      : m_(m), s_(s), deadline_(deadline) {}

  Decision run() {
    if (dfs())
      return Decision::sat;
    return timed_out_ ? Decision::timeout : Decision::unsat;
  }
  std::int64_t nodes() const { return nodes_; }
  const WindowSolution &solution() const { return sol_; }

private:
  // smallest domain, then smallest lo, then starts < ends < rests < cmax
  int pick() const {
    int best = -1;
    std::tuple<int, int, int, int> best_key;
    const int n = m_.num_tasks();
    for (int v = 0; v < m_.num_vars(); ++v) {
      const auto &b = s_.bounds(v);
      if (b.fixed())
        continue;
      int rank = v < n ? 0 : v < 2 * n ? 1 : v < m_.cmax() ? 2 : 3;
      std::tuple key{b.size(), b.lo, rank, v};
      if (best < 0 || key < best_key) {
        best = v;
        best_key = key;
      }
    }
    return best;
  }

  void capture() {
    const int n = m_.num_tasks();
    sol_.start.resize(n);
    sol_.end.resize(n);
    sol_.rest.resize(m_.num_rests());
    for (int i = 0; i < n; ++i) {
      sol_.start[i] = s_.lo(m_.start(i));
      sol_.end[i] = s_.lo(m_.end(i));
    }
    for (int q = 0; q < m_.num_rests(); ++q)
      sol_.rest[q] = s_.lo(m_.rest(q));
    sol_.cmax = s_.lo(m_.cmax());
  }

  bool dfs() {
    ++nodes_;
    if (Clock::now() >= deadline_) {
      timed_out_ = true;
      return false;
    }
    if (propagate_all(m_, s_).failed())
      return false;
    int v = pick();
    if (v < 0) {
      capture();
      return true;
    }
    int mid = s_.lo(v) + (s_.hi(v) - s_.lo(v)) / 2;
    s_.push_level();
    s_.set_hi(v, mid);
    if (dfs())
      return true;
    s_.pop_level();
    if (timed_out_)
      return false;
    s_.push_level();
    s_.set_lo(v, mid + 1);
    if (dfs())
      return true;
    s_.pop_level();
    return false;
  }

  const Model &m_;
  SearchState &s_;
  Clock::time_point deadline_;
  std::int64_t nodes_{0};
  bool timed_out_{false};
  WindowSolution sol_;
};

} // namespace detail

/// Depth-first search for a solution with cmax in [cmax_floor, cmax_cap].
inline DecisionResult solve_decision(const Model &m, int cmax_cap, Clock::time_point deadline,
                                     int cmax_floor = 0) {
  SearchState s(m);
  DecisionResult res;
  if (cmax_cap < cmax_floor || !s.set_hi(m.cmax(), cmax_cap) || !s.set_lo(m.cmax(), cmax_floor)) {
    res.status = Decision::unsat;
    return res;
  }
  detail::Search search(m, s, deadline);
  res.status = search.run();
  res.nodes = search.nodes();
  if (res.status == Decision::sat)
    res.solution = search.solution();
  return res;
}

/// Makespan minimization by linear descent from the greedy upper bound.
/// `lower_bound` is a known valid bound on the optimum of this active set.
inline SolveOutcome minimize_makespan(const Instance &inst, std::span<const int> active,
                                      Clock::time_point deadline, int lower_bound = 0) {
  auto t0 = Clock::now();
  SolveOutcome out;
  out.plan = build_plan(inst, active);
  auto greedy = initial_upper_bound(inst, out.plan);
  Model model(inst, out.plan, greedy.ub);
  out.best = greedy.solution;
  out.makespan_iterations = 1;
  out.status = SolveStatus::feasible;
  for (;;) {
    if (out.best->cmax <= lower_bound) {
      out.status = SolveStatus::optimal;
      break;
    }
    auto r = solve_decision(model, out.best->cmax - 1, deadline, lower_bound);
    out.nodes += r.nodes;
    if (r.status == Decision::sat) {
      out.best = std::move(r.solution);
      ++out.makespan_iterations;
    } else {
      if (r.status == Decision::unsat)
        out.status = SolveStatus::optimal;
      break;
    }
  }
  out.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0);
  return out;
}

} // namespace maxw

#endif
