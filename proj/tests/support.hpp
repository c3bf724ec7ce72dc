// Test-only oracles and generators. Nothing here calls into the propagation
// or JPS code it is used to check.
#ifndef MAXW_TESTS_SUPPORT_HPP
#define MAXW_TESTS_SUPPORT_HPP

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <random>
#include <vector>

#include "maxw/maxw.hpp"

namespace maxw::testing {

inline Instance make_instance(int num_operators, std::vector<std::vector<std::pair<int, int>>> jobs,
                              std::vector<MaxWConstraint> maxw = {}, std::string name = "t") {
  RawInstance raw;
  raw.name = std::move(name);
  raw.num_operators = num_operators;
  raw.jobs = std::move(jobs);
  raw.maxw = std::move(maxw);
  return validate_instance(raw);
}

//! Two overlapping windows on operator 0: (5, [0,6)) and (2, [4,9)).
inline std::vector<MaxWConstraint> overlapping_pair() { return {{0, 5, 0, 6}, {0, 2, 4, 9}}; }

/// Horn's condition checked over every integer interval [a,b) in the span
/// of the windows, with a task counted when its window lies inside.
inline bool naive_horn(const std::vector<WindowedTask> &tasks) {
  int lo = 0, hi = 0;
  bool any = false;
  for (const auto &t : tasks) {
    if (t.duration <= 0)
      continue;
    if (t.deadline - t.release < t.duration)
      return false;
    lo = any ? std::min(lo, t.release) : t.release;
    hi = any ? std::max(hi, t.deadline) : t.deadline;
    any = true;
  }
  for (int a = lo; a < hi; ++a)
    for (int b = a + 1; b <= hi; ++b) {
      int e = 0;
      for (const auto &t : tasks)
        if (t.duration > 0 && t.release >= a && t.deadline <= b)
          e += t.duration;
      if (e > b - a)
        return false;
    }
  return true;
}

//! Random single-operator task set: n tasks, windows inside [0, horizon).
inline std::vector<WindowedTask> random_task_set(std::mt19937 &rng, int max_n, int horizon) {
  std::uniform_int_distribution<int> nd(1, max_n);
  int n = nd(rng);
  std::vector<WindowedTask> tasks;
  for (int i = 0; i < n; ++i) {
    int r = std::uniform_int_distribution<int>(0, horizon - 1)(rng);
    int d = std::uniform_int_distribution<int>(r + 1, horizon)(rng);
    int p = std::uniform_int_distribution<int>(0, std::min(d - r, 4))(rng);
    auto kind = std::bernoulli_distribution(0.3)(rng) ? TaskKind::rest : TaskKind::work;
    tasks.push_back({kind, i, r, d, p});
  }
  return tasks;
}

struct TinyLimits {
  int max_jobs{3};
  int max_tasks_per_job{2};
  int max_duration{3};
  int max_operators{2};
  int max_constraints{3};
  int window_span{10}; // constraint windows lie in [0, window_span)
};

inline Instance random_tiny_instance(std::mt19937 &rng, const TinyLimits &lim, std::string name = "tiny") {
  auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  RawInstance raw;
  raw.name = std::move(name);
  raw.num_operators = uni(1, lim.max_operators);
  int jobs = uni(1, lim.max_jobs);
  for (int j = 0; j < jobs; ++j) {
    auto &job = raw.jobs.emplace_back();
    int n = uni(1, lim.max_tasks_per_job);
    for (int t = 0; t < n; ++t)
      job.emplace_back(uni(0, raw.num_operators - 1), uni(1, lim.max_duration));
  }
  int nc = uni(0, lim.max_constraints);
  for (int c = 0; c < nc; ++c) {
    int lo = uni(0, lim.window_span - 2);
    int hi = uni(lo + 1, std::min(lim.window_span, lo + 6));
    raw.maxw.push_back({uni(0, raw.num_operators - 1), uni(0, hi - lo), lo, hi});
  }
  return validate_instance(raw);
}

/// Every full assignment inside the current bounds of `s` that satisfies
/// the model at fixed values: chain arithmetic, required rest sums and
/// Horn's condition per operator (naive oracle). Calls `visit` with the
/// assignment indexed like the model variables; stops when it returns false.
inline void enumerate_assignments(const Model &m, const SearchState &s,
                                  const std::function<bool(const std::vector<int> &)> &visit) {
  const auto &inst = m.instance();
  const int n = m.num_tasks();
  std::vector<int> val(m.num_vars());
  bool stop = false;

  auto full_check = [&]() {
    int c = val[m.cmax()];
    for (int i = 0; i < n; ++i) {
      const Task &t = inst.tasks[i];
      if (t.pos == 0 && val[m.start(i)] != 0)
        return false;
      if (inst.is_last(i) && val[m.end(i)] > c)
        return false;
    }
    for (const auto &cc : m.plan().constraints) {
      int sum = 0;
      for (int q : cc.subintervals)
        sum += val[m.rest(q)];
      if (sum < cc.required)
        return false;
    }
    for (int k = 0; k < inst.num_operators; ++k) {
      std::vector<WindowedTask> tasks;
      for (int i : inst.op_tasks[k])
        tasks.push_back({TaskKind::work, i, val[m.start(i)], val[m.end(i)], inst.tasks[i].duration});
      for (int q : m.plan().by_operator[k]) {
        const auto &sub = m.plan().subintervals[q];
        tasks.push_back({TaskKind::rest, q, sub.lo, sub.hi, val[m.rest(q)]});
      }
      if (!naive_horn(tasks))
        return false;
    }
    return true;
  };

  std::function<void(int)> rec = [&](int v) {
    if (stop)
      return;
    if (v == m.num_vars()) {
      if (full_check() && !visit(val))
        stop = true;
      return;
    }
    for (int x = s.lo(v); x <= s.hi(v) && !stop; ++x) {
      val[v] = x;
      // prune with chain arithmetic as soon as both ends are known
      if (v >= n && v < 2 * n) {
        int i = v - n;
        if (x < val[m.start(i)] + inst.tasks[i].duration)
          continue;
        if (inst.tasks[i].pos > 0 && val[m.start(i)] < val[m.end(i - 1)])
          continue;
      }
      rec(v + 1);
    }
  };
  rec(0);
}

inline bool within(const std::vector<int> &val, const SearchState &s) {
  for (std::size_t v = 0; v < val.size(); ++v)
    if (val[v] < s.lo(static_cast<int>(v)) || val[v] > s.hi(static_cast<int>(v)))
      return false;
  return true;
}

struct TinyState {
  Instance inst;
  std::vector<int> active;
  int ub{0};
};

//! Random tiny model: at most 6 tasks, horizon at most 8.
inline TinyState random_tiny_state(std::mt19937 &rng) {
  TinyLimits lim{3, 2, 2, 2, 3, 8};
  TinyState ts;
  ts.inst = random_tiny_instance(rng, lim);
  ts.active = all_constraints(ts.inst);
  ts.ub = std::uniform_int_distribution<int>(3, 8)(rng);
  return ts;
}

//! Randomly narrows some bounds of a fresh state (may empty nothing).
inline void random_tighten(std::mt19937 &rng, const Model &m, SearchState &s) {
  std::bernoulli_distribution pick(0.15);
  for (int v = 0; v < m.num_vars(); ++v) {
    if (!pick(rng) || s.lo(v) > s.hi(v))
      continue;
    int a = std::uniform_int_distribution<int>(s.lo(v), s.hi(v))(rng);
    int b = std::uniform_int_distribution<int>(a, s.hi(v))(rng);
    s.assign(v, {a, b});
  }
}


struct SoundnessStats {
  int states{0};
  int conflicts{0};
  long long assignments{0};
};

/// One random tiny state: enumerates every satisfying assignment inside its
/// bounds, runs propagate_all, and reports the first way the result is
/// unsound (pruned solution, wrong conflict, widened bound).
inline std::optional<std::string> soundness_trial(std::mt19937 &rng, SoundnessStats &stats) {
  TinyState ts = random_tiny_state(rng);
  Model m(ts.inst, build_plan(ts.inst, ts.active), ts.ub);
  SearchState before(m);
  random_tighten(rng, m, before);
  std::vector<std::vector<int>> sols;
  enumerate_assignments(m, before, [&](const std::vector<int> &v) {
    sols.push_back(v);
    return true;
  });
  ++stats.states;
  stats.assignments += static_cast<long long>(sols.size());
  SearchState after = before;
  auto r = propagate_all(m, after);
  auto describe = [&](const std::string &what) {
    std::ostringstream os;
    os << what << " on instance:\n";
    write_instance_text(os, ts.inst);
    os << "ub " << ts.ub << ", bounds:";
    for (int v = 0; v < m.num_vars(); ++v)
      os << " " << m.var_name(v) << "[" << before.lo(v) << "," << before.hi(v) << "]";
    return os.str();
  };
  if (r.failed()) {
    ++stats.conflicts;
    if (!sols.empty())
      return describe("conflict reported with " + std::to_string(sols.size()) + " solutions");
    return std::nullopt;
  }
  for (int v = 0; v < m.num_vars(); ++v)
    if (before.lo(v) <= before.hi(v) && (after.lo(v) < before.lo(v) || after.hi(v) > before.hi(v)))
      return describe("bound widened for " + m.var_name(v));
  for (const auto &sol : sols)
    if (!within(sol, after))
      return describe("solution pruned");
  return std::nullopt;
}

struct Mutation {
  ShiftSchedule schedule;
  std::string rule; // the rule the checker must report
  std::string what;
};

/// One random single-cell mutation of a valid schedule that breaks a rule,
/// or nothing when the drawn kind does not apply to this schedule.
inline std::optional<Mutation> mutate_once(std::mt19937 &rng, const ShiftSchedule &valid, const Instance &inst,
                                           int cmax) {
  auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  std::vector<std::pair<int, int>> work, free;
  for (int k = 0; k < valid.num_operators(); ++k)
    for (int t = 0; t < valid.horizon; ++t)
      (valid.cells[k][t].kind == CellKind::work ? work : free).emplace_back(k, t);
  auto pick = [&](const std::vector<std::pair<int, int>> &v) { return v[uni(0, static_cast<int>(v.size()) - 1)]; };
  auto task_on = [&](int k) -> int {
    if (inst.op_tasks[k].empty())
      return -1;
    return inst.op_tasks[k][uni(0, static_cast<int>(inst.op_tasks[k].size()) - 1)];
  };
  Mutation m{valid, "", ""};
  auto at = [&](int k, int t) -> Cell & { return m.schedule.cells[k][t]; };
  auto where = [](int k, int t) { return " op " + std::to_string(k) + " shift " + std::to_string(t); };

  switch (uni(0, 6)) {
  case 0: { // drop one work unit
    if (work.empty())
      return std::nullopt;
    auto [k, t] = pick(work);
    at(k, t) = Cell::idle();
    m.rule = "duration";
    m.what = "drop unit" + where(k, t);
    break;
  }
  case 1: { // extra unit of a task of the same operator
    if (free.empty())
      return std::nullopt;
    auto [k, t] = pick(free);
    int i = task_on(k);
    if (i < 0)
      return std::nullopt;
    at(k, t) = Cell::work(i);
    m.rule = "duration";
    m.what = "extra unit" + where(k, t);
    break;
  }
  case 2: { // unit replaced by a task of another operator
    if (work.empty() || inst.num_operators < 2)
      return std::nullopt;
    auto [k, t] = pick(work);
    int other = (k + uni(1, inst.num_operators - 1)) % inst.num_operators;
    int i = task_on(other);
    if (i < 0)
      return std::nullopt;
    at(k, t) = Cell::work(i);
    m.rule = "same-operator";
    m.what = "foreign task" + where(k, t);
    break;
  }
  case 3: { // unknown task id
    if (work.empty())
      return std::nullopt;
    auto [k, t] = pick(work);
    at(k, t) = Cell::work(static_cast<int>(inst.num_tasks()) + uni(0, 5));
    m.rule = "overlap";
    m.what = "unknown id" + where(k, t);
    break;
  }
  case 4: { // unit after the claimed makespan
    std::vector<std::pair<int, int>> late;
    for (auto [k, t] : free)
      if (t >= cmax && !inst.op_tasks[k].empty())
        late.emplace_back(k, t);
    if (late.empty())
      return std::nullopt;
    auto [k, t] = pick(late);
    at(k, t) = Cell::work(task_on(k));
    m.rule = "makespan";
    m.what = "late unit" + where(k, t);
    break;
  }
  case 5: { // successor unit before the predecessor finishes
    std::vector<std::tuple<int, int, int>> cand;
    for (std::size_t i = 0; i < inst.num_tasks(); ++i) {
      const Task &task = inst.tasks[i];
      if (task.pos == 0)
        continue;
      int last = -1;
      for (int t = 0; t < valid.horizon; ++t)
        if (valid.cells[inst.tasks[i - 1].op][t] == Cell::work(static_cast<int>(i) - 1))
          last = t;
      for (int t = 0; t <= last; ++t)
        if (valid.cells[task.op][t].kind != CellKind::work)
          cand.emplace_back(task.op, t, static_cast<int>(i));
    }
    if (cand.empty())
      return std::nullopt;
    auto [k, t, i] = cand[uni(0, static_cast<int>(cand.size()) - 1)];
    at(k, t) = Cell::work(i);
    m.rule = "precedence";
    m.what = "early successor" + where(k, t);
    break;
  }
  default: { // extra unit inside a window already at its cap
    std::vector<std::pair<int, int>> cand;
    for (const auto &c : inst.maxw) {
      if (valid.worked(c.op, c.lo, c.hi) < c.delta || inst.op_tasks[c.op].empty())
        continue;
      for (int t = c.lo; t < std::min(c.hi, valid.horizon); ++t)
        if (valid.cells[c.op][t].kind != CellKind::work)
          cand.emplace_back(c.op, t);
    }
    if (cand.empty())
      return std::nullopt;
    auto [k, t] = pick(cand);
    at(k, t) = Cell::work(task_on(k));
    m.rule = "maxw";
    m.what = "overrun" + where(k, t);
    break;
  }
  }
  return m;
}

} // namespace maxw::testing

#endif
