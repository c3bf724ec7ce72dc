#ifndef MAXW_PROPAGATION_HPP
#define MAXW_PROPAGATION_HPP

#include <algorithm>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jps.hpp"
#include "model.hpp"

namespace maxw {

struct VarBounds {
  int lo{0};
  int hi{0};

  bool fixed() const { return lo == hi; }
  int size() const { return hi - lo; }
  friend bool operator==(const VarBounds &, const VarBounds &) = default;
};

/// Static part of the CP model for one active set: variable layout,
/// per-job chains, rest tasks and the covered constraints.
///
/// Variables are laid out as start[0..n), end[0..n), rest[0..Q), cmax.
class Model {
public:
  Model(const Instance &inst, SubintervalPlan plan, int ub)
      : inst_(&inst), plan_(std::move(plan)), ub_(ub) {}

  const Instance &instance() const { return *inst_; }
  const SubintervalPlan &plan() const { return plan_; }
  int ub() const { return ub_; }

  int num_tasks() const { return static_cast<int>(inst_->num_tasks()); }
  int num_rests() const { return static_cast<int>(plan_.subintervals.size()); }
  int num_vars() const { return 2 * num_tasks() + num_rests() + 1; }

  int start(int task) const { return task; }
  int end(int task) const { return num_tasks() + task; }
  int rest(int q) const { return 2 * num_tasks() + q; }
  int cmax() const { return 2 * num_tasks() + num_rests(); }

  std::string var_name(int v) const {
    int n = num_tasks();
    if (v == cmax())
      return "cmax";
    if (v >= 2 * n)
      return "d" + std::to_string(v - 2 * n);
    const Task &t = inst_->tasks[v % n];
    return std::string(v < n ? "s" : "e") + std::to_string(t.job) + "," + std::to_string(t.pos);
  }

private:
  const Instance *inst_;
  SubintervalPlan plan_;
  int ub_;
};

/// Reversible bound store. Every bound change is trailed; pop_level()
/// restores the bounds saved since the matching push_level().
class SearchState {
public:
  SearchState() = default;

  explicit SearchState(const Model &m) : vars_(m.num_vars()) {
    const auto &inst = m.instance();
    for (int i = 0; i < m.num_tasks(); ++i) {
      int p = inst.tasks[i].duration;
      vars_[m.start(i)] = {0, m.ub() - p};
      vars_[m.end(i)] = {p, m.ub()};
    }
    for (int q = 0; q < m.num_rests(); ++q)
      vars_[m.rest(q)] = {0, m.plan().subintervals[q].rest_ub};
    vars_[m.cmax()] = {0, m.ub()};
  }

  int lo(int v) const { return vars_[v].lo; }
  int hi(int v) const { return vars_[v].hi; }
  const VarBounds &bounds(int v) const { return vars_[v]; }
  std::span<const VarBounds> all() const { return vars_; }
  std::size_t size() const { return vars_.size(); }

  //! Returns false on an emptied domain; the change is still trailed.
  bool set_lo(int v, int x) {
    if (x <= vars_[v].lo)
      return true;
    update(v, {x, vars_[v].hi});
    return vars_[v].lo <= vars_[v].hi;
  }
  bool set_hi(int v, int x) {
    if (x >= vars_[v].hi)
      return true;
    update(v, {vars_[v].lo, x});
    return vars_[v].lo <= vars_[v].hi;
  }
  //! Unconditional overwrite, used for tests and bound setup.
  void assign(int v, VarBounds b) { update(v, b); }

  void push_level() { levels_.push_back(trail_.size()); }
  void pop_level() {
    std::size_t mark = levels_.back();
    levels_.pop_back();
    while (trail_.size() > mark) {
      auto [v, b] = trail_.back();
      vars_[v] = b;
      trail_.pop_back();
    }
  }
  std::size_t depth() const { return levels_.size(); }
  std::size_t changes() const { return changes_; }

  // optional propagation trace: (<propagator>, <var>, <old-bounds>, <new-bounds>)
  std::ostream *trace{nullptr};
  const Model *trace_model{nullptr};
  const char *propagator{"-"};

private:
  void update(int v, VarBounds b) {
    trail_.emplace_back(v, vars_[v]);
    if (trace)
      *trace << "(" << propagator << ", "
             << (trace_model ? trace_model->var_name(v) : std::to_string(v)) << ", [" << vars_[v].lo
             << "," << vars_[v].hi << "], [" << b.lo << "," << b.hi << "])\n";
    vars_[v] = b;
    ++changes_;
  }

  std::vector<VarBounds> vars_;
  std::vector<std::pair<int, VarBounds>> trail_;
  std::vector<std::size_t> levels_;
  std::size_t changes_{0};
};

enum class Outcome { unchanged, changed, conflict };

//! Why propagation failed: the propagator, and a variable or an interval.
struct Conflict {
  std::string propagator;
  int var{-1};
  int op{-1};
  int lo{0};
  int hi{0};
};

struct PropResult {
  Outcome outcome{Outcome::unchanged};
  Conflict conflict;

  bool failed() const { return outcome == Outcome::conflict; }
};

namespace detail {

//! Tracks bound updates of one propagator run.
class Updater {
public:
  Updater(SearchState &s, const char *name) : s_(s), before_(s.changes()) { s.propagator = name; }

  bool lo(int v, int x) { return done(s_.set_lo(v, x), v); }
  bool hi(int v, int x) { return done(s_.set_hi(v, x), v); }

  PropResult result() const {
    if (failed_)
      return {Outcome::conflict, conflict_};
    return {s_.changes() != before_ ? Outcome::changed : Outcome::unchanged, {}};
  }
  PropResult fail(Conflict c) {
    failed_ = true;
    conflict_ = std::move(c);
    return result();
  }
  bool failed() const { return failed_; }

private:
  bool done(bool ok, int v) {
    if (!ok && !failed_) {
      failed_ = true;
      conflict_ = Conflict{s_.propagator, v, -1, s_.lo(v), s_.hi(v)};
    }
    return ok;
  }

  SearchState &s_;
  std::size_t before_;
  bool failed_{false};
  Conflict conflict_;
};

} // namespace detail

/// Duration, precedence and makespan links of every job:
/// e >= s + P, s_next >= e, s_first = 0, e_last <= cmax.
inline PropResult propagate_chain(const Model &m, SearchState &s) {
  detail::Updater up(s, "chain");
  const auto &inst = m.instance();
  const int cmax = m.cmax();
  for (const auto &job : inst.jobs) {
    int first = inst.flat(job.front().job, 0);
    int n = static_cast<int>(job.size());
    if (!up.hi(m.start(first), 0))
      return up.result();
    for (int j = 0; j < n; ++j) {
      int t = first + j;
      if (!up.lo(m.end(t), s.lo(m.start(t)) + job[j].duration))
        return up.result();
      if (j + 1 < n) {
        if (!up.lo(m.start(t + 1), s.lo(m.end(t))))
          return up.result();
      } else if (!up.lo(cmax, s.lo(m.end(t)))) {
        return up.result();
      }
    }
    for (int j = n - 1; j >= 0; --j) {
      int t = first + j;
      int ehi = j + 1 < n ? s.hi(m.start(t + 1)) : s.hi(cmax);
      if (!up.hi(m.end(t), ehi))
        return up.result();
      if (!up.hi(m.start(t), s.hi(m.end(t)) - job[j].duration))
        return up.result();
    }
  }
  return up.result();
}

/// Required rest of every covered constraint: sum of its rest variables
/// must reach (hi - lo) - delta.
inline PropResult propagate_maxw(const Model &m, SearchState &s) {
  detail::Updater up(s, "maxw");
  for (const auto &c : m.plan().constraints) {
    int sum_hi = 0;
    for (int q : c.subintervals)
      sum_hi += s.hi(m.rest(q));
    if (sum_hi < c.required) {
      const auto &w = m.instance().maxw[c.index];
      return up.fail(Conflict{"maxw", -1, w.op, w.lo, w.hi});
    }
    for (int q : c.subintervals) {
      int v = m.rest(q);
      if (!up.lo(v, c.required - (sum_hi - s.hi(v))))
        return up.result();
    }
  }
  return up.result();
}

namespace detail {

//! One operator's tasks with windows [s.lo, e.hi) and minimum energies.
struct OperatorView {
  std::vector<WindowedTask> tasks;
  std::vector<int> work_var; // task index in Model for work tasks, -1 for rest
};

inline OperatorView operator_view(const Model &m, const SearchState &s, int op) {
  OperatorView v;
  for (int i : m.instance().op_tasks[op]) {
    v.tasks.push_back({TaskKind::work, i, s.lo(m.start(i)), s.hi(m.end(i)), m.instance().tasks[i].duration});
    v.work_var.push_back(i);
  }
  for (int q : m.plan().by_operator[op]) {
    const auto &sub = m.plan().subintervals[q];
    v.tasks.push_back({TaskKind::rest, q, sub.lo, sub.hi, s.lo(m.rest(q))});
    v.work_var.push_back(-1);
  }
  return v;
}

} // namespace detail

/// Horn's condition on the operator, rest tasks at their minimum duration.
inline PropResult overload_check(const Model &m, SearchState &s, int op) {
  auto view = detail::operator_view(m, s, op);
  if (auto o = check_horn(view.tasks))
    return {Outcome::conflict, Conflict{"overload", -1, op, o->lo, o->hi}};
  return {};
}

/// Energy-based bound filtering on one operator. For an interval [a,b) whose
/// contained energy E (rest tasks at minimum duration) leaves slack
/// (b - a) - E:
///  - a work task t with s.lo >= a and e.hi > b that cannot fit inside the
///    slack ends at or after a + E + P_t;
///  - symmetrically, one with e.hi <= b and s.lo < a starts at or before
///    b - E - P_t;
///  - a rest task whose window lies in [a,b) takes at most slack + d.lo.
/// Assumes overload_check passed on the same bounds.
inline PropResult filter_noverlap(const Model &m, SearchState &s, int op) {
  detail::Updater up(s, "filter");
  auto view = detail::operator_view(m, s, op);
  const auto &tasks = view.tasks;
  const int n = static_cast<int>(tasks.size());
  if (n < 2)
    return up.result();

  std::vector<int> rel, dl;
  for (const auto &t : tasks) {
    rel.push_back(t.release);
    dl.push_back(t.deadline);
  }
  std::sort(rel.begin(), rel.end());
  rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
  std::sort(dl.begin(), dl.end());
  dl.erase(std::unique(dl.begin(), dl.end()), dl.end());
  const int na = static_cast<int>(rel.size());
  const int nb = static_cast<int>(dl.size());

  // energy[a][b]: total minimum duration of tasks inside [rel[a], dl[b])
  std::vector<int> energy(static_cast<std::size_t>(na) * nb, 0);
  auto E = [&](int a, int b) -> int & { return energy[static_cast<std::size_t>(a) * nb + b]; };
  for (const auto &t : tasks) {
    int ai = static_cast<int>(std::upper_bound(rel.begin(), rel.end(), t.release) - rel.begin());
    int bi = static_cast<int>(std::lower_bound(dl.begin(), dl.end(), t.deadline) - dl.begin());
    // contributes to all a <= ai-1, b >= bi
    for (int a = 0; a < ai; ++a)
      E(a, bi) += t.duration;
  }
  for (int a = 0; a < na; ++a)
    for (int b = 1; b < nb; ++b)
      E(a, b) += E(a, b - 1);

  for (int k = 0; k < n; ++k) {
    const auto &t = tasks[k];
    if (t.kind == TaskKind::work) {
      int i = view.work_var[k];
      int p = t.duration;
      int new_elo = std::numeric_limits<int>::min();
      for (int a = 0; a < na && rel[a] <= t.release; ++a)
        for (int b = 0; b < nb && dl[b] < t.deadline; ++b) {
          int len = dl[b] - rel[a];
          if (len > 0 && E(a, b) + p > len)
            new_elo = std::max(new_elo, rel[a] + E(a, b) + p);
        }
      if (!up.lo(m.end(i), new_elo))
        return up.result();
      int new_shi = std::numeric_limits<int>::max();
      for (int b = nb - 1; b >= 0 && dl[b] >= t.deadline; --b)
        for (int a = na - 1; a >= 0 && rel[a] > t.release; --a) {
          int len = dl[b] - rel[a];
          if (len > 0 && E(a, b) + p > len)
            new_shi = std::min(new_shi, dl[b] - E(a, b) - p);
        }
      if (!up.hi(m.start(i), new_shi))
        return up.result();
    } else {
      int v = m.rest(t.id);
      int cap = s.hi(v);
      for (int a = 0; a < na && rel[a] <= t.release; ++a)
        for (int b = nb - 1; b >= 0 && dl[b] >= t.deadline; --b)
          cap = std::min(cap, (dl[b] - rel[a]) - E(a, b) + t.duration);
      if (!up.hi(v, cap))
        return up.result();
    }
  }
  return up.result();
}

/// Runs chain, maxw, overload and filter round-robin until no bound moves.
inline PropResult propagate_all(const Model &m, SearchState &s) {
  bool any = false;
  for (;;) {
    bool changed = false;
    auto step = [&](PropResult r) {
      if (r.outcome == Outcome::changed)
        changed = true;
      return r;
    };
    if (auto r = step(propagate_chain(m, s)); r.failed())
      return r;
    if (auto r = step(propagate_maxw(m, s)); r.failed())
      return r;
    for (int k = 0; k < m.instance().num_operators; ++k)
      if (auto r = overload_check(m, s, k); r.failed())
        return r;
    for (int k = 0; k < m.instance().num_operators; ++k)
      if (auto r = step(filter_noverlap(m, s, k)); r.failed())
        return r;
    if (!changed)
      return {any ? Outcome::changed : Outcome::unchanged, {}};
    any = true;
  }
}

} // namespace maxw

#endif
