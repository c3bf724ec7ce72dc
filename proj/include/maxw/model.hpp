#ifndef MAXW_MODEL_HPP
#define MAXW_MODEL_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxw {

//! Raised when instance data violates a structural rule.
class InstanceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Task {
  int job{0};
  int pos{0};
  int op{0};
  int duration{1};
};

//! Workload cap: operator `op` works at most `delta` shifts in [lo, hi).
struct MaxWConstraint {
  int op{0};
  int delta{0};
  int lo{0};
  int hi{0};

  int window() const { return hi - lo; }
  bool vacuous() const { return delta >= window(); }
  bool overlaps(const MaxWConstraint &o) const {
    return op == o.op && lo < o.hi && o.lo < hi;
  }
  bool contains(int lo_, int hi_) const { return lo <= lo_ && hi_ <= hi; }

  friend bool operator==(const MaxWConstraint &, const MaxWConstraint &) = default;
};

//! Minimum rest inside the window, zero for vacuous constraints.
inline int required_rest(const MaxWConstraint &c) {
  return std::max(0, c.window() - c.delta);
}

//! Unvalidated instance data as read from a file.
struct RawInstance {
  std::string name;
  int num_operators{0};
  // per job: (operator, duration) pairs
  std::vector<std::vector<std::pair<int, int>>> jobs;
  std::vector<MaxWConstraint> maxw;
};

struct Instance {
  std::string name;
  int num_operators{0};
  std::vector<std::vector<Task>> jobs;
  std::vector<MaxWConstraint> maxw;

  // derived by validate_instance()
  std::vector<Task> tasks;                 // flat, ordered by (job, pos)
  std::vector<int> job_offset;             // flat index of (job, 0)
  std::vector<std::vector<int>> op_tasks;  // flat indices per operator

  int flat(int job, int pos) const { return job_offset[job] + pos; }
  std::size_t num_tasks() const { return tasks.size(); }
  bool is_last(int t) const {
    const Task &x = tasks[t];
    return x.pos + 1 == static_cast<int>(jobs[x.job].size());
  }
  int total_work() const {
    int s = 0;
    for (const auto &t : tasks)
      s += t.duration;
    return s;
  }
};

inline Instance validate_instance(const RawInstance &raw) {
  if (raw.num_operators < 0)
    throw InstanceError("negative operator count");
  Instance inst;
  inst.name = raw.name;
  inst.num_operators = raw.num_operators;
  inst.op_tasks.resize(raw.num_operators);
  for (std::size_t i = 0; i < raw.jobs.size(); ++i) {
    const auto &job = raw.jobs[i];
    if (job.empty())
      throw InstanceError("job " + std::to_string(i) + " has no tasks");
    std::vector<Task> tasks;
    inst.job_offset.push_back(static_cast<int>(inst.tasks.size()));
    for (std::size_t j = 0; j < job.size(); ++j) {
      auto [op, dur] = job[j];
      std::string where = "task (" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (op < 0 || op >= raw.num_operators)
        throw InstanceError(where + ": operator " + std::to_string(op) + " out of range");
      if (dur < 1)
        throw InstanceError(where + ": non-positive duration " + std::to_string(dur));
      Task t{static_cast<int>(i), static_cast<int>(j), op, dur};
      inst.op_tasks[op].push_back(static_cast<int>(inst.tasks.size()));
      inst.tasks.push_back(t);
      tasks.push_back(t);
    }
    inst.jobs.push_back(std::move(tasks));
  }
  for (std::size_t c = 0; c < raw.maxw.size(); ++c) {
    const auto &m = raw.maxw[c];
    std::string where = "MaxW constraint " + std::to_string(c);
    if (m.op < 0 || m.op >= raw.num_operators)
      throw InstanceError(where + ": operator " + std::to_string(m.op) + " out of range");
    if (m.lo < 0 || m.lo >= m.hi)
      throw InstanceError(where + ": empty or negative window [" + std::to_string(m.lo) +
                          "," + std::to_string(m.hi) + ")");
    if (m.delta < 0)
      throw InstanceError(where + ": negative delta");
  }
  inst.maxw = raw.maxw;
  return inst;
}

inline RawInstance to_raw(const Instance &inst) {
  RawInstance raw;
  raw.name = inst.name;
  raw.num_operators = inst.num_operators;
  for (const auto &job : inst.jobs) {
    auto &r = raw.jobs.emplace_back();
    for (const auto &t : job)
      r.emplace_back(t.op, t.duration);
  }
  raw.maxw = inst.maxw;
  return raw;
}

struct Subinterval {
  int op{0};
  int lo{0};
  int hi{0};
  int rest_ub{0};

  int len() const { return hi - lo; }
};

/// Upper bound on the rest placed in `q`: the largest required rest among
/// the constraints whose window contains `q`, capped by the length of `q`.
inline int rest_upper_bound(const Subinterval &q, std::span<const MaxWConstraint> constraints) {
  int best = 0;
  for (const auto &c : constraints)
    if (c.contains(q.lo, q.hi))
      best = std::max(best, required_rest(c));
  return std::min(q.len(), best);
}

/// Splits the union of the constraint windows at every window boundary.
/// Shifts covered by no window get no subinterval.
inline std::vector<Subinterval> partition_subintervals(std::span<const MaxWConstraint> constraints) {
  std::vector<Subinterval> out;
  if (constraints.empty())
    return out;
  std::vector<int> bounds;
  for (const auto &c : constraints) {
    bounds.push_back(c.lo);
    bounds.push_back(c.hi);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    Subinterval q{constraints.front().op, bounds[i], bounds[i + 1], 0};
    bool covered = std::any_of(constraints.begin(), constraints.end(),
                               [&](const MaxWConstraint &c) { return c.contains(q.lo, q.hi); });
    if (!covered)
      continue;
    q.rest_ub = rest_upper_bound(q, constraints);
    out.push_back(q);
  }
  return out;
}

//! An active, non-vacuous constraint and the subintervals tiling its window.
struct CoveredConstraint {
  int index{0}; // into Instance::maxw
  int required{0};
  std::vector<int> subintervals; // into SubintervalPlan::subintervals
};

struct SubintervalPlan {
  std::vector<Subinterval> subintervals; // operator-major, sorted by lo
  std::vector<std::vector<int>> by_operator;
  std::vector<CoveredConstraint> constraints;
};

/// Builds the rest-task layout for the given active constraint indices.
/// Vacuous constraints are skipped.
inline SubintervalPlan build_plan(const Instance &inst, std::span<const int> active) {
  SubintervalPlan plan;
  plan.by_operator.resize(inst.num_operators);
  std::vector<std::vector<int>> per_op(inst.num_operators);
  for (int c : active) {
    const auto &m = inst.maxw.at(c);
    if (!m.vacuous())
      per_op[m.op].push_back(c);
  }
  for (int k = 0; k < inst.num_operators; ++k) {
    auto &idx = per_op[k];
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<MaxWConstraint> cs;
    for (int c : idx)
      cs.push_back(inst.maxw[c]);
    int first = static_cast<int>(plan.subintervals.size());
    for (auto &q : partition_subintervals(cs)) {
      plan.by_operator[k].push_back(static_cast<int>(plan.subintervals.size()));
      plan.subintervals.push_back(q);
    }
    int last = static_cast<int>(plan.subintervals.size());
    for (int c : idx) {
      const auto &m = inst.maxw[c];
      CoveredConstraint cc{c, required_rest(m), {}};
      for (int q = first; q < last; ++q)
        if (m.contains(plan.subintervals[q].lo, plan.subintervals[q].hi))
          cc.subintervals.push_back(q);
      plan.constraints.push_back(std::move(cc));
    }
  }
  return plan;
}

inline std::vector<int> all_constraints(const Instance &inst) {
  std::vector<int> out;
  for (std::size_t c = 0; c < inst.maxw.size(); ++c)
    out.push_back(static_cast<int>(c));
  return out;
}

inline int count_non_vacuous(const Instance &inst) {
  return static_cast<int>(
      std::count_if(inst.maxw.begin(), inst.maxw.end(), [](const auto &c) { return !c.vacuous(); }));
}

} // namespace maxw

#endif
