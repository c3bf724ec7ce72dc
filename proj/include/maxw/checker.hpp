#ifndef MAXW_CHECKER_HPP
#define MAXW_CHECKER_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "jps.hpp"
#include "model.hpp"

namespace maxw {

struct CheckViolation {
  std::string rule; // duration | precedence | overlap | same-operator | maxw | makespan
  std::string location;
  std::string detail;
};

struct CheckReport {
  bool ok{true};
  std::vector<CheckViolation> violations;

  void add(std::string rule, std::string location, std::string detail) {
    ok = false;
    violations.push_back({std::move(rule), std::move(location), std::move(detail)});
  }
  bool has(const std::string &rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const CheckViolation &v) { return v.rule == rule; });
  }
};

inline nlohmann::json to_json(const CheckReport &r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  j["violations"] = nlohmann::json::array();
  for (const auto &v : r.violations)
    j["violations"].push_back({{"rule", v.rule}, {"location", v.location}, {"detail", v.detail}});
  return j;
}

/// Full legality check of an explicit schedule against every problem rule
/// and every MaxW constraint of the pool. Never throws on bad schedules.
inline CheckReport check_schedule(const ShiftSchedule &sched, const Instance &inst,
                                  std::optional<int> claimed_cmax) {
  CheckReport rep;
  const int n = static_cast<int>(inst.num_tasks());
  if (sched.num_operators() != inst.num_operators)
    rep.add("overlap", "grid",
            "schedule has " + std::to_string(sched.num_operators()) + " operator rows, instance has " +
                std::to_string(inst.num_operators));
  std::vector<int> count(n, 0), first(n, -1), last(n, -1);
  for (int k = 0; k < sched.num_operators(); ++k) {
    const auto &row = sched.cells[k];
    if (static_cast<int>(row.size()) != sched.horizon)
      rep.add("overlap", "operator " + std::to_string(k),
              "row has " + std::to_string(row.size()) + " cells for horizon " + std::to_string(sched.horizon));
    for (int t = 0; t < static_cast<int>(row.size()); ++t) {
      const Cell &c = row[t];
      if (c.kind != CellKind::work)
        continue;
      std::string where = "operator " + std::to_string(k) + " shift " + std::to_string(t);
      if (c.id < 0 || c.id >= n) {
        rep.add("overlap", where, "unknown task id " + std::to_string(c.id));
        continue;
      }
      const Task &task = inst.tasks[c.id];
      if (task.op != k)
        rep.add("same-operator", where,
                "task (" + std::to_string(task.job) + "," + std::to_string(task.pos) + ") belongs to operator " +
                    std::to_string(task.op));
      ++count[c.id];
      if (first[c.id] < 0)
        first[c.id] = t;
      last[c.id] = std::max(last[c.id], t);
      first[c.id] = std::min(first[c.id], t);
    }
  }
  for (int i = 0; i < n; ++i) {
    const Task &task = inst.tasks[i];
    std::string where = "task (" + std::to_string(task.job) + "," + std::to_string(task.pos) + ")";
    if (count[i] != task.duration)
      rep.add("duration", where,
              std::to_string(count[i]) + " work cells, duration " + std::to_string(task.duration));
    if (task.pos > 0 && count[i] > 0 && count[i - 1] > 0 && first[i] <= last[i - 1])
      rep.add("precedence", where,
              "starts at " + std::to_string(first[i]) + " before predecessor ends at " +
                  std::to_string(last[i - 1]));
  }
  for (std::size_t c = 0; c < inst.maxw.size(); ++c) {
    const auto &m = inst.maxw[c];
    if (m.op >= sched.num_operators())
      continue;
    int w = sched.worked(m.op, m.lo, m.hi);
    if (w > m.delta)
      rep.add("maxw", "constraint " + std::to_string(c),
              std::to_string(w) + " worked shifts in [" + std::to_string(m.lo) + "," + std::to_string(m.hi) +
                  ") on operator " + std::to_string(m.op) + ", cap " + std::to_string(m.delta));
  }
  if (claimed_cmax && sched.makespan() > *claimed_cmax)
    rep.add("makespan", "schedule",
            "last work shift + 1 = " + std::to_string(sched.makespan()) + " exceeds claimed " +
                std::to_string(*claimed_cmax));
  return rep;
}

struct OracleResult {
  std::optional<int> cmax; // empty when exhausted or no schedule within the cap
  bool exhausted{false};
  std::int64_t nodes{0};
};

namespace detail {

//! Time-indexed exhaustive search over shifts; MaxW budgets checked on
//! worked shifts directly, no rest tasks or subintervals.
class BruteForce {
public:
  BruteForce(const Instance &inst, int horizon_cap, std::int64_t node_cap, bool memo)
      : inst_(inst), cap_(horizon_cap), node_cap_(node_cap), memo_(memo) {
    left_.resize(inst.num_tasks());
    for (std::size_t i = 0; i < inst.num_tasks(); ++i)
      left_[i] = inst.tasks[i].duration;
    cur_.assign(inst.jobs.size(), 0);
    used_.assign(inst.maxw.size(), 0);
    job_left_.resize(inst.jobs.size());
    for (std::size_t j = 0; j < inst.jobs.size(); ++j)
      for (const auto &t : inst.jobs[j])
        job_left_[j] += t.duration;
    op_left_.assign(inst.num_operators, 0);
    for (const auto &t : inst.tasks)
      op_left_[t.op] += t.duration;
    best_ = cap_ + 1;
  }

  OracleResult run() {
    dfs(0, 0);
    OracleResult r;
    r.nodes = nodes_;
    r.exhausted = exhausted_;
    if (!exhausted_ && best_ <= cap_)
      r.cmax = best_;
    return r;
  }

private:
  int remaining_bound(int t) const {
    int lb = t;
    for (std::size_t j = 0; j < job_left_.size(); ++j)
      lb = std::max(lb, t + job_left_[j]);
    for (int v : op_left_)
      lb = std::max(lb, t + v);
    return lb;
  }

  std::string key(int t) const {
    std::string k;
    k.reserve(4 * (left_.size() + used_.size()) + 4);
    auto put = [&](int v) { k.append(reinterpret_cast<const char *>(&v), sizeof v); };
    put(t);
    for (int v : left_)
      put(v);
    for (std::size_t c = 0; c < used_.size(); ++c) {
      const auto &m = inst_.maxw[c];
      put(m.lo <= t && t < m.hi ? used_[c] : 0);
    }
    return k;
  }

  bool all_done() const {
    return std::all_of(job_left_.begin(), job_left_.end(), [](int v) { return v == 0; });
  }

  // shift t, with `made` = last worked shift + 1 so far
  void dfs(int t, int made) {
    if (exhausted_)
      return;
    if (++nodes_ > node_cap_) {
      exhausted_ = true;
      return;
    }
    if (all_done()) {
      best_ = std::min(best_, made);
      return;
    }
    if (remaining_bound(t) >= best_ || t >= cap_)
      return;
    if (memo_ && !seen_.insert(key(t)).second)
      return;
    // eligible task per operator: the current task of each job, decided at
    // the start of the shift so a job advances by at most one unit
    std::vector<std::vector<int>> options(inst_.num_operators);
    for (std::size_t j = 0; j < inst_.jobs.size(); ++j) {
      if (job_left_[j] == 0)
        continue;
      int i = inst_.flat(static_cast<int>(j), cur_[j]);
      int op = inst_.tasks[i].op;
      if (budget_ok(op, t))
        options[op].push_back(i);
    }
    choose(t, made, 0, options);
  }

  bool budget_ok(int op, int t) const {
    for (std::size_t c = 0; c < used_.size(); ++c) {
      const auto &m = inst_.maxw[c];
      if (m.op == op && m.lo <= t && t < m.hi && used_[c] >= m.delta)
        return false;
    }
    return true;
  }

  void apply(int i, int t, int sign) {
    const Task &task = inst_.tasks[i];
    left_[i] -= sign;
    job_left_[task.job] -= sign;
    op_left_[task.op] -= sign;
    for (std::size_t c = 0; c < used_.size(); ++c) {
      const auto &m = inst_.maxw[c];
      if (m.op == task.op && m.lo <= t && t < m.hi)
        used_[c] += sign;
    }
  }

  void choose(int t, int made, int op, const std::vector<std::vector<int>> &options) {
    if (exhausted_)
      return;
    if (op == inst_.num_operators) {
      std::vector<int> advanced;
      for (std::size_t j = 0; j < cur_.size(); ++j)
        if (job_left_[j] > 0 && left_[inst_.flat(static_cast<int>(j), cur_[j])] == 0) {
          ++cur_[j];
          advanced.push_back(static_cast<int>(j));
        }
      dfs(t + 1, made);
      for (int j : advanced)
        --cur_[j];
      return;
    }
    for (int i : options[op]) {
      apply(i, t, +1);
      choose(t, t + 1, op + 1, options);
      apply(i, t, -1);
    }
    choose(t, made, op + 1, options); // idle
  }

  const Instance &inst_;
  int cap_;
  std::int64_t node_cap_;
  bool memo_;
  std::vector<int> left_, cur_, used_, job_left_, op_left_;
  int best_;
  std::int64_t nodes_{0};
  bool exhausted_{false};
  std::unordered_set<std::string> seen_;
};

} // namespace detail

/// Minimum makespan by exhaustive search over shifts up to `horizon_cap`.
/// `memo` skips states already expanded (same shift, remaining work and
/// budgets of the windows open at that shift).
inline OracleResult brute_force_optimum(const Instance &inst, int horizon_cap, std::int64_t node_cap = 50'000'000,
                                        bool memo = true) {
  return detail::BruteForce(inst, horizon_cap, node_cap, memo).run();
}

} // namespace maxw

#endif
