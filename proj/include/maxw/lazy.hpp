#ifndef MAXW_LAZY_HPP
#define MAXW_LAZY_HPP

#include <algorithm>
#include <chrono>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jps.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace maxw {

struct Violation {
  int index{0}; // into Instance::maxw
  int amount{0};
};

/// Inactive constraints whose window holds more Work cells than delta.
/// With `verify_active` set, an active constraint found violated throws
/// std::logic_error.
inline std::vector<Violation> separate(const ShiftSchedule &sched, std::span<const MaxWConstraint> pool,
                                       const std::set<int> &active, bool verify_active = false) {
  std::vector<Violation> out;
  for (std::size_t c = 0; c < pool.size(); ++c) {
    const auto &m = pool[c];
    int amount = sched.worked(m.op, m.lo, m.hi) - m.delta;
    if (active.contains(static_cast<int>(c))) {
      if (verify_active && amount > 0)
        throw std::logic_error("active MaxW constraint " + std::to_string(c) + " violated by " +
                               std::to_string(amount));
      continue;
    }
    if (amount > 0)
      out.push_back({static_cast<int>(c), amount});
  }
  return out;
}

/// Per operator, repeatedly keeps the most violated constraint and drops
/// every remaining one whose window overlaps it.
/// Ties: larger amount, then smaller lo, then smaller index.
inline std::vector<int> select_activation(std::vector<Violation> violations,
                                          std::span<const MaxWConstraint> pool) {
  std::sort(violations.begin(), violations.end(), [&](const Violation &x, const Violation &y) {
    if (x.amount != y.amount)
      return x.amount > y.amount;
    if (pool[x.index].lo != pool[y.index].lo)
      return pool[x.index].lo < pool[y.index].lo;
    return x.index < y.index;
  });
  std::vector<int> chosen;
  for (const auto &v : violations) {
    const auto &m = pool[v.index];
    bool clash = std::any_of(chosen.begin(), chosen.end(), [&](int c) { return pool[c].overlaps(m); });
    if (!clash)
      chosen.push_back(v.index);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

//! Activation with every non-vacuous constraint assumed violated by its required rest.
inline std::vector<int> initial_pool(std::span<const MaxWConstraint> pool) {
  std::vector<Violation> all;
  for (std::size_t c = 0; c < pool.size(); ++c)
    if (!pool[c].vacuous())
      all.push_back({static_cast<int>(c), required_rest(pool[c])});
  return select_activation(std::move(all), pool);
}

struct IterationLog {
  int iter{0};
  std::vector<int> activated; // constraints newly activated before this master solve
  int active_total{0};
  std::optional<int> cmax;
  SolveStatus master_status{SolveStatus::timeout};
  int violated{0};
  std::int64_t elapsed_ms{0};
};

inline nlohmann::json to_json(const IterationLog &l) {
  nlohmann::json j;
  j["iter"] = l.iter;
  j["activated"] = l.activated;
  j["active_total"] = l.active_total;
  j["cmax"] = l.cmax ? nlohmann::json(*l.cmax) : nlohmann::json(nullptr);
  j["violated"] = l.violated;
  j["elapsed_ms"] = l.elapsed_ms;
  j["master"] = to_string(l.master_status);
  return j;
}

struct ActivationState {
  std::set<int> active;
  std::set<int> inactive;
  std::vector<IterationLog> log;

  void activate(const std::vector<int> &cs) {
    for (int c : cs) {
      active.insert(c);
      inactive.erase(c);
    }
  }
};

struct IterativeResult {
  SolveOutcome outcome;            // status refers to the whole problem
  std::optional<ShiftSchedule> schedule; // present only if MaxW-feasible
  ActivationState activation;
  int maxw_iterations{0};
};

/// Lazy constraint generation: solve the master on the active set,
/// reconstruct with JPS, separate violated inactive constraints, activate a
/// non-overlapping most-violated subset, repeat.
inline IterativeResult solve_iterative(const Instance &inst, Clock::time_point deadline) {
  auto t0 = Clock::now();
  auto since = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
  };
  IterativeResult res;
  auto &act = res.activation;
  for (std::size_t c = 0; c < inst.maxw.size(); ++c)
    act.inactive.insert(static_cast<int>(c));
  auto fresh = initial_pool(inst.maxw);
  act.activate(fresh);

  int lower_bound = 0;
  std::int64_t nodes = 0;
  int ms_iters = 0;
  for (int iter = 1;; ++iter) {
    std::vector<int> active(act.active.begin(), act.active.end());
    auto out = minimize_makespan(inst, active, deadline, lower_bound);
    nodes += out.nodes;
    ms_iters += out.makespan_iterations;

    IterationLog entry;
    entry.iter = iter;
    entry.activated = fresh;
    entry.active_total = static_cast<int>(act.active.size());
    entry.master_status = out.status;
    res.maxw_iterations = iter;

    std::vector<Violation> violations;
    std::optional<ShiftSchedule> sched;
    if (out.best) {
      entry.cmax = out.best->cmax;
      sched = reconstruct(*out.best, out.plan, inst);
#ifndef NDEBUG
      violations = separate(*sched, inst.maxw, act.active, true);
#else
      violations = separate(*sched, inst.maxw, act.active);
#endif
    }
    entry.violated = static_cast<int>(violations.size());
    entry.elapsed_ms = since();
    act.log.push_back(entry);

    bool last = false;
    if (out.best && violations.empty()) {
      res.outcome = std::move(out);
      res.schedule = std::move(sched);
      last = true;
    } else if (!out.best || Clock::now() >= deadline) {
      res.outcome = std::move(out);
      res.outcome.status = SolveStatus::timeout;
      res.outcome.best.reset();
      last = true;
    }
    if (last) {
      res.outcome.nodes = nodes;
      res.outcome.makespan_iterations = ms_iters;
      res.outcome.elapsed = std::chrono::milliseconds(since());
      return res;
    }

    if (out.status == SolveStatus::optimal)
      lower_bound = std::max(lower_bound, out.best->cmax);
    fresh = select_activation(std::move(violations), inst.maxw);
    act.activate(fresh);
  }
}

} // namespace maxw

#endif
