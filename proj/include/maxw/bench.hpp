#ifndef MAXW_BENCH_HPP
#define MAXW_BENCH_HPP

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "checker.hpp"
#include "gen.hpp"
#include "io.hpp"
#include "jps.hpp"
#include "lazy.hpp"
#include "solver.hpp"

namespace maxw {

enum class Strategy { allmaxw, iterative, oracle };

inline const char *to_string(Strategy s) {
  switch (s) {
  case Strategy::allmaxw: return "allmaxw";
  case Strategy::iterative: return "iterative";
  case Strategy::oracle: return "oracle";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string &s) {
  if (s == "allmaxw")
    return Strategy::allmaxw;
  if (s == "iterative")
    return Strategy::iterative;
  if (s == "oracle")
    return Strategy::oracle;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

struct RunRecord {
  std::string instance;
  Strategy strategy{Strategy::allmaxw};
  std::string status; // optimal | feasible | infeasible | timeout | exhausted | check-failed | error
  std::optional<int> cmax;
  std::int64_t elapsed_ms{0};
  int makespan_iterations{0};
  int maxw_iterations{0};
  int activated{0};
  int pool{0}; // non-vacuous constraints
  std::uint64_t seed{0};
};

inline const char *results_header() {
  return "instance,strategy,status,cmax,elapsed_ms,makespan_iterations,maxw_iterations,activated,pool,seed";
}

inline void write_csv_row(std::ostream &os, const RunRecord &r) {
  os << r.instance << "," << to_string(r.strategy) << "," << r.status << ","
     << (r.cmax ? std::to_string(*r.cmax) : "") << "," << r.elapsed_ms << "," << r.makespan_iterations << ","
     << r.maxw_iterations << "," << r.activated << "," << r.pool << "," << r.seed << "\n";
}

inline nlohmann::json to_json(const RunRecord &r) {
  nlohmann::json j;
  j["instance"] = r.instance;
  j["strategy"] = to_string(r.strategy);
  j["status"] = r.status;
  j["cmax"] = r.cmax ? nlohmann::json(*r.cmax) : nlohmann::json(nullptr);
  j["elapsed_ms"] = r.elapsed_ms;
  j["makespan_iterations"] = r.makespan_iterations;
  j["maxw_iterations"] = r.maxw_iterations;
  j["activated"] = r.activated;
  j["pool"] = r.pool;
  j["seed"] = r.seed;
  return j;
}

struct RunResult {
  RunRecord record;
  std::optional<ShiftSchedule> schedule;
  std::optional<CheckReport> check;
  std::vector<IterationLog> iterations; // iterative only
  std::string error;
};

/// Solves one instance with one strategy. Every schedule produced is checked
/// against the full constraint pool; a failed check turns the status into
/// "check-failed".
inline RunResult run_strategy(const Instance &inst, Strategy strategy, double time_limit_s,
                              std::int64_t oracle_node_cap = 50'000'000) {
  RunResult res;
  auto &rec = res.record;
  rec.instance = inst.name;
  rec.strategy = strategy;
  rec.pool = count_non_vacuous(inst);
  auto t0 = Clock::now();
  auto deadline = deadline_after(time_limit_s);
  try {
    switch (strategy) {
    case Strategy::allmaxw: {
      auto all = all_constraints(inst);
      auto out = minimize_makespan(inst, all, deadline);
      rec.status = to_string(out.status);
      rec.makespan_iterations = out.makespan_iterations;
      rec.maxw_iterations = 1;
      rec.activated = rec.pool;
      if (out.best) {
        rec.cmax = out.best->cmax;
        res.schedule = reconstruct(*out.best, out.plan, inst);
      }
      break;
    }
    case Strategy::iterative: {
      auto out = solve_iterative(inst, deadline);
      rec.status = to_string(out.outcome.status);
      rec.makespan_iterations = out.outcome.makespan_iterations;
      rec.maxw_iterations = out.maxw_iterations;
      rec.activated = static_cast<int>(out.activation.active.size());
      res.iterations = out.activation.log;
      if (out.schedule) {
        rec.cmax = out.outcome.best->cmax;
        res.schedule = std::move(out.schedule);
      }
      break;
    }
    case Strategy::oracle: {
      auto greedy = initial_upper_bound(inst, SubintervalPlan{});
      auto r = brute_force_optimum(inst, greedy.ub, oracle_node_cap);
      rec.status = r.exhausted ? "exhausted" : r.cmax ? "optimal" : "infeasible";
      rec.cmax = r.cmax;
      break;
    }
    }
    if (res.schedule) {
      res.check = check_schedule(*res.schedule, inst, rec.cmax);
      if (!res.check->ok)
        rec.status = "check-failed";
    }
  } catch (const std::exception &e) {
    rec.status = "error";
    res.error = e.what();
  }
  rec.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
  return res;
}

struct BenchJob {
  std::filesystem::path path;
  ManifestRow row;
  Strategy strategy;
};

/// Runs every (instance, strategy) pair on up to `parallelism` threads.
/// Failures are recorded in the row, never abort the batch. Results are
/// in manifest order, strategies in the given order.
inline std::vector<RunRecord> run_bench(const std::filesystem::path &manifest, const std::vector<Strategy> &strategies,
                                        double time_limit_s, int parallelism) {
  auto rows = read_manifest(manifest);
  std::vector<BenchJob> jobs;
  for (const auto &row : rows)
    for (auto s : strategies)
      jobs.push_back({manifest.parent_path() / row.instance, row, s});
  std::vector<RunRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      const auto &job = jobs[i];
      RunRecord rec;
      try {
        auto inst = load_instance(job.path);
        rec = run_strategy(inst, job.strategy, time_limit_s).record;
      } catch (const std::exception &) {
        rec.strategy = job.strategy;
        rec.status = "error";
      }
      rec.instance = job.row.instance;
      rec.seed = job.row.seed;
      out[i] = rec;
    }
  };
  int n = std::max(1, parallelism);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  return out;
}

struct SummaryRow {
  double gd{0};
  double ld{0};
  int instances{0};
  std::map<Strategy, int> optimal;
  std::map<Strategy, std::pair<double, int>> makespan_iterations; // sum, count
  std::pair<double, int> activated_proportion{0.0, 0};             // iterative runs with a schedule
};

inline const char *summary_header() {
  return "gd,ld,instances,allmaxw_optimal,iterative_optimal,oracle_optimal,iterative_mean_activated_proportion,"
         "allmaxw_mean_makespan_iterations,iterative_mean_makespan_iterations";
}

/// Groups results by density pair, using the manifest to recover (gd, ld).
inline std::vector<SummaryRow> summarize(const std::vector<ManifestRow> &manifest, const std::vector<RunRecord> &runs) {
  std::map<std::string, std::pair<double, double>> density;
  for (const auto &m : manifest)
    density[m.instance] = {m.gd, m.ld};
  std::map<std::pair<double, double>, SummaryRow> groups;
  std::map<std::pair<double, double>, std::set<std::string>> seen;
  for (const auto &r : runs) {
    auto it = density.find(r.instance);
    if (it == density.end())
      continue;
    auto &g = groups[it->second];
    g.gd = it->second.first;
    g.ld = it->second.second;
    seen[it->second].insert(r.instance);
    if (r.status == "optimal")
      ++g.optimal[r.strategy];
    if (r.strategy != Strategy::oracle && r.cmax) {
      auto &mi = g.makespan_iterations[r.strategy];
      mi.first += r.makespan_iterations;
      ++mi.second;
    }
    if (r.strategy == Strategy::iterative && r.cmax && r.pool > 0) {
      g.activated_proportion.first += static_cast<double>(r.activated) / r.pool;
      ++g.activated_proportion.second;
    }
  }
  std::vector<SummaryRow> out;
  for (auto &[key, g] : groups) {
    g.instances = static_cast<int>(seen[key].size());
    out.push_back(g);
  }
  return out;
}

inline void write_summary(std::ostream &os, const std::vector<SummaryRow> &rows) {
  auto mean = [](const std::pair<double, int> &p) -> std::string {
    if (p.second == 0)
      return "";
    std::ostringstream s;
    s << p.first / p.second;
    return s.str();
  };
  auto get = [](const auto &m, Strategy s) {
    auto it = m.find(s);
    return it == m.end() ? std::pair<double, int>{0.0, 0} : it->second;
  };
  os << summary_header() << "\n";
  for (const auto &g : rows) {
    auto opt = [&](Strategy s) {
      auto it = g.optimal.find(s);
      return it == g.optimal.end() ? 0 : it->second;
    };
    os << format_density(g.gd) << "," << format_density(g.ld) << "," << g.instances << ","
       << opt(Strategy::allmaxw) << "," << opt(Strategy::iterative) << "," << opt(Strategy::oracle) << ","
       << mean(g.activated_proportion) << "," << mean(get(g.makespan_iterations, Strategy::allmaxw)) << ","
       << mean(get(g.makespan_iterations, Strategy::iterative)) << "\n";
  }
}

} // namespace maxw

#endif
