// Command-line front end: solve, bench, gen, check, oracle.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maxw/maxw.hpp"

namespace fs = std::filesystem;
using namespace maxw;

namespace {

enum ExitCode : int {
  ok = 0,
  failure = 1,
  parse_error = 2,
  check_failed = 3,
  no_solution = 4,
};

void write_file(const fs::path &p, const std::string &content) {
  std::ofstream out(p);
  if (!out)
    throw std::runtime_error("cannot write " + p.string());
  out << content;
}

int cmd_solve(const std::string &file, const std::string &strategy, double time_limit, std::string prefix) {
  Instance inst;
  try {
    inst = load_instance(file);
  } catch (const std::exception &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return parse_error;
  }
  Strategy s = parse_strategy(strategy);
  if (s == Strategy::oracle) {
    std::cerr << "use the 'oracle' subcommand for brute force\n";
    return failure;
  }
  auto res = run_strategy(inst, s, time_limit);
  if (prefix.empty())
    prefix = fs::path(file).stem().string() + "." + strategy;

  write_file(prefix + ".record.json", to_json(res.record).dump(2) + "\n");
  if (!res.iterations.empty()) {
    std::ostringstream log;
    for (const auto &it : res.iterations)
      log << to_json(it).dump() << "\n";
    write_file(prefix + ".iterations.jsonl", log.str());
  }
  std::cout << to_json(res.record).dump() << "\n";
  if (!res.error.empty()) {
    std::cerr << "error: " << res.error << "\n";
    return failure;
  }
  if (res.check && !res.check->ok) {
    std::cerr << to_json(*res.check).dump(2) << "\n";
    return check_failed;
  }
  if (!res.schedule)
    return no_solution;
  write_file(prefix + ".schedule.json", schedule_to_json(*res.schedule, inst, res.record.cmax).dump() + "\n");
  write_file(prefix + ".gantt.txt", gantt(*res.schedule, inst));
  std::cout << gantt(*res.schedule, inst);
  return ok;
}

int cmd_check(const std::string &instance_file, const std::string &schedule_file, std::optional<int> cmax) {
  Instance inst;
  LoadedSchedule loaded;
  try {
    inst = load_instance(instance_file);
    std::ifstream in(schedule_file);
    if (!in)
      throw ParseError("cannot open " + schedule_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(schedule_file + ": " + e.what());
    }
    loaded = schedule_from_json(j, inst);
  } catch (const std::exception &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return parse_error;
  }
  auto report = check_schedule(loaded.schedule, inst, cmax ? cmax : loaded.cmax);
  std::cout << to_json(report).dump(2) << "\n";
  return report.ok ? ok : check_failed;
}

int cmd_oracle(const std::string &file, int horizon_cap, long long node_cap, bool no_memo) {
  Instance inst;
  try {
    inst = load_instance(file);
  } catch (const std::exception &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return parse_error;
  }
  if (horizon_cap <= 0)
    horizon_cap = initial_upper_bound(inst, SubintervalPlan{}).ub;
  auto r = brute_force_optimum(inst, horizon_cap, node_cap, !no_memo);
  nlohmann::json j;
  j["instance"] = inst.name;
  j["horizon_cap"] = horizon_cap;
  j["status"] = r.exhausted ? "exhausted" : r.cmax ? "optimal" : "infeasible";
  j["cmax"] = r.cmax ? nlohmann::json(*r.cmax) : nlohmann::json(nullptr);
  j["nodes"] = r.nodes;
  std::cout << j.dump() << "\n";
  return r.cmax ? ok : no_solution;
}

std::vector<Strategy> parse_strategies(const std::string &list) {
  std::vector<Strategy> out;
  std::stringstream ss(list);
  std::string s;
  while (std::getline(ss, s, ','))
    out.push_back(parse_strategy(s));
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Preemptive job-shop scheduling with maximum-workload constraints"};
  app.require_subcommand(1);

  std::string instance_file, schedule_file, strategy = "iterative", prefix;
  double time_limit = 60.0;
  auto *solve = app.add_subcommand("solve", "solve one instance and write the schedule");
  solve->add_option("instance", instance_file, "instance file (.txt or .json)")->required();
  solve->add_option("-s,--strategy", strategy, "allmaxw | iterative")->capture_default_str();
  solve->add_option("-t,--time-limit", time_limit, "seconds")->capture_default_str();
  solve->add_option("-o,--output", prefix, "output prefix (default <instance>.<strategy>)");

  std::string manifest, strategies = "allmaxw,iterative", results = "results.csv", summary;
  int jobs = 1;
  auto *bench = app.add_subcommand("bench", "run strategies over a generated suite");
  bench->add_option("manifest", manifest, "manifest.csv written by 'gen --suite'")->required();
  bench->add_option("-s,--strategies", strategies, "comma-separated strategies")->capture_default_str();
  bench->add_option("-t,--time-limit", time_limit, "seconds per run")->capture_default_str();
  bench->add_option("-j,--jobs", jobs, "concurrent runs")->capture_default_str();
  bench->add_option("-o,--output", results, "results CSV")->capture_default_str();
  bench->add_option("--summary", summary, "per-density summary CSV (default: stdout)");

  std::string base, out_file, suite_dir;
  std::vector<std::string> bases;
  double gd = 0.25, ld = 0.25;
  std::uint64_t seed = 0;
  int horizon = 0;
  std::vector<int> random_base;
  auto *gen = app.add_subcommand("gen", "add random MaxW constraints to job-shop instances");
  gen->add_option("--base", base, "base job-shop file");
  gen->add_option("--random", random_base, "random base: <jobs> <operators> <max_duration>")->expected(3);
  gen->add_option("--gd", gd, "global rest density")->capture_default_str();
  gen->add_option("--ld", ld, "local rest density")->capture_default_str();
  gen->add_option("--seed", seed, "seed (master seed with --suite)")->capture_default_str();
  gen->add_option("--horizon", horizon, "horizon in shifts (default: greedy makespan of the base)");
  gen->add_option("-o,--output", out_file, "output instance file");
  gen->add_option("--suite", suite_dir, "write the 3x3 density grid for every --bases file into this directory");
  gen->add_option("--bases", bases, "base files for --suite");

  std::optional<int> claimed;
  auto *check = app.add_subcommand("check", "validate a schedule against an instance");
  check->add_option("instance", instance_file)->required();
  check->add_option("schedule", schedule_file, "schedule JSON")->required();
  check->add_option("--cmax", claimed, "claimed makespan (default: from the schedule file)");

  int horizon_cap = 0;
  long long node_cap = 50'000'000;
  bool no_memo = false;
  auto *oracle = app.add_subcommand("oracle", "brute-force optimum of a small instance");
  oracle->add_option("instance", instance_file)->required();
  oracle->add_option("--horizon-cap", horizon_cap, "default: greedy upper bound");
  oracle->add_option("--node-cap", node_cap)->capture_default_str();
  oracle->add_flag("--no-memo", no_memo, "disable state memoization");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve)
      return cmd_solve(instance_file, strategy, time_limit, prefix);
    if (*check)
      return cmd_check(instance_file, schedule_file, claimed);
    if (*oracle)
      return cmd_oracle(instance_file, horizon_cap, node_cap, no_memo);
    if (*bench) {
      auto runs = run_bench(manifest, parse_strategies(strategies), time_limit, jobs);
      std::ofstream out(results);
      out << results_header() << "\n";
      for (const auto &r : runs)
        write_csv_row(out, r);
      auto rows = summarize(read_manifest(manifest), runs);
      if (summary.empty()) {
        write_summary(std::cout, rows);
      } else {
        std::ofstream s(summary);
        write_summary(s, rows);
      }
      return ok;
    }
    if (*gen) {
      if (!suite_dir.empty()) {
        std::vector<Instance> loaded;
        for (const auto &b : bases)
          loaded.push_back(load_instance(b));
        auto rows = generate_suite(loaded, density_grid(), seed, suite_dir, horizon);
        std::cout << rows.size() << " instances written to " << suite_dir << "\n";
        return ok;
      }
      Instance b;
      if (!base.empty())
        b = load_instance(base);
      else if (random_base.size() == 3)
        b = random_jobshop(random_base[0], random_base[1], random_base[2], seed);
      else
        throw std::invalid_argument("gen needs --base, --random or --suite");
      GenParams p{gd, ld, seed, horizon > 0 ? horizon : std::max(15, default_horizon(b))};
      b.maxw.clear();
      Instance inst = generate_maxw(b, p);
      if (out_file.empty())
        write_instance_text(std::cout, inst);
      else
        save_instance(out_file, inst);
      return ok;
    }
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return parse_error;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return failure;
}
