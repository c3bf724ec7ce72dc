#ifndef MAXW_GEN_HPP
#define MAXW_GEN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "io.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace maxw {

/// SplitMix64 (Steele, Lea, Flood 2014). Stream i of a generator seeded
/// with s is seeded with mix(s ^ (i * 0x9e3779b97f4a7c15 + 1)).
/// Uniform integers use rejection on the top bits; normals use Box-Muller
/// with the cosine branch only. All of this is fixed so that generated
/// files are identical across compilers and standard libraries.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

  SplitMix64 split(std::uint64_t stream) const {
    return SplitMix64(mix(state_ ^ (stream * 0x9e3779b97f4a7c15ULL + 1)));
  }

  //! Uniform in [0, 1) with 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  //! Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0)
      return static_cast<std::int64_t>(next());
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do
      x = next();
    while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
  }

  double normal(double mean, double sd) {
    double u1 = 1.0 - uniform01(); // (0, 1]
    double u2 = uniform01();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t state_;
};

//! 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct GenParams {
  double gd{0.25};       // global rest density
  double ld{0.25};       // local rest density
  std::uint64_t seed{0};
  int horizon{0};        // shifts

  void validate() const {
    if (!(gd > 0 && gd < 1))
      throw std::invalid_argument("global density must lie in (0,1)");
    if (!(ld > 0 && ld < 1))
      throw std::invalid_argument("local density must lie in (0,1)");
    if (horizon < 15)
      throw std::invalid_argument("horizon must be at least 15 shifts");
  }
};

class GenerationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! One draw of the interval procedure.
struct MaxWDraw {
  int len{0};
  int lo{0};
  double proportion{0}; // clamped to [0,1]
  int rest{0};
};

inline std::string format_density(double d) {
  std::ostringstream os;
  os << d;
  return os.str();
}

inline int max_window(int horizon) { return static_cast<int>(std::floor(0.2 * horizon)); }

inline MaxWDraw draw_maxw(SplitMix64 &rng, int horizon, double ld) {
  MaxWDraw d;
  d.len = static_cast<int>(rng.uniform_int(3, max_window(horizon)));
  d.lo = static_cast<int>(rng.uniform_int(0, horizon - d.len));
  d.proportion = std::clamp(rng.normal(ld, ld / 4), 0.0, 1.0);
  d.rest = static_cast<int>(std::floor(d.proportion * d.len + 0.5));
  return d;
}

inline int rest_target(const GenParams &p) { return static_cast<int>(std::ceil(p.gd * p.horizon)); }

/// Expected rest of one draw: with p ~ N(ld, ld/4) clamped and rest =
/// floor(pL + 1/2), P(rest >= r) = P(p >= (r - 1/2) / L), averaged over L.
inline double expected_rest_per_draw(int horizon, double ld) {
  const int lmax = max_window(horizon);
  const double sd = ld / 4;
  double sum = 0;
  for (int len = 3; len <= lmax; ++len)
    for (int r = 1; r <= len; ++r) {
      double x = (r - 0.5) / len;
      sum += 0.5 * std::erfc((x - ld) / (sd * std::sqrt(2.0)));
    }
  return sum / (lmax - 2);
}

/// Appends randomized MaxW constraints to a base instance: per operator,
/// draw windows until the accumulated required rest reaches ceil(gd * H).
/// Zero-rest draws are emitted as vacuous constraints and do not count.
/// Gives up after 10x the expected number of draws, or at once when that
/// number exceeds 10^5.
inline Instance generate_maxw(const Instance &base, const GenParams &params) {
  params.validate();
  if (!base.maxw.empty())
    throw std::invalid_argument("base instance already has MaxW constraints");
  Instance out = base;
  const int target = rest_target(params);
  const double per_draw = expected_rest_per_draw(params.horizon, params.ld);
  const double expected = per_draw > 0 ? std::ceil(target / per_draw) : 1e18;
  if (expected > 1e5)
    throw GenerationError("seed " + std::to_string(params.seed) + ": about " + std::to_string(expected) +
                          " draws per operator expected for ld=" + format_density(params.ld) +
                          " and horizon " + std::to_string(params.horizon));
  const long long draw_cap = static_cast<long long>(10 * std::max(1.0, expected));
  SplitMix64 root(params.seed);
  for (int k = 0; k < base.num_operators; ++k) {
    SplitMix64 rng = root.split(static_cast<std::uint64_t>(k));
    int acc = 0;
    for (long long draws = 0; acc < target; ++draws) {
      if (draws >= draw_cap)
        throw GenerationError("seed " + std::to_string(params.seed) + ": operator " + std::to_string(k) +
                              " reached the draw cap of " + std::to_string(draw_cap) + " with rest " +
                              std::to_string(acc) + "/" + std::to_string(target));
      auto d = draw_maxw(rng, params.horizon, params.ld);
      out.maxw.push_back({k, d.len - d.rest, d.lo, d.lo + d.len});
      acc += d.rest;
    }
  }
  return out;
}

//! Makespan of the serial greedy schedule with no MaxW constraints.
inline int default_horizon(const Instance &base) {
  Instance plain = base;
  plain.maxw.clear();
  return initial_upper_bound(plain, SubintervalPlan{}).ub;
}

struct ManifestRow {
  std::string instance; // file name relative to the manifest
  double gd{0};
  double ld{0};
  std::uint64_t seed{0};
  int num_constraints{0};
  int total_required_rest{0};
};

inline std::uint64_t instance_seed(const std::string &base, double gd, double ld, std::uint64_t master) {
  return SplitMix64::mix(fnv1a(base + "|" + format_density(gd) + "|" + format_density(ld) + "|" +
                               std::to_string(master)));
}

inline const std::vector<std::pair<double, double>> &density_grid() {
  static const std::vector<std::pair<double, double>> grid = [] {
    std::vector<std::pair<double, double>> g;
    for (double gd : {0.1, 0.25, 0.4})
      for (double ld : {0.1, 0.25, 0.4})
        g.emplace_back(gd, ld);
    return g;
  }();
  return grid;
}

inline const char *manifest_header() { return "instance,gd,ld,seed,num_constraints,total_required_rest"; }

/// Writes one augmented instance per (base, density pair) into `dir`
/// together with `manifest.csv`. `horizon` = 0 uses default_horizon(),
/// raised to the generator minimum of 15.
inline std::vector<ManifestRow> generate_suite(const std::vector<Instance> &bases,
                                               const std::vector<std::pair<double, double>> &grid,
                                               std::uint64_t master_seed, const std::filesystem::path &dir,
                                               int horizon = 0) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestRow> rows;
  for (const auto &base : bases) {
    int h = horizon > 0 ? horizon : std::max(15, default_horizon(base));
    for (auto [gd, ld] : grid) {
      GenParams p{gd, ld, instance_seed(base.name, gd, ld, master_seed), h};
      Instance inst = generate_maxw(base, p);
      inst.name = base.name + "_gd" + format_density(gd) + "_ld" + format_density(ld);
      std::string file = inst.name + ".txt";
      save_instance(dir / file, inst);
      ManifestRow row{file, gd, ld, p.seed, static_cast<int>(inst.maxw.size()), 0};
      for (const auto &c : inst.maxw)
        row.total_required_rest += required_rest(c);
      rows.push_back(row);
    }
  }
  std::ofstream m(dir / "manifest.csv");
  if (!m)
    throw std::runtime_error("cannot write " + (dir / "manifest.csv").string());
  m << manifest_header() << "\n";
  for (const auto &r : rows)
    m << r.instance << "," << format_density(r.gd) << "," << format_density(r.ld) << "," << r.seed << ","
      << r.num_constraints << "," << r.total_required_rest << "\n";
  return rows;
}

inline std::vector<ManifestRow> read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("instance,gd,ld,seed", 0) != 0)
    throw ParseError(path.string() + ": missing manifest header");
  std::vector<ManifestRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank(line))
      continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      f.push_back(cell);
    if (f.size() != 6)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 6 fields");
    try {
      rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), std::stoull(f[3]), std::stoi(f[4]), std::stoi(f[5])});
    } catch (const std::logic_error &) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

/// Classical random job-shop base: every job visits every operator once in
/// a random order, durations uniform in [1, max_duration].
inline Instance random_jobshop(int jobs, int operators, int max_duration, std::uint64_t seed,
                               std::string name = "") {
  SplitMix64 rng(seed);
  RawInstance raw;
  raw.name = name.empty() ? "js" + std::to_string(jobs) + "x" + std::to_string(operators) + "_" + std::to_string(seed)
                          : std::move(name);
  raw.num_operators = operators;
  for (int j = 0; j < jobs; ++j) {
    std::vector<int> perm(operators);
    for (int k = 0; k < operators; ++k)
      perm[k] = k;
    for (int k = operators - 1; k > 0; --k)
      std::swap(perm[k], perm[rng.uniform_int(0, k)]);
    auto &job = raw.jobs.emplace_back();
    for (int k : perm)
      job.emplace_back(k, static_cast<int>(rng.uniform_int(1, max_duration)));
  }
  return validate_instance(raw);
}

} // namespace maxw

#endif
