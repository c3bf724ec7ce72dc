#ifndef MAXW_IO_HPP
#define MAXW_IO_HPP

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jps.hpp"
#include "model.hpp"

namespace maxw {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<long long> line_ints(const std::string &line, int lineno) {
  std::istringstream is(line);
  std::vector<long long> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != tok.size())
      throw ParseError("line " + std::to_string(lineno) + ": expected integer, got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

inline bool blank(const std::string &s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

} // namespace detail

/// Text format:
///   <num_jobs> <num_operators>
///   one line per job: <operator> <duration> pairs
///   MAXW <count>
///   <operator> <delta> <lo> <hi>   (count lines)
/// The MAXW section may be omitted (classical job-shop body only).
inline RawInstance parse_instance_text(std::istream &in, std::string name = "") {
  RawInstance raw;
  raw.name = std::move(name);
  std::string line;
  int lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!detail::blank(line))
        return true;
    }
    return false;
  };
  if (!next())
    throw ParseError("empty instance file");
  auto head = detail::line_ints(line, lineno);
  if (head.size() != 2 || head[0] < 0 || head[1] < 0)
    throw ParseError("line " + std::to_string(lineno) + ": expected '<num_jobs> <num_operators>'");
  raw.num_operators = static_cast<int>(head[1]);
  for (long long j = 0; j < head[0]; ++j) {
    if (!next())
      throw ParseError("unexpected end of file: job " + std::to_string(j) + " missing");
    auto v = detail::line_ints(line, lineno);
    if (v.size() % 2 != 0)
      throw ParseError("line " + std::to_string(lineno) + ": odd number of values in job line");
    auto &job = raw.jobs.emplace_back();
    for (std::size_t k = 0; k < v.size(); k += 2)
      job.emplace_back(static_cast<int>(v[k]), static_cast<int>(v[k + 1]));
  }
  if (!next())
    return raw;
  std::istringstream hs(line);
  std::string tag;
  long long count = -1;
  hs >> tag >> count;
  std::string rest;
  if (tag != "MAXW" || count < 0 || (hs >> rest))
    throw ParseError("line " + std::to_string(lineno) + ": expected 'MAXW <count>'");
  for (long long c = 0; c < count; ++c) {
    if (!next())
      throw ParseError("unexpected end of file: MaxW constraint " + std::to_string(c) + " missing");
    auto v = detail::line_ints(line, lineno);
    if (v.size() != 4)
      throw ParseError("line " + std::to_string(lineno) + ": expected '<operator> <delta> <lo> <hi>'");
    raw.maxw.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                        static_cast<int>(v[3])});
  }
  if (next())
    throw ParseError("line " + std::to_string(lineno) + ": trailing content");
  return raw;
}

inline void write_instance_text(std::ostream &os, const Instance &inst) {
  os << inst.jobs.size() << " " << inst.num_operators << "\n";
  for (const auto &job : inst.jobs) {
    for (std::size_t j = 0; j < job.size(); ++j)
      os << (j ? " " : "") << job[j].op << " " << job[j].duration;
    os << "\n";
  }
  os << "MAXW " << inst.maxw.size() << "\n";
  for (const auto &c : inst.maxw)
    os << c.op << " " << c.delta << " " << c.lo << " " << c.hi << "\n";
}

inline nlohmann::json instance_to_json(const Instance &inst) {
  nlohmann::json j;
  j["name"] = inst.name;
  j["num_operators"] = inst.num_operators;
  j["jobs"] = nlohmann::json::array();
  for (const auto &job : inst.jobs) {
    auto arr = nlohmann::json::array();
    for (const auto &t : job)
      arr.push_back({{"operator", t.op}, {"duration", t.duration}});
    j["jobs"].push_back(arr);
  }
  j["maxw"] = nlohmann::json::array();
  for (const auto &c : inst.maxw)
    j["maxw"].push_back({{"operator", c.op}, {"delta", c.delta}, {"lo", c.lo}, {"hi", c.hi}});
  return j;
}

inline RawInstance instance_from_json(const nlohmann::json &j, std::string name = "") {
  try {
    RawInstance raw;
    raw.name = j.contains("name") ? j.at("name").get<std::string>() : std::move(name);
    raw.num_operators = j.at("num_operators").get<int>();
    for (const auto &job : j.at("jobs")) {
      auto &r = raw.jobs.emplace_back();
      for (const auto &t : job)
        r.emplace_back(t.at("operator").get<int>(), t.at("duration").get<int>());
    }
    if (j.contains("maxw"))
      for (const auto &c : j.at("maxw"))
        raw.maxw.push_back(
            {c.at("operator").get<int>(), c.at("delta").get<int>(), c.at("lo").get<int>(), c.at("hi").get<int>()});
    return raw;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("bad instance JSON: ") + e.what());
  }
}

//! Reads a text or JSON (by `.json` extension) instance and validates it.
inline Instance load_instance(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open " + path.string());
  std::string name = path.stem().string();
  RawInstance raw;
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    raw = instance_from_json(j, name);
  } else {
    raw = parse_instance_text(in, name);
  }
  return validate_instance(raw);
}

inline void save_instance(const std::filesystem::path &path, const Instance &inst) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  if (path.extension() == ".json")
    out << instance_to_json(inst).dump(2) << "\n";
  else
    write_instance_text(out, inst);
}

// Cell tags: "W<job>.<pos>" work, "R<q>" rest, "." idle.
inline std::string cell_tag(const Cell &c, const Instance &inst) {
  switch (c.kind) {
  case CellKind::work:
    if (c.id >= 0 && c.id < static_cast<int>(inst.num_tasks()))
      return "W" + std::to_string(inst.tasks[c.id].job) + "." + std::to_string(inst.tasks[c.id].pos);
    return "W?" + std::to_string(c.id);
  case CellKind::rest:
    return "R" + std::to_string(c.id);
  case CellKind::idle:
    break;
  }
  return ".";
}

inline Cell parse_cell_tag(const std::string &tag, const Instance &inst) {
  if (tag == ".")
    return Cell::idle();
  try {
    if (tag.size() > 1 && tag[0] == 'R')
      return Cell::rest(std::stoi(tag.substr(1)));
    if (tag.size() > 1 && tag[0] == 'W') {
      auto dot = tag.find('.');
      if (dot == std::string::npos)
        throw ParseError("bad cell tag '" + tag + "'");
      int job = std::stoi(tag.substr(1, dot - 1));
      int pos = std::stoi(tag.substr(dot + 1));
      if (job < 0 || job >= static_cast<int>(inst.jobs.size()) || pos < 0 ||
          pos >= static_cast<int>(inst.jobs[job].size()))
        return Cell::work(-1);
      return Cell::work(inst.flat(job, pos));
    }
  } catch (const std::logic_error &) {
  }
  throw ParseError("bad cell tag '" + tag + "'");
}

inline nlohmann::json schedule_to_json(const ShiftSchedule &s, const Instance &inst,
                                       std::optional<int> cmax = std::nullopt) {
  nlohmann::json j;
  j["horizon"] = s.horizon;
  j["makespan"] = s.makespan();
  if (cmax)
    j["cmax"] = *cmax;
  j["operators"] = nlohmann::json::array();
  for (const auto &row : s.cells) {
    auto arr = nlohmann::json::array();
    for (const auto &c : row)
      arr.push_back(cell_tag(c, inst));
    j["operators"].push_back(arr);
  }
  return j;
}

struct LoadedSchedule {
  ShiftSchedule schedule;
  std::optional<int> cmax;
};

inline LoadedSchedule schedule_from_json(const nlohmann::json &j, const Instance &inst) {
  try {
    LoadedSchedule out;
    out.schedule.horizon = j.at("horizon").get<int>();
    if (j.contains("cmax"))
      out.cmax = j.at("cmax").get<int>();
    for (const auto &row : j.at("operators")) {
      auto &r = out.schedule.cells.emplace_back();
      for (const auto &tag : row)
        r.push_back(parse_cell_tag(tag.get<std::string>(), inst));
    }
    return out;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("bad schedule JSON: ") + e.what());
  }
}

inline char job_letter(int job) {
  static const char *letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  return job < 36 ? letters[job] : '#';
}

//! One row per operator, one character per shift: job letter, 'r' or '.'.
inline std::string gantt(const ShiftSchedule &s, const Instance &inst) {
  std::ostringstream os;
  int width = static_cast<int>(std::to_string(std::max(0, s.num_operators() - 1)).size());
  for (int k = 0; k < s.num_operators(); ++k) {
    std::string label = std::to_string(k);
    os << "op" << std::string(width - label.size(), ' ') << label << " |";
    for (const auto &c : s.cells[k]) {
      if (c.kind == CellKind::work)
        os << (c.id >= 0 && c.id < static_cast<int>(inst.num_tasks()) ? job_letter(inst.tasks[c.id].job) : '?');
      else
        os << (c.kind == CellKind::rest ? 'r' : '.');
    }
    os << "|\n";
  }
  return os.str();
}

} // namespace maxw

#endif
