#include "radcrit/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "radcrit/errors.hpp"
#include "radcrit/hash.hpp"

namespace radcrit {

std::string to_string(Command c) {
  switch (c) {
    case Command::eig: return "eig";
    case Command::solve: return "solve";
    case Command::critical: return "critical";
    case Command::capacity: return "capacity";
    case Command::mingrowth: return "mingrowth";
    case Command::certify: return "certify";
    case Command::validate: return "validate";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

const std::set<std::string> kGeneral = {"command", "p",      "d",         "domain",
                                        "center",  "potential", "seed",   "out",
                                        "schedule", "levels", "r1",        "growth",
                                        "rc",      "nodes_per_segment", "tol", "max_newton",
                                        "eps_start", "eps_end", "eps_factor"};

const std::set<std::string> kRepeatable = {"potential", "solve.source", "critical.probe",
                                           "certify.u"};

const std::map<std::string, std::set<std::string>>& command_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"eig", {"nodes", "spacing", "rel_tol"}},
      {"solve", {"nodes", "spacing", "left", "right", "source"}},
      {"critical", {"eps_crit", "probe", "positivity_weight"}},
      {"capacity", {"k", "cells"}},
      {"mingrowth",
       {"mode", "k", "trace_lo", "trace_hi", "window", "cauchy_tol", "x1", "fit_window",
        "exponent"}},
      {"certify", {"u", "omega2", "b", "samples", "sample_range"}},
      {"validate", {"scale", "suites"}},
  };
  return keys;
}

Command parse_command(const std::string& v, int line) {
  for (Command c : {Command::eig, Command::solve, Command::critical, Command::capacity,
                    Command::mingrowth, Command::certify, Command::validate})
    if (to_string(c) == v) return c;
  throw ConfigError("unknown command '" + v + "'", line);
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected true or false, got '" + v + "'", line);
}

std::size_t parse_count(const std::string& v, int line) {
  const double x = parse_number(v, line);
  if (!(x >= 0.0) || x != std::floor(x) || x > 1e12)
    throw ConfigError("expected a nonnegative integer, got '" + v + "'", line);
  return static_cast<std::size_t>(x);
}

void rebuild(RunConfig& c) {
  std::map<std::string, const ConfigEntry*> seen;
  c.params.clear();
  for (const auto& e : c.entries) {
    if (!kRepeatable.count(e.key) && seen.count(e.key))
      throw ConfigError("duplicate key '" + e.key + "' (first on line " +
                            std::to_string(seen[e.key]->line) + ")",
                        e.line);
    seen[e.key] = &e;
  }
  const auto need = [&](const std::string& k) -> const ConfigEntry& {
    auto it = seen.find(k);
    if (it == seen.end()) throw ConfigError("missing required key '" + k + "'");
    return *it->second;
  };

  const ConfigEntry& cmd = need("command");
  c.command = parse_command(cmd.value, cmd.line);
  const std::string prefix = to_string(c.command);
  const auto& allowed = command_keys().at(prefix);

  for (const auto& e : c.entries) {
    const auto dot = e.key.find('.');
    if (dot == std::string::npos) {
      if (!kGeneral.count(e.key)) throw ConfigError("unknown key '" + e.key + "'", e.line);
      continue;
    }
    const std::string head = e.key.substr(0, dot), tail = e.key.substr(dot + 1);
    auto it = command_keys().find(head);
    if (it == command_keys().end() || !it->second.count(tail))
      throw ConfigError("unknown key '" + e.key + "'", e.line);
    if (head != prefix)
      throw ConfigError("key '" + e.key + "' does not belong to command " + prefix, e.line);
    if (allowed.count(tail)) c.params[tail] = e;
  }

  RadialProblem& pr = c.problem;
  pr = RadialProblem{};
  const ConfigEntry& ep = need("p");
  pr.p = parse_number(ep.value, ep.line);
  if (!(pr.p > 1.0) || !std::isfinite(pr.p)) throw ConfigError("p must exceed 1", ep.line);
  const ConfigEntry& ed = need("d");
  pr.d = parse_number(ed.value, ed.line);
  if (!(pr.d >= 1.0) || pr.d != std::floor(pr.d) || pr.d > 1000)
    throw ConfigError("d must be a positive integer", ed.line);
  const ConfigEntry& edom = need("domain");
  pr.domain = parse_interval(edom.value, edom.line);
  pr.center = default_center(pr.domain, pr.d);
  if (auto it = seen.find("center"); it != seen.end())
    pr.center = parse_bool(it->second->value, it->second->line);
  pr.potential = PotentialSpec::zero();
  for (const auto& e : c.entries)
    if (e.key == "potential") pr.potential = pr.potential.plus(parse_term(e.value, e.line));
  try {
    pr.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what(), edom.line);
  }

  const auto num = [&](const std::string& k, double& dst) {
    if (auto it = seen.find(k); it != seen.end()) dst = parse_number(it->second->value, it->second->line);
  };
  const auto cnt = [&](const std::string& k, std::size_t& dst) {
    if (auto it = seen.find(k); it != seen.end()) dst = parse_count(it->second->value, it->second->line);
  };

  c.schedule = ScheduleConfig{};
  if (auto it = seen.find("schedule"); it != seen.end()) {
    static const std::set<std::string> kinds = {"default", "ball", "punctured", "half_line",
                                                "log_punctured"};
    if (!kinds.count(it->second->value))
      throw ConfigError("unknown schedule '" + it->second->value + "'", it->second->line);
    c.schedule.kind = it->second->value;
  }
  cnt("levels", c.schedule.levels);
  num("r1", c.schedule.r1);
  num("growth", c.schedule.growth);
  num("rc", c.schedule.rc);
  cnt("nodes_per_segment", c.schedule.nodes_per_segment);
  if (c.schedule.levels < 1) throw ConfigError("levels must be at least 1", seen["levels"]->line);

  c.solver = SolverOptions{};
  num("tol", c.solver.tol);
  num("eps_start", c.solver.eps_start);
  num("eps_end", c.solver.eps_end);
  num("eps_factor", c.solver.eps_factor);
  if (auto it = seen.find("max_newton"); it != seen.end())
    c.solver.max_newton = static_cast<int>(parse_count(it->second->value, it->second->line));
  if (c.solver.tol < 0.0 || !(c.solver.eps_factor > 1.0) ||
      !(c.solver.eps_end > 0.0 && c.solver.eps_end <= c.solver.eps_start))
    throw ConfigError("inconsistent solver tolerances");

  c.seed = 1;
  if (auto it = seen.find("seed"); it != seen.end()) {
    const std::string& v = it->second->value;
    char* end = nullptr;
    const unsigned long long s = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || v[0] == '-')
      throw ConfigError("seed must be an unsigned integer", it->second->line);
    c.seed = s;
  }
  c.out = "radcrit-out";
  if (auto it = seen.find("out"); it != seen.end()) c.out = it->second->value;

  // Referenced intervals must sit inside the domain.
  for (const char* k : {"k", "omega2", "b", "window", "fit_window", "sample_range"}) {
    auto it = c.params.find(k);
    if (it == c.params.end()) continue;
    const Interval iv = parse_interval(it->second.value, it->second.line);
    if (!pr.domain.contains(iv))
      throw ConfigError(std::string(k) + " lies outside the domain", it->second.line);
  }
  for (const auto& e : c.entries)
    if (kRepeatable.count(e.key) && e.key != "potential") parse_term(e.value, e.line);
  if (c.command == Command::eig || c.command == Command::solve) {
    if (!std::isfinite(pr.domain.hi))
      throw ConfigError("command " + prefix + " needs a bounded domain", edom.line);
  }
  if (c.command == Command::capacity && !c.has("k"))
    throw ConfigError("missing required key 'capacity.k'");
  if (c.command == Command::certify)
    for (const char* k : {"u", "omega2", "b"})
      if (!c.has(k)) throw ConfigError(std::string("missing required key 'certify.") + k + "'");
}

}  // namespace

double parse_number(const std::string& s, int line) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || std::isnan(x))
    throw ConfigError("expected a number, got '" + t + "'", line);
  return x;
}

Interval parse_interval(const std::string& s, int line) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw ConfigError("expected an interval 'lo, hi', got '" + s + "'", line);
  Interval iv{parse_number(s.substr(0, comma), line), parse_number(s.substr(comma + 1), line)};
  if (!(iv.lo < iv.hi)) throw ConfigError("empty interval '" + s + "'", line);
  return iv;
}

PotentialSpec parse_term(const std::string& s, int line) {
  const auto w = split_ws(s);
  if (w.empty()) throw ConfigError("empty term", line);
  const auto args = [&](std::size_t n) {
    if (w.size() != n + 1)
      throw ConfigError("term '" + w[0] + "' takes " + std::to_string(n) + " numbers", line);
    std::vector<double> a;
    for (std::size_t i = 1; i < w.size(); ++i) a.push_back(parse_number(w[i], line));
    return a;
  };
  try {
    if (w[0] == "zero") {
      args(0);
      return PotentialSpec::zero();
    }
    if (w[0] == "constant") return PotentialSpec::constant(args(1)[0]);
    if (w[0] == "power") {
      const auto a = args(2);
      return PotentialSpec::power(a[0], a[1]);
    }
    if (w[0] == "bump") {
      const auto a = args(3);
      return PotentialSpec::bump(a[0], a[1], a[2]);
    }
    if (w[0] == "tabulated") {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 1; i < w.size(); ++i) {
        const auto colon = w[i].find(':');
        if (colon == std::string::npos) throw ConfigError("tabulated samples are r:v pairs", line);
        pts.emplace_back(parse_number(w[i].substr(0, colon), line),
                         parse_number(w[i].substr(colon + 1), line));
      }
      return PotentialSpec::tabulated(std::move(pts));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what(), line);
  }
  throw ConfigError("unknown term kind '" + w[0] + "'", line);
}

RunConfig parse_config(std::istream& is) {
  RunConfig c;
  int n = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++n;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", n);
    ConfigEntry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), n};
    if (e.key.empty()) throw ConfigError("empty key", n);
    if (e.value.empty()) throw ConfigError("empty value for '" + e.key + "'", n);
    c.entries.push_back(std::move(e));
  }
  rebuild(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(is);
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  std::erase_if(config.entries, [&](const ConfigEntry& e) { return e.key == key; });
  config.entries.push_back({key, value, 0});
  rebuild(config);
}

ExhaustionSchedule RunConfig::make_schedule() const {
  const auto& s = schedule;
  if (s.kind == "ball") return ball_schedule(problem, s.levels, s.r1, s.growth);
  if (s.kind == "punctured") return punctured_schedule(problem, s.levels, s.rc);
  if (s.kind == "half_line") return half_line_schedule(problem, s.levels);
  if (s.kind == "log_punctured") return log_punctured_schedule(problem, s.levels, s.rc);
  return default_schedule(problem, s.levels);
}

std::uint64_t RunConfig::hash() const {
  std::string canon;
  for (const auto& e : entries) canon += e.key + "=" + e.value + "\n";
  return fnv1a64(canon);
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

double RunConfig::number(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_number(it->second.value, it->second.line);
}

std::size_t RunConfig::count(const std::string& key, std::size_t fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_count(it->second.value, it->second.line);
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_bool(it->second.value, it->second.line);
}

std::string RunConfig::word(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second.value;
}

Interval RunConfig::interval(const std::string& key, const Interval& fallback) const {
  return interval(key).value_or(fallback);
}

std::optional<Interval> RunConfig::interval(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return parse_interval(it->second.value, it->second.line);
}

PotentialSpec RunConfig::terms(const std::string& key) const {
  const std::string full = to_string(command) + "." + key;
  PotentialSpec out = PotentialSpec::zero();
  for (const auto& e : entries)
    if (e.key == full) out = out.plus(parse_term(e.value, e.line));
  return out;
}

}  // namespace radcrit
