#pragma once

// Run configuration: a `key = value` text file with `#` comments, one
// command per file. See README for the schema.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radcrit/domain.hpp"
#include "radcrit/solvers.hpp"

namespace radcrit {

enum class Command { eig, solve, critical, capacity, mingrowth, certify, validate };
std::string to_string(Command c);

/// One `key = value` line after comment stripping.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ScheduleConfig {
  std::string kind = "default";  // default | ball | punctured | half_line | log_punctured
  std::size_t levels = 12;
  double r1 = 2.0;
  double growth = 2.0;
  double rc = 1.0;
  std::size_t nodes_per_segment = 0;  // 0: command default
};

struct RunConfig {
  Command command = Command::eig;
  RadialProblem problem;
  ScheduleConfig schedule;
  SolverOptions solver;
  std::uint64_t seed = 1;
  std::string out = "radcrit-out";
  /// Entries in file order (overrides appended); source of the hash.
  std::vector<ConfigEntry> entries;
  /// Command-specific keys with the command prefix removed.
  std::map<std::string, ConfigEntry> params;

  ExhaustionSchedule make_schedule() const;
  /// FNV-1a of the canonical `key=value` lines.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  bool has(const std::string& key) const { return params.count(key) > 0; }
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string word(const std::string& key, const std::string& fallback) const;
  Interval interval(const std::string& key, const Interval& fallback) const;
  std::optional<Interval> interval(const std::string& key) const;
  /// Sum of all `command.key` terms, zero if none.
  PotentialSpec terms(const std::string& key) const;
};

/// Throws ConfigError with the offending line.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Applies a `key = value` override as if appended to the file.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Value grammar shared with the CLI.
double parse_number(const std::string& s, int line = 0);
Interval parse_interval(const std::string& s, int line = 0);
/// `zero`, `constant c`, `power c s`, `bump center radius height`,
/// `tabulated r:v r:v ...`
PotentialSpec parse_term(const std::string& s, int line = 0);

}  // namespace radcrit
