#pragma once

// Randomized property suites run by the `validate` command, plus the random
// field generators they share with the test programs.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "radcrit/domain.hpp"

namespace radcrit {

using Rng = std::mt19937_64;

/// Sum of 1-4 smooth bumps with random centers, widths and heights inside
/// the grid interval; zero at both ends.
Field random_compact_field(const GridPtr& grid, Rng& rng, double min_width = 0.05);

/// Discrete solution of Q'(v) = 0 with random positive boundary data;
/// strictly positive at every node when Q_V is coercive on the grid.
Field random_positive_solution(const RadialProblem& problem, const GridPtr& grid, Rng& rng);

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::size_t trials = 0;
  /// Worst value of the checked quantity (its meaning is suite specific).
  double worst = 0.0;
  std::string detail;
};

struct Suite {
  std::string name;
  std::string description;
};

/// Names and one-line descriptions of the built-in suites, in run order.
const std::vector<Suite>& validation_suites();

/// Runs one suite; `scale` multiplies the default trial counts.
SuiteResult run_suite(const std::string& name, std::uint64_t seed, double scale = 1.0);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed, double scale = 1.0);

}  // namespace radcrit
