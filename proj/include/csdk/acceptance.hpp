#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "csdk/matrix.hpp"

// End-to-end acceptance checks. Each criterion prints one line:
//   PASS <id> <description> | <measured worst case>
namespace csdk::acceptance {

struct Config {
  std::vector<index_t> sizes{30, 42, 60, 85, 120};
  int seeds = 3;
};

struct Outcome {
  int id = 0;
  bool pass = false;
  std::string description;
  std::string detail;
};

/// Runs one criterion (1..9). Criterion 9 depends on the outcomes of 2 and 3,
/// which it recomputes unless `earlier` already holds them.
Outcome run_criterion(int id, const Config& cfg, const std::vector<Outcome>& earlier = {});

/// Runs all criteria in order, printing each line to `out` as it finishes.
std::vector<Outcome> run_all(std::ostream& out, const Config& cfg = {});

std::string format_line(const Outcome& o);

}  // namespace csdk::acceptance
