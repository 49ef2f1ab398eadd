#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "csdk/acceptance.hpp"

// Runs every criterion, or just the ids given on the command line.
int main(int argc, char** argv) {
  using namespace csdk::acceptance;
  std::vector<Outcome> outcomes;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) {
      const Outcome o = run_criterion(std::atoi(argv[i]), Config{}, outcomes);
      std::cout << format_line(o) << std::endl;
      outcomes.push_back(o);
    }
  } else {
    outcomes = run_all(std::cout);
  }
  int failed = 0;
  for (const auto& o : outcomes) failed += o.pass ? 0 : 1;
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
