#pragma once

#include <string>
#include <vector>

#include "zerorate/scenario.hpp"

namespace zr {

enum class CheckState { Pass, Fail, Skipped };

struct CheckResult {
  std::string name;
  CheckState state = CheckState::Pass;
  std::string detail;
};

// Invariant battery over every cell of the scenario's price grid, evaluated
// at the scenario's own discounts. Oracle checks cover every profile of each
// cell when the strategy matrix has at most `exhaustive_cells` cells and a
// fixed pseudo-random sample otherwise.
std::vector<CheckResult> run_verify(const Scenario& scenario, int workers, int exhaustive_cells = 10);

bool all_passed(const std::vector<CheckResult>& results);
const char* state_label(CheckState state);

}  // namespace zr
