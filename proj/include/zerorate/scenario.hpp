#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zerorate/market.hpp"

namespace zr {

enum class ScenarioMode { FixedDelta, DiscountGame };

struct Scenario {
  std::string name;
  MarketConfig market;  // p is filled per grid cell
  std::vector<std::vector<double>> price_grid;  // one axis per ISP
  ScenarioMode mode = ScenarioMode::FixedDelta;
  std::vector<double> delta_grid;  // discount-game mode only
  std::string output_dir;
  std::optional<std::vector<std::vector<double>>> expected_no_zre;
};

// Schema or value error in a scenario document. `line` is 1-based, 0 when the
// location is unknown.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace zr
