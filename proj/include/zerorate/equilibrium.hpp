#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "zerorate/market.hpp"
#include "zerorate/payoff.hpp"

namespace zr {

// A payoff change must exceed this to count as a gain; smaller differences
// are floating-point noise and favour staying put.
inline constexpr double kGainTolerance = 1e-12;

// Largest strategy matrix (in cells) the exhaustive search accepts.
inline constexpr int kMaxEnumerationCells = 20;

struct Cell {
  int cp = 0;
  int isp = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Cells clamped to 1: an ISP with price 0 zero-rates every CP.
std::vector<Cell> forced_cells(const MarketConfig& config);
bool is_forced(const MarketConfig& config, int cp, int isp);
bool respects_forced(const MarketConfig& config, const StrategyMatrix& theta);
StrategyMatrix apply_forced(const MarketConfig& config, StrategyMatrix theta);

struct Deviation {
  Cell cell;
  bool establish = false;  // 0 -> 1 when true, 1 -> 0 otherwise
  double cp_gain = 0.0;
  double isp_gain = 0.0;
};

// Stability of a single cell under bilateral consent: either side may cancel
// a zero-rating deal, but a new deal needs both sides to strictly gain.
bool deviation_is_profitable(const Deviation& d);

// First profitable single-cell deviation from theta in row-major order.
std::optional<Deviation> find_profitable_deviation(const MarketConfig& config, const StrategyMatrix& theta);

// Throws std::invalid_argument when theta leaves a forced cell at 0.
bool is_zre(const MarketConfig& config, const StrategyMatrix& theta);

enum class ZreStatus { EquilibriaFound, NoZre };

struct ZreResult {
  ZreStatus status = ZreStatus::NoZre;
  std::vector<StrategyMatrix> all_zre;  // ascending binary encoding
  std::optional<StrategyMatrix> selected;
  std::vector<bool> pressure;  // per CP; all false when no ZRE
};

ZreResult enumerate_zre(const MarketConfig& config);

// Highest q wins; equal values resolve to the higher index.
int highest_value_cp(const MarketConfig& config);

// Most zero-rated cells, then most cells in the highest-value CP's row, then
// most cells in the last ISP's column, then lowest binary encoding.
StrategyMatrix select_zre(const MarketConfig& config, std::span<const StrategyMatrix> all_zre);

// CP `cp`'s utility-maximizing row with every other cell of theta held
// fixed. Forced cells stay at 1; ties prefer fewer zero-rated cells.
StrategyMatrix best_response_row(const MarketConfig& config, const StrategyMatrix& theta, int cp);

// Zero-rating pressure per CP for a selected equilibrium. A CP is under
// pressure when it zero-rates (non-forced) with some ISP that it would drop
// if every other CP stopped zero-rating.
std::vector<bool> detect_pressure(const MarketConfig& config, const StrategyMatrix& selected);

enum class DynamicsStatus { FixedPoint, Cycle, Inconclusive };

struct DynamicsTrace {
  DynamicsStatus status = DynamicsStatus::Inconclusive;
  std::vector<StrategyMatrix> visited;  // start profile first, then one entry per move
  int steps = 0;
  // For cycles: index into `visited` where the repeated profile first appeared.
  std::size_t cycle_start = 0;
};

// Round-robin improving moves: CP rows first, then ISP columns. Each agent
// applies its single most profitable cell flip per turn (establishing needs
// the counterpart's strict gain too). A round without moves is a fixed point.
DynamicsTrace best_response_dynamics(const MarketConfig& config, const StrategyMatrix& start, int max_steps);

enum class DiscountStatus { Found, NoDiscountEquilibrium };

struct DiscountOutcome {
  DiscountStatus status = DiscountStatus::NoDiscountEquilibrium;
  std::vector<double> delta_star;
  ZreResult zre;  // under delta_star
  std::vector<std::vector<double>> equilibria;  // every qualifying profile, grid order
};

std::vector<double> default_delta_grid();

// Largest discount-grid profile count accepted by discount_equilibrium.
inline constexpr std::size_t kMaxDiscountProfiles = 20000;

// Discount-setting game between ISPs. Each discount profile is evaluated at
// its own selected ZRE; deviations that admit no ZRE are ignored. The config's
// own delta is ignored.
DiscountOutcome discount_equilibrium(const MarketConfig& config, std::span<const double> delta_grid);

}  // namespace zr
