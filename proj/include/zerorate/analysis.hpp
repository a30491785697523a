#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zerorate/equilibrium.hpp"
#include "zerorate/market.hpp"

namespace zr {

// Threshold separating "no change" from a directional change in aggregates.
inline constexpr double kSignTolerance = 1e-12;

// Effective-user share of each actual CP among actual CPs, counting every ISP
// column (the dummy ISP included).
std::vector<double> cp_shares(const MarketConfig& config, const StrategyMatrix& theta);

// Sum of squared normalized shares. Throws std::domain_error when every raw
// share is zero.
double hhi_from_shares(std::span<const double> raw_shares);
double hhi(const MarketConfig& config, const StrategyMatrix& theta);

struct HhiForms {
  double sum_of_squares = 0.0;
  double mean_variance = 0.0;  // 1/N + N * variance of normalized shares
};

HhiForms hhi_variance_identity(std::span<const double> raw_shares);

struct SweepRecord {
  std::vector<double> prices;
  std::vector<double> deltas;  // discounts in force for this cell
  std::optional<StrategyMatrix> selected;  // empty when no ZRE exists
  std::vector<double> delta_utility;
  std::vector<double> delta_share;
  double delta_hhi = 0.0;
  std::vector<bool> pressure;
  bool discount_found = true;  // false only in discount-game cells without an equilibrium
};

// Selected-ZRE world minus the world without zero-rating. With no ZRE every
// delta is exactly zero.
SweepRecord compare_worlds(const MarketConfig& config);

// Same comparison for an already-enumerated equilibrium set.
SweepRecord compare_worlds(const MarketConfig& config, const ZreResult& zre);

// One record per Cartesian grid point, ISP 0's price varying slowest.
// `workers` <= 0 uses the hardware concurrency.
std::vector<SweepRecord> grid_sweep(const MarketConfig& market, std::span<const std::vector<double>> price_grid,
                                    int workers = 0);

struct DiscountRecord {
  std::vector<double> prices;
  DiscountOutcome outcome;
  SweepRecord comparison;
};

std::vector<DiscountRecord> discount_sweep(const MarketConfig& market, std::span<const std::vector<double>> price_grid,
                                           std::span<const double> delta_grid, int workers = 0);

enum class Sign { Down = -1, Flat = 0, Up = 1 };

Sign classify(double value);
char sign_symbol(Sign s);  // '+', '-', '0'

struct AggregateSummary {
  std::size_t records = 0;
  std::vector<double> mean_delta_utility;
  std::vector<double> mean_delta_share;
  std::vector<Sign> utility_sign;
  std::vector<Sign> share_sign;
};

AggregateSummary aggregate_signs(std::span<const SweepRecord> records);

// Cartesian grid points in sweep order.
std::vector<std::vector<double>> grid_points(std::span<const std::vector<double>> price_grid);

}  // namespace zr
