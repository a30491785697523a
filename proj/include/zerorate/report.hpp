#pragma once

// Serializers for sweep results. Numbers use 12 significant digits and the
// column layout is fixed:
//
// grid.csv
//   p_1..p_M, theta, dU_1..dU_N, dshare_1..dshare_N, dHHI, pressure_1..pressure_N
//   theta is the row-major bitstring of the selected equilibrium or NOZRE.
//   Discount-game sweeps add delta_1..delta_M after the prices (the discounts
//   in force, empty when the cell has no discount equilibrium).
//
// discounts.csv (discount-game mode)
//   Duopolies: a matrix with p_2 down the rows and p_1 across the columns;
//   each cell holds "delta_1,delta_2" or NONE. Other sizes use the long form.
// discounts_long.csv
//   p_1..p_M, delta_1..delta_M, theta, status

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "zerorate/analysis.hpp"
#include "zerorate/scenario.hpp"

namespace zr {

// %.12g with negative zero printed as 0.
std::string format_number(double value);

void write_grid_csv(std::ostream& out, const MarketConfig& market, std::span<const SweepRecord> records,
                    bool with_deltas = false);
void write_summary_json(std::ostream& out, const Scenario& scenario, std::span<const SweepRecord> records);
void write_discounts_long_csv(std::ostream& out, const MarketConfig& market, std::span<const DiscountRecord> records);
void write_discount_table_csv(std::ostream& out, const Scenario& scenario, std::span<const DiscountRecord> records);

struct SweepArtifacts {
  std::vector<std::filesystem::path> written;
};

// Runs the scenario's sweep and writes every artifact into out_dir.
SweepArtifacts run_sweep(const Scenario& scenario, const std::filesystem::path& out_dir, int workers);

}  // namespace zr
