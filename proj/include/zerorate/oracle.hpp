#pragma once

// Brute-force reference model. Allocations are rebuilt from explicit user
// choice sets (sticky users see every pair, elastic users see only the
// zero-rated pairs when any exist) instead of the closed-form shares, and
// equilibria are re-checked by recomputing every single-cell deviation.
// Nothing here calls allocate(), payoffs() or the equilibrium search.

#include <optional>
#include <string>
#include <vector>

#include "zerorate/market.hpp"

namespace zr::oracle {

struct ChoiceSet {
  std::vector<ChoicePair> pairs;
};

ChoiceSet sticky_choice_set(const MarketConfig& config);
ChoiceSet elastic_choice_set(const MarketConfig& config, const StrategyMatrix& theta);

struct OracleAllocation {
  std::size_t aux_rows = 0;
  std::size_t isp_columns = 0;
  std::vector<double> rho;          // aux_rows x isp_columns
  std::vector<double> x_effective;  // n_cps x isp_columns

  double rho_at(std::size_t aux, std::size_t isp_column) const { return rho[aux * isp_columns + isp_column]; }
  double effective_at(int cp, std::size_t isp_column) const {
    return x_effective[static_cast<std::size_t>(cp) * isp_columns + isp_column];
  }
};

OracleAllocation oracle_allocate(const MarketConfig& config, const StrategyMatrix& theta);

struct OraclePayoffs {
  std::vector<double> cp_utility;
  std::vector<double> isp_revenue;
};

OraclePayoffs oracle_payoffs(const MarketConfig& config, const StrategyMatrix& theta);

struct OracleVerdict {
  bool is_zre = true;
  std::optional<std::string> violation;  // names the first profitable deviation
};

OracleVerdict oracle_verify_zre(const MarketConfig& config, const StrategyMatrix& theta);

}  // namespace zr::oracle
