#pragma once

#include <vector>

#include "zerorate/market.hpp"

namespace zr {

struct PayoffVector {
  int n_cps = 0;
  int n_isps = 0;
  std::vector<double> cp_utility;   // U_i, per actual CP
  std::vector<double> isp_revenue;  // R_j, per actual ISP
  std::vector<double> per_pair_cp;  // U_i^j, row-major n_cps x n_isps
  std::vector<double> per_pair_isp; // R_j^i, row-major n_cps x n_isps

  double cp_component(int cp, int isp) const { return per_pair_cp[static_cast<std::size_t>(cp * n_isps + isp)]; }
  double isp_component(int cp, int isp) const { return per_pair_isp[static_cast<std::size_t>(cp * n_isps + isp)]; }
};

// Utilities and revenues under theta. Users on the dummy ISP or dummy CP earn
// nothing; non-zero-rated components are discounted by the usage coefficient c.
PayoffVector payoffs(const MarketConfig& config, const StrategyMatrix& theta);
PayoffVector payoffs(const MarketConfig& config, const StrategyMatrix& theta, const AllocationTable& allocation);

}  // namespace zr
