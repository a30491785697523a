#include "zerorate/payoff.hpp"

#include <stdexcept>

namespace zr {

PayoffVector payoffs(const MarketConfig& config, const StrategyMatrix& theta) {
  return payoffs(config, theta, allocate(config, theta));
}

PayoffVector payoffs(const MarketConfig& config, const StrategyMatrix& theta, const AllocationTable& allocation) {
  if (theta.n_cps() != config.n_cps || theta.n_isps() != config.n_isps) {
    throw std::invalid_argument("strategy matrix dimensions do not match the market");
  }
  PayoffVector out;
  out.n_cps = config.n_cps;
  out.n_isps = config.n_isps;
  out.cp_utility.assign(static_cast<std::size_t>(config.n_cps), 0.0);
  out.isp_revenue.assign(static_cast<std::size_t>(config.n_isps), 0.0);
  out.per_pair_cp.assign(static_cast<std::size_t>(config.n_cps * config.n_isps), 0.0);
  out.per_pair_isp.assign(out.per_pair_cp.size(), 0.0);

  for (int i = 0; i < config.n_cps; ++i) {
    const double value = config.q[static_cast<std::size_t>(i)];
    for (int j = 0; j < config.n_isps; ++j) {
      const double price = config.p[static_cast<std::size_t>(j)];
      const double users = allocation.x_effective(i, static_cast<std::size_t>(j) + 1);
      double cp_part = 0.0;
      double isp_part = 0.0;
      if (theta.at(i, j)) {
        const double sponsored = config.delta[static_cast<std::size_t>(j)] * price;
        cp_part = (value - sponsored) * users;
        isp_part = sponsored * users;
      } else {
        cp_part = value * users * config.c;
        isp_part = price * users * config.c;
      }
      const auto k = static_cast<std::size_t>(i * config.n_isps + j);
      out.per_pair_cp[k] = cp_part;
      out.per_pair_isp[k] = isp_part;
      out.cp_utility[static_cast<std::size_t>(i)] += cp_part;
      out.isp_revenue[static_cast<std::size_t>(j)] += isp_part;
    }
  }
  return out;
}

}  // namespace zr
