#include "zerorate/oracle.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace zr::oracle {

namespace {

std::set<int> members(std::size_t mask, int n_cps) {
  std::set<int> out;
  for (int i = 0; i < n_cps; ++i) {
    if (mask & (std::size_t{1} << i)) out.insert(i);
  }
  return out;
}

bool bundle_zero_rated(const StrategyMatrix& theta, std::size_t mask, std::size_t column) {
  if (column == 0) return false;
  const std::set<int> bundle = members(mask, theta.n_cps());
  if (bundle.empty()) return false;
  for (int cp : bundle) {
    if (!theta.at(cp, static_cast<int>(column) - 1)) return false;
  }
  return true;
}

}  // namespace

ChoiceSet sticky_choice_set(const MarketConfig& config) {
  ChoiceSet set;
  for (std::size_t s = 0; s < config.aux_count(); ++s) {
    for (std::size_t j = 0; j < config.isp_columns(); ++j) {
      set.pairs.push_back({AuxIndex{static_cast<std::uint32_t>(s)}, static_cast<int>(j)});
    }
  }
  return set;
}

ChoiceSet elastic_choice_set(const MarketConfig& config, const StrategyMatrix& theta) {
  ChoiceSet set;
  for (std::size_t s = 0; s < config.aux_count(); ++s) {
    for (std::size_t j = 0; j < config.isp_columns(); ++j) {
      if (bundle_zero_rated(theta, s, j)) set.pairs.push_back({AuxIndex{static_cast<std::uint32_t>(s)}, static_cast<int>(j)});
    }
  }
  if (set.pairs.empty()) return sticky_choice_set(config);
  return set;
}

OracleAllocation oracle_allocate(const MarketConfig& config, const StrategyMatrix& theta) {
  const ChoiceSet sticky = sticky_choice_set(config);
  const ChoiceSet elastic = elastic_choice_set(config, theta);

  OracleAllocation out;
  out.aux_rows = config.aux_count();
  out.isp_columns = config.isp_columns();
  out.rho.assign(out.aux_rows * out.isp_columns, 0.0);
  for (std::size_t s = 0; s < out.aux_rows; ++s) {
    for (std::size_t j = 0; j < out.isp_columns; ++j) {
      const ChoicePair pair{AuxIndex{static_cast<std::uint32_t>(s)}, static_cast<int>(j)};
      const double sticky_share = choice_probability(sticky.pairs, pair, config);
      const double elastic_share = choice_probability(elastic.pairs, pair, config);
      out.rho[s * out.isp_columns + j] = (1.0 - config.alpha) * sticky_share + config.alpha * elastic_share;
    }
  }

  out.x_effective.assign(static_cast<std::size_t>(config.n_cps) * out.isp_columns, 0.0);
  for (std::size_t s = 0; s < out.aux_rows; ++s) {
    for (int cp : members(s, config.n_cps)) {
      for (std::size_t j = 0; j < out.isp_columns; ++j) {
        out.x_effective[static_cast<std::size_t>(cp) * out.isp_columns + j] +=
            out.rho[s * out.isp_columns + j] * config.total_users;
      }
    }
  }
  return out;
}

OraclePayoffs oracle_payoffs(const MarketConfig& config, const StrategyMatrix& theta) {
  const OracleAllocation users = oracle_allocate(config, theta);
  OraclePayoffs out;
  out.cp_utility.assign(static_cast<std::size_t>(config.n_cps), 0.0);
  out.isp_revenue.assign(static_cast<std::size_t>(config.n_isps), 0.0);
  for (int j = 0; j < config.n_isps; ++j) {
    const double price = config.p[static_cast<std::size_t>(j)];
    const double sponsored_price = config.delta[static_cast<std::size_t>(j)] * price;
    for (int i = 0; i < config.n_cps; ++i) {
      const double x = users.effective_at(i, static_cast<std::size_t>(j) + 1);
      const double q = config.q[static_cast<std::size_t>(i)];
      const bool sponsored = theta.at(i, j);
      out.cp_utility[static_cast<std::size_t>(i)] += sponsored ? (q - sponsored_price) * x : config.c * q * x;
      out.isp_revenue[static_cast<std::size_t>(j)] += sponsored ? sponsored_price * x : config.c * price * x;
    }
  }
  return out;
}

OracleVerdict oracle_verify_zre(const MarketConfig& config, const StrategyMatrix& theta) {
  constexpr double kNoise = 1e-12;
  for (int j = 0; j < config.n_isps; ++j) {
    for (int i = 0; i < config.n_cps; ++i) {
      if (config.p[static_cast<std::size_t>(j)] == 0.0 && !theta.at(i, j)) {
        throw std::invalid_argument("profile leaves a zero-price ISP cell unset");
      }
    }
  }

  const OraclePayoffs here = oracle_payoffs(config, theta);
  for (int i = 0; i < config.n_cps; ++i) {
    for (int j = 0; j < config.n_isps; ++j) {
      if (config.p[static_cast<std::size_t>(j)] == 0.0) continue;
      StrategyMatrix alt = theta;
      alt.set(i, j, !theta.at(i, j));
      const OraclePayoffs there = oracle_payoffs(config, alt);
      const double cp_delta = there.cp_utility[static_cast<std::size_t>(i)] - here.cp_utility[static_cast<std::size_t>(i)];
      const double isp_delta = there.isp_revenue[static_cast<std::size_t>(j)] - here.isp_revenue[static_cast<std::size_t>(j)];

      std::ostringstream why;
      if (theta.at(i, j)) {
        if (cp_delta > kNoise) why << "CP " << i + 1 << " gains " << cp_delta << " by cancelling with ISP " << j + 1;
        else if (isp_delta > kNoise) why << "ISP " << j + 1 << " gains " << isp_delta << " by cancelling with CP " << i + 1;
      } else if (cp_delta > kNoise && isp_delta > kNoise) {
        why << "CP " << i + 1 << " and ISP " << j + 1 << " both gain by zero-rating (" << cp_delta << ", " << isp_delta
            << ")";
      }
      if (!why.str().empty()) return {false, why.str()};
    }
  }
  return {};
}

}  // namespace zr::oracle
