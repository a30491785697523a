#pragma once

// Randomized property drivers shared by the unit tests and the acceptance
// binary. Each returns the worst deviation it saw so callers can both assert
// and report.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "zerorate/analysis.hpp"
#include "zerorate/equilibrium.hpp"
#include "zerorate/oracle.hpp"

namespace zr::testing {

struct PropertyStats {
  std::size_t samples = 0;
  double max_error = 0.0;
  std::size_t mismatches = 0;
};

// HHI variance identity and endpoint equality over random 2-3 CP, 1-3 ISP markets.
inline PropertyStats hhi_identities(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyStats stats;
  for (std::size_t k = 0; k < samples; ++k) {
    const MarketConfig m = random_config(rng, 2, 3, 1, 3);
    const StrategyMatrix theta = random_theta(m.n_cps, m.n_isps, rng);
    const AllocationTable table = allocate(m, theta);
    std::vector<double> raw;
    for (int i = 0; i < m.n_cps; ++i) raw.push_back(table.cp_total(i));
    const HhiForms forms = hhi_variance_identity(raw);
    const double variance_gap = std::abs(forms.sum_of_squares - forms.mean_variance);
    const double endpoint_gap =
        std::abs(hhi(m, StrategyMatrix::zeros(m.n_cps, m.n_isps)) - hhi(m, StrategyMatrix::ones(m.n_cps, m.n_isps)));
    stats.max_error = std::max({stats.max_error, variance_gap, endpoint_gap});
    ++stats.samples;
  }
  return stats;
}

// allocate vs oracle_allocate, entrywise.
inline PropertyStats allocation_equivalence(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyStats stats;
  for (std::size_t k = 0; k < samples; ++k) {
    const MarketConfig m = random_config(rng, 1, 3, 1, 3);
    const StrategyMatrix theta = random_theta(m.n_cps, m.n_isps, rng);
    const AllocationTable fast = allocate(m, theta);
    const oracle::OracleAllocation slow = oracle::oracle_allocate(m, theta);
    for (std::size_t s = 0; s < m.aux_count(); ++s) {
      for (std::size_t j = 0; j < m.isp_columns(); ++j) {
        stats.max_error = std::max(stats.max_error, std::abs(fast.rho(s, j) - slow.rho_at(s, j)));
      }
    }
    for (int i = 0; i < m.n_cps; ++i) {
      for (std::size_t j = 0; j < m.isp_columns(); ++j) {
        stats.max_error = std::max(stats.max_error, std::abs(fast.x_effective(i, j) - slow.effective_at(i, j)));
      }
    }
    ++stats.samples;
  }
  return stats;
}

// is_zre vs oracle_verify_zre verdicts. Profiles are forced-cell compliant.
inline PropertyStats verdict_agreement(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyStats stats;
  for (std::size_t k = 0; k < samples; ++k) {
    const MarketConfig m = random_config(rng, 1, 3, 1, 3);
    const StrategyMatrix theta = apply_forced(m, random_theta(m.n_cps, m.n_isps, rng));
    if (is_zre(m, theta) != oracle::oracle_verify_zre(m, theta).is_zre) ++stats.mismatches;
    ++stats.samples;
  }
  return stats;
}

// Merging providers with identical zero-rating profiles leaves every
// untouched pair alone and gives the merged pair the sum of its parts.
inline PropertyStats merge_additivity(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyStats stats;
  std::bernoulli_distribution coin(0.5);
  while (stats.samples < samples) {
    const MarketConfig m = random_config(rng, 1, 3, 1, 3);
    const bool merge_cp_side = coin(rng);
    const int count = merge_cp_side ? m.n_cps : m.n_isps;
    if (count < 2) continue;

    std::vector<int> ids;
    for (int k = 0; k < count; ++k) {
      if (coin(rng)) ids.push_back(k);
    }
    if (ids.size() < 2) continue;

    // Copy the first member's row (or column) onto the others.
    StrategyMatrix theta = random_theta(m.n_cps, m.n_isps, rng);
    for (int id : ids) {
      if (merge_cp_side) {
        for (int j = 0; j < m.n_isps; ++j) theta.set(id, j, theta.at(ids.front(), j));
      } else {
        for (int i = 0; i < m.n_cps; ++i) theta.set(i, id, theta.at(i, ids.front()));
      }
    }

    const AllocationTable before = allocate(m, theta);
    const MergedMarket merged = merge_cp_side ? merge_cps(m, theta, ids) : merge_isps(m, theta, ids);
    merged.config.validate();
    const AllocationTable after = allocate(merged.config, merged.theta);

    std::vector<double> expected(after.aux_rows() * after.isp_columns(), 0.0);
    for (std::size_t s = 0; s < m.aux_count(); ++s) {
      for (std::size_t j = 0; j < m.isp_columns(); ++j) {
        std::size_t row = s;
        std::size_t col = j;
        if (merge_cp_side) {
          row = merged_mask(static_cast<std::uint32_t>(s), ids, m.n_cps);
        } else if (j > 0) {
          // Columns after each removed ISP shift left.
          const int isp = static_cast<int>(j) - 1;
          const bool member = std::binary_search(ids.begin(), ids.end(), isp);
          const int target = member ? ids.front() : isp;
          const auto removed = std::count_if(ids.begin() + 1, ids.end(), [&](int id) { return id < target; });
          col = static_cast<std::size_t>(target - removed) + 1;
        }
        expected[row * after.isp_columns() + col] += before.rho(s, j);
      }
    }
    for (std::size_t r = 0; r < after.aux_rows(); ++r) {
      for (std::size_t c = 0; c < after.isp_columns(); ++c) {
        stats.max_error = std::max(stats.max_error, std::abs(after.rho(r, c) - expected[r * after.isp_columns() + c]));
      }
    }
    ++stats.samples;
  }
  return stats;
}

}  // namespace zr::testing
