#include "zerorate/analysis.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "zerorate/payoff.hpp"

namespace zr {

namespace {

// Runs body(k) for k in [0, count) on a small pool; results land by index so
// ordering never depends on completion order.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  std::size_t pool = workers > 0 ? static_cast<std::size_t>(workers) : std::thread::hardware_concurrency();
  pool = std::max<std::size_t>(1, std::min(pool, count));
  if (pool <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < pool; ++t) {
      threads.emplace_back([&] {
        for (std::size_t k = next++; k < count && !failed; k = next++) {
          try {
            body(k);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void check_grid(const MarketConfig& market, std::span<const std::vector<double>> price_grid) {
  if (price_grid.size() != static_cast<std::size_t>(market.n_isps)) {
    throw std::invalid_argument("price grid needs one value list per ISP");
  }
  for (const auto& axis : price_grid) {
    if (axis.empty()) throw std::invalid_argument("price grid axis is empty");
  }
}

}  // namespace

std::vector<double> cp_shares(const MarketConfig& config, const StrategyMatrix& theta) {
  const AllocationTable table = allocate(config, theta);
  std::vector<double> raw(static_cast<std::size_t>(config.n_cps));
  for (int i = 0; i < config.n_cps; ++i) raw[static_cast<std::size_t>(i)] = table.cp_total(i);
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (total <= 0.0) throw std::domain_error("no actual CP has effective users");
  for (double& v : raw) v /= total;
  return raw;
}

double hhi_from_shares(std::span<const double> raw_shares) {
  const double total = std::accumulate(raw_shares.begin(), raw_shares.end(), 0.0);
  if (raw_shares.empty() || total <= 0.0) throw std::domain_error("HHI needs at least one positive share");
  double sum = 0.0;
  for (double v : raw_shares) sum += (v / total) * (v / total);
  return sum;
}

double hhi(const MarketConfig& config, const StrategyMatrix& theta) {
  const AllocationTable table = allocate(config, theta);
  std::vector<double> raw(static_cast<std::size_t>(config.n_cps));
  for (int i = 0; i < config.n_cps; ++i) raw[static_cast<std::size_t>(i)] = table.cp_total(i);
  return hhi_from_shares(raw);
}

HhiForms hhi_variance_identity(std::span<const double> raw_shares) {
  HhiForms forms;
  forms.sum_of_squares = hhi_from_shares(raw_shares);
  const double total = std::accumulate(raw_shares.begin(), raw_shares.end(), 0.0);
  const auto n = static_cast<double>(raw_shares.size());
  const double mean = 1.0 / n;
  double variance = 0.0;
  for (double v : raw_shares) variance += (v / total - mean) * (v / total - mean);
  variance /= n;
  forms.mean_variance = 1.0 / n + variance * n;
  return forms;
}

SweepRecord compare_worlds(const MarketConfig& config) { return compare_worlds(config, enumerate_zre(config)); }

SweepRecord compare_worlds(const MarketConfig& config, const ZreResult& zre) {
  const auto n = static_cast<std::size_t>(config.n_cps);
  SweepRecord record;
  record.prices = config.p;
  record.deltas = config.delta;
  record.delta_utility.assign(n, 0.0);
  record.delta_share.assign(n, 0.0);
  record.pressure = zre.pressure;
  record.pressure.resize(n, false);
  if (!zre.selected) return record;

  record.selected = zre.selected;
  const StrategyMatrix none = StrategyMatrix::zeros(config.n_cps, config.n_isps);
  const PayoffVector with = payoffs(config, *zre.selected);
  const PayoffVector without = payoffs(config, none);
  const std::vector<double> share_with = cp_shares(config, *zre.selected);
  const std::vector<double> share_without = cp_shares(config, none);
  for (std::size_t i = 0; i < n; ++i) {
    record.delta_utility[i] = with.cp_utility[i] - without.cp_utility[i];
    record.delta_share[i] = share_with[i] - share_without[i];
  }
  record.delta_hhi = hhi_from_shares(share_with) - hhi_from_shares(share_without);
  return record;
}

std::vector<std::vector<double>> grid_points(std::span<const std::vector<double>> price_grid) {
  std::vector<std::vector<double>> points{{}};
  for (const auto& axis : price_grid) {
    std::vector<std::vector<double>> next;
    next.reserve(points.size() * axis.size());
    for (const auto& prefix : points) {
      for (double v : axis) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    }
    points = std::move(next);
  }
  return points;
}

std::vector<SweepRecord> grid_sweep(const MarketConfig& market, std::span<const std::vector<double>> price_grid,
                                    int workers) {
  check_grid(market, price_grid);
  const auto points = grid_points(price_grid);
  std::vector<SweepRecord> records(points.size());
  parallel_for(points.size(), workers, [&](std::size_t k) {
    MarketConfig cell = market;
    cell.p = points[k];
    cell.validate();
    records[k] = compare_worlds(cell);
  });
  return records;
}

std::vector<DiscountRecord> discount_sweep(const MarketConfig& market, std::span<const std::vector<double>> price_grid,
                                           std::span<const double> delta_grid, int workers) {
  check_grid(market, price_grid);
  const auto points = grid_points(price_grid);
  std::vector<DiscountRecord> records(points.size());
  parallel_for(points.size(), workers, [&](std::size_t k) {
    MarketConfig cell = market;
    cell.p = points[k];
    cell.validate();
    DiscountRecord& out = records[k];
    out.prices = points[k];
    out.outcome = discount_equilibrium(cell, delta_grid);
    if (out.outcome.status == DiscountStatus::Found) {
      cell.delta = out.outcome.delta_star;
      out.comparison = compare_worlds(cell, out.outcome.zre);
    } else {
      // No stable discount profile: report the market as if zero-rating
      // were unavailable.
      out.comparison = compare_worlds(cell, ZreResult{});
      out.comparison.discount_found = false;
    }
  });
  return records;
}

Sign classify(double value) {
  if (value > kSignTolerance) return Sign::Up;
  if (value < -kSignTolerance) return Sign::Down;
  return Sign::Flat;
}

char sign_symbol(Sign s) {
  switch (s) {
    case Sign::Up:
      return '+';
    case Sign::Down:
      return '-';
    case Sign::Flat:
      break;
  }
  return '0';
}

AggregateSummary aggregate_signs(std::span<const SweepRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate_signs needs at least one record");
  const std::size_t n = records.front().delta_utility.size();
  AggregateSummary summary;
  summary.records = records.size();
  summary.mean_delta_utility.assign(n, 0.0);
  summary.mean_delta_share.assign(n, 0.0);
  for (const SweepRecord& r : records) {
    if (r.delta_utility.size() != n) throw std::invalid_argument("records disagree on the number of CPs");
    for (std::size_t i = 0; i < n; ++i) {
      summary.mean_delta_utility[i] += r.delta_utility[i];
      summary.mean_delta_share[i] += r.delta_share[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    summary.mean_delta_utility[i] /= static_cast<double>(records.size());
    summary.mean_delta_share[i] /= static_cast<double>(records.size());
    summary.utility_sign.push_back(classify(summary.mean_delta_utility[i]));
    summary.share_sign.push_back(classify(summary.mean_delta_share[i]));
  }
  return summary;
}

}  // namespace zr
