#include "zerorate/equilibrium.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "zerorate/errors.hpp"

namespace zr {

namespace {

struct ProfilePayoff {
  std::vector<double> utility;
  std::vector<double> revenue;
};

ProfilePayoff summarize(const PayoffVector& v) { return {v.cp_utility, v.isp_revenue}; }

std::uint64_t cell_bit(const MarketConfig& config, int cp, int isp) {
  const int n = config.n_cps * config.n_isps;
  return std::uint64_t{1} << (n - 1 - (cp * config.n_isps + isp));
}

// Payoffs of every profile, indexed by binary encoding.
class ProfileTable {
 public:
  explicit ProfileTable(const MarketConfig& config) {
    const int cells = config.n_cps * config.n_isps;
    if (cells > kMaxEnumerationCells) {
      throw CapacityError("strategy space of " + std::to_string(cells) + " cells exceeds the enumeration guard of " +
                          std::to_string(kMaxEnumerationCells));
    }
    const std::uint64_t count = std::uint64_t{1} << cells;
    entries_.reserve(count);
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      entries_.push_back(summarize(payoffs(config, StrategyMatrix::from_bits(config.n_cps, config.n_isps, bits))));
    }
  }

  const ProfilePayoff& operator[](std::uint64_t bits) const { return entries_[bits]; }

 private:
  std::vector<ProfilePayoff> entries_;
};

template <typename Lookup>
std::optional<Deviation> scan_deviations(const MarketConfig& config, const StrategyMatrix& theta, Lookup&& lookup) {
  const ProfilePayoff& here = lookup(theta);
  for (int i = 0; i < config.n_cps; ++i) {
    for (int j = 0; j < config.n_isps; ++j) {
      if (is_forced(config, i, j)) continue;
      const ProfilePayoff& there = lookup(theta.flipped(i, j));
      Deviation d;
      d.cell = {i, j};
      d.establish = !theta.at(i, j);
      d.cp_gain = there.utility[static_cast<std::size_t>(i)] - here.utility[static_cast<std::size_t>(i)];
      d.isp_gain = there.revenue[static_cast<std::size_t>(j)] - here.revenue[static_cast<std::size_t>(j)];
      if (deviation_is_profitable(d)) return d;
    }
  }
  return std::nullopt;
}

void require_forced(const MarketConfig& config, const StrategyMatrix& theta) {
  if (!respects_forced(config, theta)) {
    throw std::invalid_argument("strategy profile leaves a forced (zero-price ISP) cell unset");
  }
}

ZreResult enumerate_with(const MarketConfig& config, const ProfileTable& table) {
  ZreResult result;
  const int cells = config.n_cps * config.n_isps;
  const std::uint64_t count = std::uint64_t{1} << cells;
  std::uint64_t forced_mask = 0;
  for (const Cell& f : forced_cells(config)) forced_mask |= cell_bit(config, f.cp, f.isp);

  auto lookup = [&table](const StrategyMatrix& m) -> const ProfilePayoff& { return table[m.encode()]; };
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    if ((bits & forced_mask) != forced_mask) continue;
    StrategyMatrix theta = StrategyMatrix::from_bits(config.n_cps, config.n_isps, bits);
    if (!scan_deviations(config, theta, lookup)) result.all_zre.push_back(std::move(theta));
  }
  if (result.all_zre.empty()) {
    result.status = ZreStatus::NoZre;
    result.pressure.assign(static_cast<std::size_t>(config.n_cps), false);
    return result;
  }
  result.status = ZreStatus::EquilibriaFound;
  result.selected = select_zre(config, result.all_zre);
  result.pressure = detect_pressure(config, *result.selected);
  return result;
}

}  // namespace

std::vector<Cell> forced_cells(const MarketConfig& config) {
  std::vector<Cell> out;
  for (int i = 0; i < config.n_cps; ++i) {
    for (int j = 0; j < config.n_isps; ++j) {
      if (is_forced(config, i, j)) out.push_back({i, j});
    }
  }
  return out;
}

bool is_forced(const MarketConfig& config, int /*cp*/, int isp) { return config.p[static_cast<std::size_t>(isp)] == 0.0; }

bool respects_forced(const MarketConfig& config, const StrategyMatrix& theta) {
  for (const Cell& f : forced_cells(config)) {
    if (!theta.at(f.cp, f.isp)) return false;
  }
  return true;
}

StrategyMatrix apply_forced(const MarketConfig& config, StrategyMatrix theta) {
  for (const Cell& f : forced_cells(config)) theta.set(f.cp, f.isp, true);
  return theta;
}

bool deviation_is_profitable(const Deviation& d) {
  const bool cp_gains = d.cp_gain > kGainTolerance;
  const bool isp_gains = d.isp_gain > kGainTolerance;
  return d.establish ? (cp_gains && isp_gains) : (cp_gains || isp_gains);
}

std::optional<Deviation> find_profitable_deviation(const MarketConfig& config, const StrategyMatrix& theta) {
  require_forced(config, theta);
  std::map<std::uint64_t, ProfilePayoff> cache;
  auto lookup = [&](const StrategyMatrix& m) -> const ProfilePayoff& {
    auto [it, inserted] = cache.try_emplace(m.encode());
    if (inserted) it->second = summarize(payoffs(config, m));
    return it->second;
  };
  return scan_deviations(config, theta, lookup);
}

bool is_zre(const MarketConfig& config, const StrategyMatrix& theta) {
  return !find_profitable_deviation(config, theta).has_value();
}

ZreResult enumerate_zre(const MarketConfig& config) {
  const ProfileTable table(config);
  return enumerate_with(config, table);
}

int highest_value_cp(const MarketConfig& config) {
  int best = 0;
  for (int i = 1; i < config.n_cps; ++i) {
    if (config.q[static_cast<std::size_t>(i)] >= config.q[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

StrategyMatrix select_zre(const MarketConfig& config, std::span<const StrategyMatrix> all_zre) {
  if (all_zre.empty()) throw ContractViolation("select_zre requires at least one equilibrium");
  const int top_cp = highest_value_cp(config);
  const int last_isp = config.n_isps - 1;
  auto key = [&](const StrategyMatrix& m) {
    // Lowest encoding wins the final tie, so negate it inside a max-key.
    return std::make_tuple(m.count_ones(), m.row_ones(top_cp), m.column_ones(last_isp),
                           ~m.encode());
  };
  const StrategyMatrix* best = &all_zre.front();
  for (const StrategyMatrix& m : all_zre) {
    if (key(m) > key(*best)) best = &m;
  }
  return *best;
}

StrategyMatrix best_response_row(const MarketConfig& config, const StrategyMatrix& theta, int cp) {
  if (cp < 0 || cp >= config.n_cps) throw std::invalid_argument("CP index out of range");
  const int m = config.n_isps;
  StrategyMatrix best;
  double best_utility = 0.0;
  int best_ones = 0;
  bool have = false;
  for (std::uint64_t row = 0; row < (std::uint64_t{1} << m); ++row) {
    StrategyMatrix candidate = theta;
    bool valid = true;
    for (int j = 0; j < m; ++j) {
      const bool on = ((row >> (m - 1 - j)) & 1U) != 0;
      if (is_forced(config, cp, j) && !on) {
        valid = false;
        break;
      }
      candidate.set(cp, j, on);
    }
    if (!valid) continue;
    const double utility = payoffs(config, candidate).cp_utility[static_cast<std::size_t>(cp)];
    const int ones = candidate.row_ones(cp);
    // Rows are visited in ascending encoding, so strict comparisons keep the
    // lowest encoding among exact ties.
    if (!have || utility > best_utility + kGainTolerance ||
        (utility >= best_utility - kGainTolerance && ones < best_ones)) {
      best = std::move(candidate);
      best_utility = utility;
      best_ones = ones;
      have = true;
    }
  }
  return best;
}

std::vector<bool> detect_pressure(const MarketConfig& config, const StrategyMatrix& selected) {
  std::vector<bool> pressure(static_cast<std::size_t>(config.n_cps), false);
  for (int i = 0; i < config.n_cps; ++i) {
    bool zero_rates = false;
    for (int j = 0; j < config.n_isps; ++j) zero_rates = zero_rates || (selected.at(i, j) && !is_forced(config, i, j));
    if (!zero_rates) continue;

    StrategyMatrix alone = selected;
    for (int k = 0; k < config.n_cps; ++k) {
      if (k == i) continue;
      for (int j = 0; j < config.n_isps; ++j) alone.set(k, j, is_forced(config, k, j));
    }
    const StrategyMatrix response = best_response_row(config, alone, i);
    for (int j = 0; j < config.n_isps; ++j) {
      if (selected.at(i, j) && !is_forced(config, i, j) && !response.at(i, j)) pressure[static_cast<std::size_t>(i)] = true;
    }
  }
  return pressure;
}

DynamicsTrace best_response_dynamics(const MarketConfig& config, const StrategyMatrix& start, int max_steps) {
  require_forced(config, start);
  DynamicsTrace trace;
  trace.visited.push_back(start);
  StrategyMatrix current = start;
  std::map<std::uint64_t, std::size_t> round_starts;

  std::map<std::uint64_t, ProfilePayoff> cache;
  auto lookup = [&](const StrategyMatrix& m) -> const ProfilePayoff& {
    auto [it, inserted] = cache.try_emplace(m.encode());
    if (inserted) it->second = summarize(payoffs(config, m));
    return it->second;
  };

  const int agents = config.n_cps + config.n_isps;
  while (true) {
    const auto [seen, fresh] = round_starts.try_emplace(current.encode(), trace.visited.size() - 1);
    if (!fresh) {
      trace.status = DynamicsStatus::Cycle;
      trace.cycle_start = seen->second;
      return trace;
    }
    bool moved = false;
    for (int agent = 0; agent < agents; ++agent) {
      const bool is_cp = agent < config.n_cps;
      const int index = is_cp ? agent : agent - config.n_cps;
      const int span_len = is_cp ? config.n_isps : config.n_cps;
      const ProfilePayoff& here = lookup(current);

      std::optional<Deviation> best;
      double best_gain = 0.0;
      for (int k = 0; k < span_len; ++k) {
        const Cell cell = is_cp ? Cell{index, k} : Cell{k, index};
        if (is_forced(config, cell.cp, cell.isp)) continue;
        const ProfilePayoff& there = lookup(current.flipped(cell.cp, cell.isp));
        Deviation d;
        d.cell = cell;
        d.establish = !current.at(cell.cp, cell.isp);
        d.cp_gain = there.utility[static_cast<std::size_t>(cell.cp)] - here.utility[static_cast<std::size_t>(cell.cp)];
        d.isp_gain = there.revenue[static_cast<std::size_t>(cell.isp)] - here.revenue[static_cast<std::size_t>(cell.isp)];
        const double own_gain = is_cp ? d.cp_gain : d.isp_gain;
        const bool acts = d.establish ? deviation_is_profitable(d) : own_gain > kGainTolerance;
        if (acts && (!best || own_gain > best_gain)) {
          best = d;
          best_gain = own_gain;
        }
      }
      if (!best) continue;
      if (trace.steps >= max_steps) {
        trace.status = DynamicsStatus::Inconclusive;
        return trace;
      }
      current = current.flipped(best->cell.cp, best->cell.isp);
      trace.visited.push_back(current);
      ++trace.steps;
      moved = true;
    }
    if (!moved) {
      trace.status = DynamicsStatus::FixedPoint;
      return trace;
    }
  }
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
  return grid;
}

DiscountOutcome discount_equilibrium(const MarketConfig& config, std::span<const double> delta_grid) {
  if (delta_grid.empty()) throw std::invalid_argument("discount grid is empty");
  for (double d : delta_grid) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("discount grid values must lie in [0,1]");
  }
  const std::size_t g = delta_grid.size();
  const int m = config.n_isps;
  std::size_t profiles = 1;
  for (int j = 0; j < m; ++j) {
    profiles *= g;
    if (profiles > kMaxDiscountProfiles) throw CapacityError("discount grid exceeds the enumeration guard");
  }

  // Digit j of a profile index is ISP j's grid position, ISP 0 most significant.
  auto digits_of = [&](std::size_t index) {
    std::vector<std::size_t> d(static_cast<std::size_t>(m));
    for (int j = m - 1; j >= 0; --j) {
      d[static_cast<std::size_t>(j)] = index % g;
      index /= g;
    }
    return d;
  };
  auto index_of = [&](const std::vector<std::size_t>& d) {
    std::size_t index = 0;
    for (std::size_t v : d) index = index * g + v;
    return index;
  };
  auto deltas_of = [&](const std::vector<std::size_t>& d) {
    std::vector<double> out;
    for (std::size_t v : d) out.push_back(delta_grid[v]);
    return out;
  };

  struct Evaluated {
    ZreResult zre;
    std::vector<double> revenue;
  };
  std::vector<Evaluated> evaluated(profiles);
  for (std::size_t k = 0; k < profiles; ++k) {
    MarketConfig cell = config;
    cell.delta = deltas_of(digits_of(k));
    evaluated[k].zre = enumerate_zre(cell);
    if (evaluated[k].zre.selected) evaluated[k].revenue = payoffs(cell, *evaluated[k].zre.selected).isp_revenue;
  }

  // ISPs ordered by descending price; equal prices put the later ISP first.
  std::vector<int> price_order(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) price_order[static_cast<std::size_t>(j)] = j;
  std::sort(price_order.begin(), price_order.end(), [&](int a, int b) {
    const double pa = config.p[static_cast<std::size_t>(a)];
    const double pb = config.p[static_cast<std::size_t>(b)];
    return pa != pb ? pa > pb : a > b;
  });
  auto selection_key = [&](const std::vector<double>& deltas) {
    std::vector<double> key;
    double sum = 0.0;
    for (double d : deltas) sum += d;
    key.push_back(sum);
    for (int j : price_order) key.push_back(deltas[static_cast<std::size_t>(j)]);
    return key;
  };

  DiscountOutcome outcome;
  std::optional<std::size_t> chosen;
  for (std::size_t k = 0; k < profiles; ++k) {
    if (!evaluated[k].zre.selected) continue;
    const std::vector<std::size_t> digits = digits_of(k);
    bool stable = true;
    for (int j = 0; j < m && stable; ++j) {
      std::vector<std::size_t> alt = digits;
      for (std::size_t v = 0; v < g && stable; ++v) {
        if (v == digits[static_cast<std::size_t>(j)]) continue;
        alt[static_cast<std::size_t>(j)] = v;
        const Evaluated& other = evaluated[index_of(alt)];
        if (!other.zre.selected) continue;
        if (other.revenue[static_cast<std::size_t>(j)] > evaluated[k].revenue[static_cast<std::size_t>(j)] + kGainTolerance) {
          stable = false;
        }
      }
    }
    if (!stable) continue;
    outcome.equilibria.push_back(deltas_of(digits));
    if (!chosen || selection_key(deltas_of(digits)) > selection_key(deltas_of(digits_of(*chosen)))) chosen = k;
  }

  if (!chosen) {
    outcome.status = DiscountStatus::NoDiscountEquilibrium;
    return outcome;
  }
  outcome.status = DiscountStatus::Found;
  outcome.delta_star = deltas_of(digits_of(*chosen));
  outcome.zre = evaluated[*chosen].zre;
  return outcome;
}

}  // namespace zr
