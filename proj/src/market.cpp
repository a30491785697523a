#include "zerorate/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "zerorate/errors.hpp"

namespace zr {

namespace {

constexpr int kMaxCps = 16;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool in_unit_interval_open_left(double v) { return v > 0.0 && v <= 1.0; }

std::vector<int> sorted_unique(std::span<const int> ids, int limit, const char* what) {
  std::vector<int> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw std::invalid_argument(std::string("duplicate ") + what + " index in merge subset");
  }
  for (int id : out) {
    if (id < 0 || id >= limit) throw std::invalid_argument(std::string(what) + " index out of range in merge subset");
  }
  if (out.empty()) throw std::invalid_argument(std::string("empty ") + what + " merge subset");
  return out;
}

}  // namespace

void MarketConfig::validate() const {
  require(n_cps >= 1, "n_cps must be >= 1");
  require(n_cps <= kMaxCps, "n_cps exceeds the auxiliary lattice limit of 16");
  require(n_isps >= 1, "n_isps must be >= 1");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0,1]");
  require(in_unit_interval_open_left(c), "c must lie in (0,1]");
  require(total_users > 0.0 && std::isfinite(total_users), "total_users must be positive");
  require(q.size() == static_cast<std::size_t>(n_cps), "q must have n_cps entries");
  require(p.size() == static_cast<std::size_t>(n_isps), "p must have n_isps entries");
  require(delta.size() == static_cast<std::size_t>(n_isps), "delta must have n_isps entries");
  require(phi.size() == aux_count(), "phi must have 2^n_cps entries");
  require(psi.size() == isp_columns(), "psi must have n_isps + 1 entries");
  for (double v : q) require(std::isfinite(v) && v >= 0.0, "q entries must be finite and non-negative");
  for (double v : p) require(std::isfinite(v) && v >= 0.0, "p entries must be finite and non-negative");
  for (double v : delta) require(v >= 0.0 && v <= 1.0, "delta entries must lie in [0,1]");
  for (double v : phi) require(in_unit_interval_open_left(v), "phi entries must lie in (0,1]");
  for (double v : psi) require(in_unit_interval_open_left(v), "psi entries must lie in (0,1]");
  const double phi_sum = std::accumulate(phi.begin(), phi.end(), 0.0);
  const double psi_sum = std::accumulate(psi.begin(), psi.end(), 0.0);
  require(std::abs(phi_sum - 1.0) <= kShareTolerance, "phi must sum to 1");
  require(std::abs(psi_sum - 1.0) <= kShareTolerance, "psi must sum to 1");
}

StrategyMatrix::StrategyMatrix(int n_cps, int n_isps) : n_cps_(n_cps), n_isps_(n_isps) {
  if (n_cps < 0 || n_isps < 0) throw std::invalid_argument("negative strategy matrix dimension");
  cells_.assign(static_cast<std::size_t>(n_cps) * static_cast<std::size_t>(n_isps), 0);
}

StrategyMatrix StrategyMatrix::ones(int n_cps, int n_isps) {
  StrategyMatrix m(n_cps, n_isps);
  std::fill(m.cells_.begin(), m.cells_.end(), std::uint8_t{1});
  return m;
}

StrategyMatrix StrategyMatrix::from_bits(int n_cps, int n_isps, std::uint64_t bits) {
  StrategyMatrix m(n_cps, n_isps);
  const int n = m.cell_count();
  if (n > 63) throw std::invalid_argument("strategy matrix too large for a 64-bit encoding");
  if (n < 64 && (bits >> n) != 0) throw std::invalid_argument("bit pattern wider than the strategy matrix");
  for (int k = 0; k < n; ++k) {
    m.cells_[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>((bits >> (n - 1 - k)) & 1U);
  }
  return m;
}

StrategyMatrix StrategyMatrix::from_bitstring(int n_cps, int n_isps, const std::string& text) {
  StrategyMatrix m(n_cps, n_isps);
  if (text.size() != static_cast<std::size_t>(m.cell_count())) {
    throw std::invalid_argument("bitstring length does not match n_cps * n_isps");
  }
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] != '0' && text[k] != '1') throw std::invalid_argument("bitstring may only contain 0 and 1");
    m.cells_[k] = static_cast<std::uint8_t>(text[k] - '0');
  }
  return m;
}

std::size_t StrategyMatrix::offset(int cp, int isp) const {
  if (cp < 0 || cp >= n_cps_ || isp < 0 || isp >= n_isps_) {
    throw std::invalid_argument("strategy matrix index out of range");
  }
  return static_cast<std::size_t>(cp) * static_cast<std::size_t>(n_isps_) + static_cast<std::size_t>(isp);
}

bool StrategyMatrix::at(int cp, int isp) const { return cells_[offset(cp, isp)] != 0; }

void StrategyMatrix::set(int cp, int isp, bool value) { cells_[offset(cp, isp)] = value ? 1 : 0; }

StrategyMatrix StrategyMatrix::flipped(int cp, int isp) const {
  StrategyMatrix out = *this;
  out.cells_[offset(cp, isp)] ^= 1U;
  return out;
}

int StrategyMatrix::count_ones() const {
  return static_cast<int>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

int StrategyMatrix::row_ones(int cp) const {
  int n = 0;
  for (int j = 0; j < n_isps_; ++j) n += at(cp, j) ? 1 : 0;
  return n;
}

int StrategyMatrix::column_ones(int isp) const {
  int n = 0;
  for (int i = 0; i < n_cps_; ++i) n += at(i, isp) ? 1 : 0;
  return n;
}

std::uint64_t StrategyMatrix::encode() const {
  if (cell_count() > 63) throw std::invalid_argument("strategy matrix too large for a 64-bit encoding");
  std::uint64_t bits = 0;
  for (std::uint8_t cell : cells_) bits = (bits << 1) | cell;
  return bits;
}

std::string StrategyMatrix::to_bitstring() const {
  std::string out;
  out.reserve(cells_.size());
  for (std::uint8_t cell : cells_) out.push_back(cell != 0 ? '1' : '0');
  return out;
}

bool extend_theta(const StrategyMatrix& theta, AuxIndex s, int isp_column) {
  if (isp_column < 0 || isp_column > theta.n_isps()) throw std::invalid_argument("ISP column out of range");
  if (theta.n_cps() < 32 && (s.mask >> theta.n_cps()) != 0) {
    throw std::invalid_argument("auxiliary mask out of range");
  }
  if (s.is_dummy() || isp_column == 0) return false;
  for (int i = 0; i < theta.n_cps(); ++i) {
    if (s.contains(i) && !theta.at(i, isp_column - 1)) return false;
  }
  return true;
}

double choice_probability(std::span<const ChoicePair> choice_set, const ChoicePair& query,
                          const MarketConfig& config) {
  if (choice_set.empty()) throw std::domain_error("choice set is empty");
  double weight_sum = 0.0;
  bool offered = false;
  for (const ChoicePair& pair : choice_set) {
    if (pair.cp.mask >= config.phi.size() || pair.isp_column < 0 ||
        static_cast<std::size_t>(pair.isp_column) >= config.psi.size()) {
      throw std::invalid_argument("choice pair index out of range");
    }
    weight_sum += config.phi[pair.cp.mask] * config.psi[static_cast<std::size_t>(pair.isp_column)];
    offered = offered || pair == query;
  }
  if (!offered) return 0.0;
  return config.phi[query.cp.mask] * config.psi[static_cast<std::size_t>(query.isp_column)] / weight_sum;
}

AllocationTable::AllocationTable(std::size_t aux_rows, std::size_t isp_columns, int n_cps)
    : rows_(aux_rows),
      cols_(isp_columns),
      n_cps_(n_cps),
      rho_(aux_rows * isp_columns, 0.0),
      x_pair_(aux_rows * isp_columns, 0.0),
      x_effective_(static_cast<std::size_t>(n_cps) * isp_columns, 0.0) {}

double AllocationTable::cp_total(int cp) const {
  double total = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) total += x_effective(cp, j);
  return total;
}

double AllocationTable::rho_sum() const { return std::accumulate(rho_.begin(), rho_.end(), 0.0); }

void AllocationTable::finalize(double total_users) {
  for (std::size_t k = 0; k < rho_.size(); ++k) x_pair_[k] = rho_[k] * total_users;
  std::fill(x_effective_.begin(), x_effective_.end(), 0.0);
  for (int i = 0; i < n_cps_; ++i) {
    for (std::size_t s = 1; s < rows_; ++s) {
      if (((s >> i) & 1U) == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j) {
        x_effective_[static_cast<std::size_t>(i) * cols_ + j] += x_pair_[s * cols_ + j];
      }
    }
  }
}

AllocationTable allocate(const MarketConfig& config, const StrategyMatrix& theta) {
  if (theta.n_cps() != config.n_cps || theta.n_isps() != config.n_isps) {
    throw std::invalid_argument("strategy matrix dimensions do not match the market");
  }
  const std::size_t rows = config.aux_count();
  const std::size_t cols = config.isp_columns();
  AllocationTable table(rows, cols, config.n_cps);

  // Zero-rated weight mass; extension is evaluated once per cell.
  std::vector<std::uint8_t> zero_rated(rows * cols, 0);
  double zero_rated_mass = 0.0;
  for (std::size_t s = 1; s < rows; ++s) {
    for (std::size_t j = 1; j < cols; ++j) {
      if (extend_theta(theta, AuxIndex{static_cast<std::uint32_t>(s)}, static_cast<int>(j))) {
        zero_rated[s * cols + j] = 1;
        zero_rated_mass += config.phi[s] * config.psi[j];
      }
    }
  }

  const bool any_zero_rating = zero_rated_mass > 0.0;
  for (std::size_t s = 0; s < rows; ++s) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double base = config.phi[s] * config.psi[j];
      double share = base;
      if (any_zero_rating) {
        const double elastic = zero_rated[s * cols + j] != 0 ? base / zero_rated_mass : 0.0;
        share = config.alpha * elastic + (1.0 - config.alpha) * base;
      }
      table.set_rho(s, j, share);
    }
  }
  table.finalize(config.total_users);
  return table;
}

std::uint32_t merged_mask(std::uint32_t mask, std::span<const int> merged_cps, int n_cps) {
  std::vector<int> ids(merged_cps.begin(), merged_cps.end());
  std::sort(ids.begin(), ids.end());
  const int target = ids.front();
  std::uint32_t out = 0;
  for (int k = 0; k < n_cps; ++k) {
    if (((mask >> k) & 1U) == 0) continue;
    const bool merged = std::binary_search(ids.begin(), ids.end(), k);
    const int source = merged ? target : k;
    // Drop every merged CP other than the target from the index space.
    const auto removed_below =
        std::count_if(ids.begin() + 1, ids.end(), [source](int id) { return id < source; });
    out |= 1U << (source - static_cast<int>(removed_below));
  }
  return out;
}

MergedMarket merge_cps(const MarketConfig& config, const StrategyMatrix& theta, std::span<const int> cps) {
  const std::vector<int> ids = sorted_unique(cps, config.n_cps, "CP");
  for (int id : ids) {
    for (int j = 0; j < config.n_isps; ++j) {
      if (theta.at(id, j) != theta.at(ids.front(), j)) {
        throw ContractViolation("merged CPs must share identical zero-rating profiles");
      }
    }
  }
  if (ids.size() == 1) return {config, theta};

  MergedMarket out{config, StrategyMatrix{}};
  const int new_cps = config.n_cps - static_cast<int>(ids.size()) + 1;
  out.config.n_cps = new_cps;
  out.config.q.clear();
  out.config.phi.assign(std::size_t{1} << new_cps, 0.0);
  out.theta = StrategyMatrix(new_cps, config.n_isps);

  int row = 0;
  for (int i = 0; i < config.n_cps; ++i) {
    if (i != ids.front() && std::binary_search(ids.begin(), ids.end(), i)) continue;
    out.config.q.push_back(config.q[static_cast<std::size_t>(i)]);
    for (int j = 0; j < config.n_isps; ++j) out.theta.set(row, j, theta.at(i, j));
    ++row;
  }
  for (std::size_t s = 0; s < config.aux_count(); ++s) {
    out.config.phi[merged_mask(static_cast<std::uint32_t>(s), ids, config.n_cps)] += config.phi[s];
  }
  return out;
}

MergedMarket merge_isps(const MarketConfig& config, const StrategyMatrix& theta, std::span<const int> isps) {
  const std::vector<int> ids = sorted_unique(isps, config.n_isps, "ISP");
  for (int id : ids) {
    for (int i = 0; i < config.n_cps; ++i) {
      if (theta.at(i, id) != theta.at(i, ids.front())) {
        throw ContractViolation("merged ISPs must share identical zero-rating profiles");
      }
    }
  }
  if (ids.size() == 1) return {config, theta};

  MergedMarket out{config, StrategyMatrix{}};
  const int new_isps = config.n_isps - static_cast<int>(ids.size()) + 1;
  out.config.n_isps = new_isps;
  out.config.p.clear();
  out.config.delta.clear();
  out.config.psi.assign(1, config.psi[0]);
  out.theta = StrategyMatrix(config.n_cps, new_isps);

  int col = 0;
  for (int j = 0; j < config.n_isps; ++j) {
    const bool merged = std::binary_search(ids.begin(), ids.end(), j);
    if (merged && j != ids.front()) continue;
    out.config.p.push_back(config.p[static_cast<std::size_t>(j)]);
    out.config.delta.push_back(config.delta[static_cast<std::size_t>(j)]);
    double weight = 0.0;
    if (merged) {
      for (int id : ids) weight += config.psi[static_cast<std::size_t>(id) + 1];
    } else {
      weight = config.psi[static_cast<std::size_t>(j) + 1];
    }
    out.config.psi.push_back(weight);
    for (int i = 0; i < config.n_cps; ++i) out.theta.set(i, col, theta.at(i, j));
    ++col;
  }
  return out;
}

}  // namespace zr
