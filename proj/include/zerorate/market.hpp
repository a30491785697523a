#pragma once

// Market structure and user allocation.
//
// Indexing conventions used throughout the library:
//   * Actual CPs are 0-based (CP 1 in prose is index 0).
//   * Auxiliary CPs are identified by a subset bitmask over actual CPs; bit i
//     set means actual CP i belongs to the bundle. Mask 0 is the dummy CP.
//   * ISP columns include the dummy ISP at column 0; actual ISP k (0-based in
//     a StrategyMatrix) lives at column k + 1.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zr {

inline constexpr double kShareTolerance = 1e-12;

struct MarketConfig {
  int n_cps = 0;
  int n_isps = 0;
  double alpha = 0.0;
  double c = 1.0;
  std::vector<double> q;      // per actual CP
  std::vector<double> p;      // per actual ISP
  std::vector<double> delta;  // per actual ISP
  std::vector<double> phi;    // per auxiliary CP, length 2^n_cps
  std::vector<double> psi;    // per ISP incl. dummy, length n_isps + 1
  double total_users = 1.0;

  // Throws std::invalid_argument describing the first violated invariant.
  void validate() const;

  std::size_t aux_count() const { return std::size_t{1} << n_cps; }
  std::size_t isp_columns() const { return static_cast<std::size_t>(n_isps) + 1; }
};

struct AuxIndex {
  std::uint32_t mask = 0;

  bool is_dummy() const { return mask == 0; }
  bool contains(int cp) const { return ((mask >> cp) & 1U) != 0; }
  friend bool operator==(AuxIndex, AuxIndex) = default;
};

// Binary zero-rating profile over actual CPs x actual ISPs. Dummy rows and
// columns are implicit and always zero.
class StrategyMatrix {
 public:
  StrategyMatrix() = default;
  StrategyMatrix(int n_cps, int n_isps);

  static StrategyMatrix zeros(int n_cps, int n_isps) { return {n_cps, n_isps}; }
  static StrategyMatrix ones(int n_cps, int n_isps);
  // Row-major, most significant bit first: for a duopoly, bits 0b0111 means
  // theta(0,0)=0, theta(0,1)=1, theta(1,0)=1, theta(1,1)=1.
  static StrategyMatrix from_bits(int n_cps, int n_isps, std::uint64_t bits);
  // Parses the bitstring form produced by to_bitstring().
  static StrategyMatrix from_bitstring(int n_cps, int n_isps, const std::string& text);

  int n_cps() const { return n_cps_; }
  int n_isps() const { return n_isps_; }
  int cell_count() const { return n_cps_ * n_isps_; }

  bool at(int cp, int isp) const;
  void set(int cp, int isp, bool value);
  StrategyMatrix flipped(int cp, int isp) const;

  int count_ones() const;
  int row_ones(int cp) const;
  int column_ones(int isp) const;
  bool any() const { return count_ones() > 0; }

  std::uint64_t encode() const;
  std::string to_bitstring() const;

  friend bool operator==(const StrategyMatrix&, const StrategyMatrix&) = default;

 private:
  std::size_t offset(int cp, int isp) const;

  int n_cps_ = 0;
  int n_isps_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Zero-rating relation of an auxiliary CP with an ISP column (0 = dummy ISP).
// A bundle is zero-rated iff every member CP zero-rates with that ISP.
bool extend_theta(const StrategyMatrix& theta, AuxIndex s, int isp_column);

struct ChoicePair {
  AuxIndex cp;
  int isp_column = 0;
  friend bool operator==(const ChoicePair&, const ChoicePair&) = default;
};

// Luce choice probability of `query` from the available set; 0 when the
// query is not offered. Throws std::domain_error on an empty set.
double choice_probability(std::span<const ChoicePair> choice_set, const ChoicePair& query,
                          const MarketConfig& config);

class AllocationTable {
 public:
  AllocationTable() = default;
  AllocationTable(std::size_t aux_rows, std::size_t isp_columns, int n_cps);

  std::size_t aux_rows() const { return rows_; }
  std::size_t isp_columns() const { return cols_; }
  int n_cps() const { return n_cps_; }

  double rho(std::size_t aux, std::size_t isp_column) const { return rho_[aux * cols_ + isp_column]; }
  double x_pair(std::size_t aux, std::size_t isp_column) const { return x_pair_[aux * cols_ + isp_column]; }
  // Effective users of actual CP `cp` on ISP column (dummy column included).
  double x_effective(int cp, std::size_t isp_column) const {
    return x_effective_[static_cast<std::size_t>(cp) * cols_ + isp_column];
  }
  // Effective users of actual CP `cp` summed over every ISP column.
  double cp_total(int cp) const;
  double rho_sum() const;

  void set_rho(std::size_t aux, std::size_t isp_column, double value) { rho_[aux * cols_ + isp_column] = value; }
  // Fills x_pair and x_effective from rho.
  void finalize(double total_users);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int n_cps_ = 0;
  std::vector<double> rho_;
  std::vector<double> x_pair_;
  std::vector<double> x_effective_;
};

// Closed-form market shares of every (auxiliary CP, ISP) pair under theta.
AllocationTable allocate(const MarketConfig& config, const StrategyMatrix& theta);

struct MergedMarket {
  MarketConfig config;
  StrategyMatrix theta;
};

// Merges actual CPs with identical zero-rating rows into one CP placed at the
// lowest listed index. Every auxiliary bundle touching the merged set
// collapses onto the bundle with the merged CP.
MergedMarket merge_cps(const MarketConfig& config, const StrategyMatrix& theta, std::span<const int> cps);

// Merges actual ISPs with identical zero-rating columns into one ISP placed at
// the lowest listed index; it inherits that ISP's price and discount.
MergedMarket merge_isps(const MarketConfig& config, const StrategyMatrix& theta, std::span<const int> isps);

// Maps an auxiliary mask of the original market onto the merged market.
std::uint32_t merged_mask(std::uint32_t mask, std::span<const int> merged_cps, int n_cps);

}  // namespace zr
