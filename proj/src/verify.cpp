#include "zerorate/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "zerorate/analysis.hpp"
#include "zerorate/equilibrium.hpp"
#include "zerorate/oracle.hpp"
#include "zerorate/payoff.hpp"
#include "zerorate/report.hpp"

namespace zr {

namespace {

constexpr double kTol = 1e-12;

std::string point_text(const std::vector<double>& prices) {
  std::string out = "(";
  for (std::size_t k = 0; k < prices.size(); ++k) out += (k ? "," : "") + format_number(prices[k]);
  return out + ")";
}

// Collects the first failure of a check and counts how often it was tested.
class Tally {
 public:
  explicit Tally(std::string name) : name_(std::move(name)) {}

  void record(bool ok, const std::string& where) {
    ++tested_;
    if (!ok && first_failure_.empty()) first_failure_ = where;
    if (!ok) ++failures_;
  }
  void skip(std::string reason) { skip_reason_ = std::move(reason); }
  void note(std::string text) { note_ = std::move(text); }

  CheckResult result() const {
    CheckResult r;
    r.name = name_;
    std::ostringstream detail;
    if (!skip_reason_.empty()) {
      r.state = CheckState::Skipped;
      detail << skip_reason_;
    } else if (failures_ > 0) {
      r.state = CheckState::Fail;
      detail << failures_ << " of " << tested_ << " failed; first at " << first_failure_;
    } else {
      detail << tested_ << " checked";
    }
    if (!note_.empty()) detail << "; " << note_;
    r.detail = detail.str();
    return r;
  }

 private:
  std::string name_;
  std::size_t tested_ = 0;
  std::size_t failures_ = 0;
  std::string first_failure_;
  std::string skip_reason_;
  std::string note_;
};

std::vector<StrategyMatrix> profiles_to_check(const MarketConfig& config, int exhaustive_cells, std::mt19937_64& rng) {
  const int cells = config.n_cps * config.n_isps;
  std::vector<StrategyMatrix> out;
  if (cells <= exhaustive_cells) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << cells); ++bits) {
      out.push_back(StrategyMatrix::from_bits(config.n_cps, config.n_isps, bits));
    }
    return out;
  }
  std::bernoulli_distribution coin(0.5);
  for (int k = 0; k < 64; ++k) {
    StrategyMatrix theta(config.n_cps, config.n_isps);
    for (int i = 0; i < config.n_cps; ++i) {
      for (int j = 0; j < config.n_isps; ++j) theta.set(i, j, coin(rng));
    }
    out.push_back(theta);
  }
  return out;
}

double allocation_error(const MarketConfig& config, const StrategyMatrix& theta) {
  const AllocationTable fast = allocate(config, theta);
  const oracle::OracleAllocation slow = oracle::oracle_allocate(config, theta);
  double worst = 0.0;
  for (std::size_t s = 0; s < fast.aux_rows(); ++s) {
    for (std::size_t j = 0; j < fast.isp_columns(); ++j) worst = std::max(worst, std::abs(fast.rho(s, j) - slow.rho_at(s, j)));
  }
  for (int i = 0; i < config.n_cps; ++i) {
    for (std::size_t j = 0; j < fast.isp_columns(); ++j) {
      worst = std::max(worst, std::abs(fast.x_effective(i, j) - slow.effective_at(i, j)));
    }
  }
  return worst;
}

double payoff_error(const MarketConfig& config, const StrategyMatrix& theta) {
  const PayoffVector fast = payoffs(config, theta);
  const oracle::OraclePayoffs slow = oracle::oracle_payoffs(config, theta);
  double worst = 0.0;
  for (std::size_t i = 0; i < fast.cp_utility.size(); ++i) worst = std::max(worst, std::abs(fast.cp_utility[i] - slow.cp_utility[i]));
  for (std::size_t j = 0; j < fast.isp_revenue.size(); ++j) {
    worst = std::max(worst, std::abs(fast.isp_revenue[j] - slow.isp_revenue[j]));
  }
  return worst;
}

bool violates_value_order(const MarketConfig& config, const StrategyMatrix& theta) {
  for (int a = 0; a < config.n_cps; ++a) {
    for (int b = 0; b < config.n_cps; ++b) {
      if (!(config.q[static_cast<std::size_t>(a)] < config.q[static_cast<std::size_t>(b)])) continue;
      for (int j = 0; j < config.n_isps; ++j) {
        if (theta.at(a, j) && !theta.at(b, j)) return true;
      }
    }
  }
  return false;
}

bool same_point(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > 1e-9) return false;
  }
  return true;
}

bool records_identical(const std::vector<SweepRecord>& a, const std::vector<SweepRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const SweepRecord& x = a[k];
    const SweepRecord& y = b[k];
    if (x.prices != y.prices || x.selected != y.selected || x.delta_utility != y.delta_utility ||
        x.delta_share != y.delta_share || x.delta_hhi != y.delta_hhi || x.pressure != y.pressure) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<CheckResult> run_verify(const Scenario& scenario, int workers, int exhaustive_cells) {
  const MarketConfig& base = scenario.market;
  const auto points = grid_points(scenario.price_grid);
  const std::vector<SweepRecord> records = grid_sweep(base, scenario.price_grid, workers);
  std::mt19937_64 rng(0x5eedULL);

  Tally alloc("oracle allocation");
  Tally pay("oracle payoffs");
  Tally verdicts("oracle equilibrium verdicts");
  Tally soundness("selected equilibrium soundness");
  Tally value_order("value ordering");
  Tally variance("hhi variance identity");
  Tally endpoints("hhi endpoints equal");
  Tally concentration("hhi non-decreasing");
  Tally low_value("low-value utility loss");
  Tally forced("forced cells respected");
  Tally nozre("no-zre cells");
  Tally zero_deltas("no-zre cells carry zero deltas");
  Tally determinism("deterministic sweep");

  double worst_alloc = 0.0;
  double worst_pay = 0.0;
  std::vector<std::vector<double>> no_zre_points;

  for (std::size_t k = 0; k < points.size(); ++k) {
    MarketConfig config = base;
    config.p = points[k];
    const std::string where = point_text(points[k]);
    const SweepRecord& record = records[k];

    for (const StrategyMatrix& theta : profiles_to_check(config, exhaustive_cells, rng)) {
      const double ea = allocation_error(config, theta);
      const double ep = payoff_error(config, theta);
      worst_alloc = std::max(worst_alloc, ea);
      worst_pay = std::max(worst_pay, ep);
      alloc.record(ea < kTol, where + " theta " + theta.to_bitstring());
      pay.record(ep < kTol, where + " theta " + theta.to_bitstring());
      if (respects_forced(config, theta)) {
        verdicts.record(is_zre(config, theta) == oracle::oracle_verify_zre(config, theta).is_zre,
                        where + " theta " + theta.to_bitstring());
      }
    }

    const ZreResult zre = enumerate_zre(config);
    for (const StrategyMatrix& theta : zre.all_zre) value_order.record(!violates_value_order(config, theta), where + " theta " + theta.to_bitstring());

    const StrategyMatrix none = StrategyMatrix::zeros(config.n_cps, config.n_isps);
    const StrategyMatrix all = StrategyMatrix::ones(config.n_cps, config.n_isps);
    for (const StrategyMatrix& theta : {none, all}) {
      const AllocationTable table = allocate(config, theta);
      std::vector<double> raw;
      for (int i = 0; i < config.n_cps; ++i) raw.push_back(table.cp_total(i));
      const HhiForms forms = hhi_variance_identity(raw);
      variance.record(std::abs(forms.sum_of_squares - forms.mean_variance) <= kTol, where + " theta " + theta.to_bitstring());
    }
    endpoints.record(std::abs(hhi(config, none) - hhi(config, all)) <= kTol, where);

    if (record.selected) {
      soundness.record(oracle::oracle_verify_zre(config, *record.selected).is_zre, where);
      forced.record(respects_forced(config, *record.selected), where);
      concentration.record(record.delta_hhi >= -kTol, where);
      const StrategyMatrix& s = *record.selected;
      if (config.n_cps == 2 && s.row_ones(0) == 0 && s.row_ones(1) > 0) {
        low_value.record(record.delta_utility[0] < 0.0 && record.delta_utility[1] >= -kTol, where);
      }
    } else {
      no_zre_points.push_back(points[k]);
      const bool zeros = std::all_of(record.delta_utility.begin(), record.delta_utility.end(), [](double v) { return v == 0.0; }) &&
                         std::all_of(record.delta_share.begin(), record.delta_share.end(), [](double v) { return v == 0.0; }) &&
                         record.delta_hhi == 0.0;
      zero_deltas.record(zeros, where);
    }
  }

  {
    std::ostringstream text;
    text << "max error " << format_number(worst_alloc);
    alloc.note(text.str());
  }
  {
    std::ostringstream text;
    text << "max error " << format_number(worst_pay);
    pay.note(text.str());
  }

  const bool ordered_values = std::adjacent_find(base.q.begin(), base.q.end(), std::not_equal_to<>()) != base.q.end();
  if (!ordered_values) value_order.skip("every CP has the same value");

  const bool concentration_applies = base.n_cps == 2 && base.q[0] <= base.q[1] && base.phi[1] <= base.phi[2];
  if (!concentration_applies) concentration.skip("precondition q_1 <= q_2 and phi_1 <= phi_2 (duopoly) does not hold");
  if (base.n_cps != 2) low_value.skip("stated for two CPs");

  std::string listed;
  for (const auto& p : no_zre_points) listed += (listed.empty() ? "" : " ") + point_text(p);
  if (scenario.expected_no_zre) {
    const auto& expected = *scenario.expected_no_zre;
    bool match = expected.size() == no_zre_points.size();
    for (const auto& e : expected) {
      match = match && std::any_of(no_zre_points.begin(), no_zre_points.end(), [&](const auto& p) { return same_point(p, e); });
    }
    nozre.record(match, "found {" + listed + "}");
  } else {
    nozre.skip("scenario lists no expected cells");
  }
  nozre.note("no equilibrium at {" + listed + "}");
  if (no_zre_points.empty()) zero_deltas.skip("every cell has an equilibrium");

  const std::vector<SweepRecord> serial = grid_sweep(base, scenario.price_grid, 1);
  determinism.record(records_identical(records, serial), "parallel and serial sweeps differ");

  return {alloc.result(),   pay.result(),      verdicts.result(), soundness.result(), value_order.result(),
          variance.result(),  endpoints.result(),   concentration.result(), low_value.result(),  forced.result(),
          nozre.result(),   zero_deltas.result(), determinism.result()};
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::none_of(results.begin(), results.end(), [](const CheckResult& r) { return r.state == CheckState::Fail; });
}

const char* state_label(CheckState state) {
  switch (state) {
    case CheckState::Pass:
      return "PASS";
    case CheckState::Fail:
      return "FAIL";
    case CheckState::Skipped:
      break;
  }
  return "SKIP";
}

}  // namespace zr
