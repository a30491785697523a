#include <doctest.h>

#include <array>

#include "fixtures.hpp"
#include "properties.hpp"
#include "zerorate/analysis.hpp"

using namespace zr;
using zr::testing::benchmark;
using zr::testing::eleven_steps;

namespace {

std::vector<std::vector<double>> benchmark_grid() { return {eleven_steps(), eleven_steps()}; }

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("HHI values") {
    const MarketConfig m = benchmark();
    CHECK(hhi(m, StrategyMatrix::zeros(2, 2)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(hhi(m, StrategyMatrix::ones(2, 2)) == doctest::Approx(0.5).epsilon(1e-14));
    const std::array<double, 2> monopoly{1.0, 0.0};
    CHECK(hhi_from_shares(monopoly) == 1.0);
    const std::array<double, 2> none{0.0, 0.0};
    CHECK_THROWS_AS(hhi_from_shares(none), std::domain_error);
  }

  TEST_CASE("variance form of HHI") {
    const std::array<double, 2> even{0.5, 0.5};
    CHECK(hhi_variance_identity(even).sum_of_squares == doctest::Approx(0.5));
    CHECK(hhi_variance_identity(even).mean_variance == doctest::Approx(0.5));
    const std::array<double, 2> skew{0.7, 0.3};
    CHECK(hhi_variance_identity(skew).sum_of_squares == doctest::Approx(0.58).epsilon(1e-14));
    CHECK(hhi_variance_identity(skew).mean_variance == doctest::Approx(0.58).epsilon(1e-14));
    const std::vector<double> five(5, 3.0);
    CHECK(hhi_variance_identity(five).sum_of_squares == doctest::Approx(0.2).epsilon(1e-14));
  }

  TEST_CASE("HHI identities over random markets") {
    const auto stats = zr::testing::hhi_identities(300, 41);
    CHECK(stats.max_error <= 1e-12);
  }

  TEST_CASE("identical worlds compare to zero") {
    const SweepRecord r = compare_worlds(benchmark(1.0, 1.0));
    REQUIRE(r.selected);
    CHECK(r.selected->to_bitstring() == "0000");
    CHECK(r.delta_utility == std::vector<double>{0.0, 0.0});
    CHECK(r.delta_share == std::vector<double>{0.0, 0.0});
    CHECK(r.delta_hhi == 0.0);
  }

  TEST_CASE("missing equilibrium compares to zero") {
    MarketConfig m = benchmark(0.3, 0.3);
    m.c = 0.8;
    const SweepRecord r = compare_worlds(m);
    CHECK_FALSE(r.selected);
    CHECK(r.delta_utility == std::vector<double>{0.0, 0.0});
    CHECK(r.delta_share == std::vector<double>{0.0, 0.0});
    CHECK(r.delta_hhi == 0.0);
  }

  TEST_CASE("grid sweep order and size") {
    const auto records = grid_sweep(benchmark(), benchmark_grid(), 3);
    REQUIRE(records.size() == 121);
    CHECK(records[1].prices == std::vector<double>{0.0, 0.1});
    CHECK(records[11].prices == std::vector<double>{0.1, 0.0});
    const std::vector<std::vector<double>> one{{0.4}, {0.7}};
    const auto single = grid_sweep(benchmark(), one, 1);
    REQUIRE(single.size() == 1);
    const SweepRecord direct = compare_worlds(benchmark(0.4, 0.7));
    CHECK(single[0].selected == direct.selected);
    CHECK(single[0].delta_utility == direct.delta_utility);
    CHECK(single[0].delta_hhi == direct.delta_hhi);
  }

  TEST_CASE("grid sweep is independent of worker count") {
    const auto a = grid_sweep(benchmark(), benchmark_grid(), 1);
    const auto b = grid_sweep(benchmark(), benchmark_grid(), 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].selected == b[k].selected);
      CHECK(a[k].delta_utility == b[k].delta_utility);
      CHECK(a[k].delta_hhi == b[k].delta_hhi);
    }
  }

  TEST_CASE("bad grids are rejected") {
    const std::vector<std::vector<double>> short_grid{eleven_steps()};
    CHECK_THROWS_AS(grid_sweep(benchmark(), short_grid), std::invalid_argument);
    const std::vector<std::vector<double>> empty_axis{eleven_steps(), {}};
    CHECK_THROWS_AS(grid_sweep(benchmark(), empty_axis), std::invalid_argument);
  }

  TEST_CASE("benchmark aggregates and concentration") {
    const auto records = grid_sweep(benchmark(), benchmark_grid(), 0);
    const AggregateSummary s = aggregate_signs(records);
    CHECK(s.utility_sign == std::vector<Sign>{Sign::Up, Sign::Up});
    CHECK(s.share_sign == std::vector<Sign>{Sign::Down, Sign::Up});
    int only_high = 0;
    for (const SweepRecord& r : records) {
      CHECK(r.delta_hhi >= -1e-12);
      if (r.selected->row_ones(0) == 0 && r.selected->row_ones(1) > 0) {
        ++only_high;
        CHECK(r.delta_utility[0] < 0.0);
        CHECK(r.delta_utility[1] >= -1e-12);
      }
    }
    CHECK(only_high > 0);
  }

  TEST_CASE("c = 0.8 lowers the low-value CP's average utility") {
    MarketConfig m = benchmark();
    m.c = 0.8;
    const AggregateSummary s = aggregate_signs(grid_sweep(m, benchmark_grid(), 0));
    CHECK(s.utility_sign[0] == Sign::Down);
    CHECK(s.utility_sign[1] == Sign::Up);
  }

  TEST_CASE("flat records give flat signs") {
    SweepRecord r;
    r.delta_utility = {0.0, 0.0};
    r.delta_share = {0.0, 0.0};
    const std::vector<SweepRecord> records{r, r};
    const AggregateSummary s = aggregate_signs(records);
    CHECK(s.utility_sign == std::vector<Sign>{Sign::Flat, Sign::Flat});
    CHECK(sign_symbol(s.share_sign[0]) == '0');
    CHECK(sign_symbol(Sign::Up) == '+');
    CHECK(sign_symbol(Sign::Down) == '-');
    CHECK_THROWS_AS(aggregate_signs(std::vector<SweepRecord>{}), std::invalid_argument);
  }

  TEST_CASE("discount sweep marks cells without an equilibrium") {
    const std::vector<std::vector<double>> grid{{0.4, 1.0}, {0.4, 1.0}};
    const auto records = discount_sweep(benchmark(), grid, default_delta_grid(), 2);
    REQUIRE(records.size() == 4);
    for (const auto& r : records) {
      if (r.outcome.status == DiscountStatus::Found) {
        CHECK(r.comparison.discount_found);
        CHECK(r.comparison.deltas == r.outcome.delta_star);
      } else {
        CHECK_FALSE(r.comparison.discount_found);
        CHECK(r.comparison.delta_hhi == 0.0);
      }
    }
  }
}
