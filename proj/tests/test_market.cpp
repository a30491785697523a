#include <doctest.h>

#include <array>
#include <random>
#include <stdexcept>

#include "fixtures.hpp"
#include "zerorate/errors.hpp"
#include "zerorate/market.hpp"

using namespace zr;
using zr::testing::benchmark;

TEST_SUITE("market") {
  TEST_CASE("validate rejects malformed configs") {
    MarketConfig m = benchmark();
    CHECK_NOTHROW(m.validate());

    auto rejects = [](MarketConfig bad) { CHECK_THROWS_AS(bad.validate(), std::invalid_argument); };
    MarketConfig bad = m;
    bad.phi = {0.1, 0.4, 0.4, 0.2};
    rejects(bad);
    bad = m;
    bad.psi = {0.2, 0.4};
    rejects(bad);
    bad = m;
    bad.alpha = 1.5;
    rejects(bad);
    bad = m;
    bad.c = 0.0;
    rejects(bad);
    bad = m;
    bad.delta = {1.2, 1.0};
    rejects(bad);
    bad = m;
    bad.p = {-0.1, 0.2};
    rejects(bad);
    bad = m;
    bad.phi = {0.0, 0.5, 0.4, 0.1};
    rejects(bad);
  }

  TEST_CASE("strategy matrix bit order is row-major, most significant first") {
    const StrategyMatrix t = StrategyMatrix::from_bits(2, 2, 0b0111);
    CHECK_FALSE(t.at(0, 0));
    CHECK(t.at(0, 1));
    CHECK(t.at(1, 0));
    CHECK(t.at(1, 1));
    CHECK(t.to_bitstring() == "0111");
    CHECK(StrategyMatrix::from_bitstring(2, 2, "0111") == t);
    CHECK(t.encode() == 0b0111);
    CHECK(t.row_ones(0) == 1);
    CHECK(t.column_ones(1) == 2);
    CHECK_THROWS_AS(StrategyMatrix::from_bitstring(2, 2, "011"), std::invalid_argument);
    CHECK_THROWS_AS(StrategyMatrix::from_bitstring(2, 2, "01a1"), std::invalid_argument);
  }

  TEST_CASE("extend_theta is an AND over bundle members") {
    StrategyMatrix t(2, 2);
    t.set(0, 0, true);
    t.set(1, 0, true);
    t.set(1, 1, true);
    CHECK(extend_theta(t, AuxIndex{0b11}, 1));
    CHECK_FALSE(extend_theta(t, AuxIndex{0b11}, 2));
    for (int j = 0; j <= 2; ++j) CHECK_FALSE(extend_theta(t, AuxIndex{0}, j));
    for (std::uint32_t s = 0; s < 4; ++s) CHECK_FALSE(extend_theta(t, AuxIndex{s}, 0));
    CHECK_THROWS_AS(extend_theta(t, AuxIndex{4}, 1), std::invalid_argument);
    CHECK_THROWS_AS(extend_theta(t, AuxIndex{1}, 3), std::invalid_argument);
  }

  TEST_CASE("choice probability") {
    const MarketConfig m = benchmark();
    std::vector<ChoicePair> full;
    for (std::uint32_t s = 0; s < 4; ++s) {
      for (int j = 0; j < 3; ++j) full.push_back({AuxIndex{s}, j});
    }
    double total = 0.0;
    for (const auto& pair : full) {
      const double pr = choice_probability(full, pair, m);
      CHECK(pr == doctest::Approx(m.phi[pair.cp.mask] * m.psi[static_cast<std::size_t>(pair.isp_column)]).epsilon(1e-15));
      total += pr;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));

    const std::array<ChoicePair, 1> single{ChoicePair{AuxIndex{2}, 2}};
    CHECK(choice_probability(single, single[0], m) == 1.0);
    CHECK(choice_probability(single, ChoicePair{AuxIndex{1}, 2}, m) == 0.0);

    const std::array<ChoicePair, 2> pair{ChoicePair{AuxIndex{1}, 1}, ChoicePair{AuxIndex{2}, 1}};
    CHECK(choice_probability(pair, pair[1], m) == doctest::Approx(0.5));

    CHECK_THROWS_AS(choice_probability(std::span<const ChoicePair>{}, pair[0], m), std::domain_error);
  }

  TEST_CASE("choice probability ratios ignore other alternatives") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const MarketConfig m = zr::testing::random_config(rng, 2, 3, 1, 3);
      std::vector<ChoicePair> all;
      for (std::uint32_t s = 0; s < m.aux_count(); ++s) {
        for (int j = 0; j < static_cast<int>(m.isp_columns()); ++j) all.push_back({AuxIndex{s}, j});
      }
      const ChoicePair a = all[1];
      const ChoicePair b = all[all.size() - 1];
      std::vector<ChoicePair> small{a, b};
      const double ratio_small = choice_probability(small, a, m) / choice_probability(small, b, m);
      const double ratio_all = choice_probability(all, a, m) / choice_probability(all, b, m);
      CHECK(ratio_small == doctest::Approx(ratio_all).epsilon(1e-12));
    }
  }

  TEST_CASE("allocation hand-computed values") {
    const MarketConfig m = benchmark();
    const AllocationTable none = allocate(m, StrategyMatrix::zeros(2, 2));
    CHECK(none.rho(1, 1) == doctest::Approx(0.16).epsilon(1e-14));

    StrategyMatrix only21(2, 2);
    only21.set(1, 0, true);
    const AllocationTable t = allocate(m, only21);
    CHECK(t.rho(2, 1) == doctest::Approx(0.58).epsilon(1e-14));
    CHECK(t.x_effective(1, 1) == doctest::Approx(0.60).epsilon(1e-14));
    CHECK(t.rho_sum() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("all-one profile scales every zero-rated pair by one factor") {
    const MarketConfig m = benchmark();
    const AllocationTable t = allocate(m, StrategyMatrix::ones(2, 2));
    const double a = t.rho(1, 1) / (m.phi[1] * m.psi[1]);
    for (std::size_t s = 1; s < 4; ++s) {
      for (std::size_t j = 1; j < 3; ++j) CHECK(t.rho(s, j) / (m.phi[s] * m.psi[j]) == doctest::Approx(a).epsilon(1e-12));
    }
  }

  TEST_CASE("conservation, baseline, sticky floor and effective users") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
      const MarketConfig m = zr::testing::random_config(rng);
      const StrategyMatrix theta = zr::testing::random_theta(m.n_cps, m.n_isps, rng);
      const AllocationTable t = allocate(m, theta);
      CHECK(std::abs(t.rho_sum() - 1.0) <= 1e-12);
      for (std::size_t s = 0; s < m.aux_count(); ++s) {
        for (std::size_t j = 0; j < m.isp_columns(); ++j) {
          CHECK(t.rho(s, j) >= (1.0 - m.alpha) * m.phi[s] * m.psi[j] - 1e-15);
          CHECK(t.x_pair(s, j) == doctest::Approx(t.rho(s, j) * m.total_users).epsilon(1e-14));
        }
      }
      for (int i = 0; i < m.n_cps; ++i) {
        for (std::size_t j = 0; j < m.isp_columns(); ++j) {
          double sum = 0.0;
          for (std::size_t s = 0; s < m.aux_count(); ++s) {
            if (AuxIndex{static_cast<std::uint32_t>(s)}.contains(i)) sum += t.x_pair(s, j);
          }
          CHECK(std::abs(t.x_effective(i, j) - sum) <= 1e-12);
        }
      }
      const AllocationTable base = allocate(m, StrategyMatrix::zeros(m.n_cps, m.n_isps));
      for (std::size_t s = 0; s < m.aux_count(); ++s) {
        for (std::size_t j = 0; j < m.isp_columns(); ++j) CHECK(base.rho(s, j) == m.phi[s] * m.psi[j]);
      }
    }
  }

  TEST_CASE("zero-rating a cell attracts more users to it") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
      MarketConfig m = zr::testing::random_config(rng);
      if (m.alpha == 0.0) m.alpha = 0.3;
      StrategyMatrix theta = zr::testing::random_theta(m.n_cps, m.n_isps, rng);
      std::uniform_int_distribution<int> cp(0, m.n_cps - 1);
      std::uniform_int_distribution<int> isp(0, m.n_isps - 1);
      const int i = cp(rng);
      const int j = isp(rng);
      theta.set(i, j, false);
      const double before = allocate(m, theta).x_effective(i, static_cast<std::size_t>(j) + 1);
      const double after = allocate(m, theta.flipped(i, j)).x_effective(i, static_cast<std::size_t>(j) + 1);
      CHECK(after > before);
    }
  }

  TEST_CASE("merging two ISPs adds their shares") {
    MarketConfig m = benchmark();
    const StrategyMatrix theta = StrategyMatrix::from_bitstring(2, 2, "1100");
    const std::array<int, 2> both{0, 1};
    const MergedMarket merged = merge_isps(m, theta, both);
    CHECK(merged.config.n_isps == 1);
    CHECK(merged.config.psi.size() == 2);
    CHECK(merged.config.psi[0] == doctest::Approx(0.2));
    CHECK(merged.config.psi[1] == doctest::Approx(0.8));
    CHECK_NOTHROW(merged.config.validate());
    const AllocationTable a = allocate(m, theta);
    const AllocationTable b = allocate(merged.config, merged.theta);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(b.x_effective(i, 1) - (a.x_effective(i, 1) + a.x_effective(i, 2))) <= 1e-12);
      CHECK(std::abs(b.x_effective(i, 0) - a.x_effective(i, 0)) <= 1e-12);
    }
  }

  TEST_CASE("singleton merges are the identity") {
    const MarketConfig m = benchmark();
    const StrategyMatrix theta = StrategyMatrix::from_bitstring(2, 2, "0110");
    const std::array<int, 1> one{1};
    const MergedMarket cps = merge_cps(m, theta, one);
    const MergedMarket isps = merge_isps(m, theta, one);
    CHECK(cps.theta == theta);
    CHECK(isps.theta == theta);
    CHECK(cps.config.phi == m.phi);
    CHECK(isps.config.psi == m.psi);
  }

  TEST_CASE("merges need identical zero-rating profiles") {
    const MarketConfig m = benchmark();
    const StrategyMatrix theta = StrategyMatrix::from_bitstring(2, 2, "0110");
    const std::array<int, 2> both{0, 1};
    CHECK_THROWS_AS(merge_cps(m, theta, both), ContractViolation);
    CHECK_THROWS_AS(merge_isps(m, theta, both), ContractViolation);
    const std::array<int, 2> dup{1, 1};
    CHECK_THROWS_AS(merge_isps(m, StrategyMatrix::zeros(2, 2), dup), std::invalid_argument);
  }

  TEST_CASE("three-ISP market: merging ISPs 2 and 3 at zero profile") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const MarketConfig m = zr::testing::random_config(rng, 1, 3, 3, 3);
      const StrategyMatrix none = StrategyMatrix::zeros(m.n_cps, 3);
      const std::array<int, 2> tail{1, 2};
      const MergedMarket merged = merge_isps(m, none, tail);
      const AllocationTable a = allocate(m, none);
      const AllocationTable b = allocate(merged.config, merged.theta);
      for (std::size_t s = 0; s < m.aux_count(); ++s) {
        CHECK(std::abs(b.rho(s, 0) - a.rho(s, 0)) <= 1e-12);
        CHECK(std::abs(b.rho(s, 1) - a.rho(s, 1)) <= 1e-12);
        CHECK(std::abs(b.rho(s, 2) - (a.rho(s, 2) + a.rho(s, 3))) <= 1e-12);
      }
    }
  }

  TEST_CASE("merging CPs collapses the auxiliary lattice") {
    const std::array<int, 2> first_two{0, 1};
    CHECK(merged_mask(0b000, first_two, 3) == 0b00);
    CHECK(merged_mask(0b001, first_two, 3) == 0b01);
    CHECK(merged_mask(0b010, first_two, 3) == 0b01);
    CHECK(merged_mask(0b011, first_two, 3) == 0b01);
    CHECK(merged_mask(0b100, first_two, 3) == 0b10);
    CHECK(merged_mask(0b111, first_two, 3) == 0b11);
    const std::array<int, 2> outer{0, 2};
    CHECK(merged_mask(0b010, outer, 3) == 0b10);
    CHECK(merged_mask(0b100, outer, 3) == 0b01);
  }
}
