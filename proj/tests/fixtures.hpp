#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "zerorate/market.hpp"

namespace zr::testing {

inline MarketConfig benchmark(double p1 = 0.5, double p2 = 0.5) {
  MarketConfig m;
  m.n_cps = 2;
  m.n_isps = 2;
  m.alpha = 0.5;
  m.c = 0.5;
  m.q = {0.4, 1.0};
  m.p = {p1, p2};
  m.delta = {1.0, 1.0};
  m.phi = {0.1, 0.4, 0.4, 0.1};
  m.psi = {0.2, 0.4, 0.4};
  return m;
}

inline std::vector<double> eleven_steps() {
  std::vector<double> axis;
  for (int k = 0; k <= 10; ++k) axis.push_back(k / 10.0);
  return axis;
}

// Positive weights summing to 1 within 1e-12.
inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  for (double& v : w) v = u(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
  return w;
}

inline MarketConfig random_config(std::mt19937_64& rng, int min_cps = 1, int max_cps = 3, int min_isps = 1,
                                  int max_isps = 3) {
  std::uniform_int_distribution<int> cps(min_cps, max_cps);
  std::uniform_int_distribution<int> isps(min_isps, max_isps);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> tenth(0, 10);
  MarketConfig m;
  m.n_cps = cps(rng);
  m.n_isps = isps(rng);
  m.alpha = unit(rng);
  m.c = 0.05 + 0.95 * unit(rng);
  for (int i = 0; i < m.n_cps; ++i) m.q.push_back(unit(rng) * 1.5);
  for (int j = 0; j < m.n_isps; ++j) {
    // Grid prices hit the forced p = 0 case now and then.
    m.p.push_back(tenth(rng) / 10.0);
    m.delta.push_back(0.1 * tenth(rng));
  }
  m.phi = random_simplex(m.aux_count(), rng);
  m.psi = random_simplex(m.isp_columns(), rng);
  m.total_users = 0.5 + 2.0 * unit(rng);
  return m;
}

inline StrategyMatrix random_theta(int n_cps, int n_isps, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  StrategyMatrix t(n_cps, n_isps);
  for (int i = 0; i < n_cps; ++i) {
    for (int j = 0; j < n_isps; ++j) t.set(i, j, coin(rng));
  }
  return t;
}

}  // namespace zr::testing
