#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "zerorate/analysis.hpp"
#include "zerorate/equilibrium.hpp"
#include "zerorate/errors.hpp"
#include "zerorate/oracle.hpp"
#include "zerorate/payoff.hpp"
#include "zerorate/report.hpp"
#include "zerorate/scenario.hpp"
#include "zerorate/verify.hpp"

namespace py = pybind11;
using namespace zr;

namespace {

py::dict allocation_dict(const MarketConfig& m, const AllocationTable& t) {
  std::vector<std::vector<double>> rho(t.aux_rows(), std::vector<double>(t.isp_columns()));
  std::vector<std::vector<double>> eff(static_cast<std::size_t>(m.n_cps), std::vector<double>(t.isp_columns()));
  for (std::size_t s = 0; s < t.aux_rows(); ++s) {
    for (std::size_t j = 0; j < t.isp_columns(); ++j) rho[s][j] = t.rho(s, j);
  }
  for (int i = 0; i < m.n_cps; ++i) {
    for (std::size_t j = 0; j < t.isp_columns(); ++j) eff[static_cast<std::size_t>(i)][j] = t.x_effective(i, j);
  }
  py::dict out;
  out["rho"] = rho;
  out["effective"] = eff;
  return out;
}

py::dict zre_dict(const ZreResult& r) {
  py::dict out;
  out["found"] = r.status == ZreStatus::EquilibriaFound;
  out["all"] = r.all_zre;
  out["selected"] = r.selected;
  out["pressure"] = r.pressure;
  return out;
}

py::dict record_dict(const SweepRecord& r) {
  py::dict out;
  out["prices"] = r.prices;
  out["deltas"] = r.deltas;
  out["selected"] = r.selected;
  out["delta_utility"] = r.delta_utility;
  out["delta_share"] = r.delta_share;
  out["delta_hhi"] = r.delta_hhi;
  out["pressure"] = r.pressure;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Zero-rating market model";

  py::register_exception<ContractViolation>(mod, "ContractViolation", PyExc_ValueError);
  py::register_exception<CapacityError>(mod, "CapacityError", PyExc_RuntimeError);
  py::register_exception<ScenarioError>(mod, "ScenarioError", PyExc_ValueError);

  py::class_<MarketConfig>(mod, "MarketConfig")
      .def(py::init<>())
      .def_readwrite("n_cps", &MarketConfig::n_cps)
      .def_readwrite("n_isps", &MarketConfig::n_isps)
      .def_readwrite("alpha", &MarketConfig::alpha)
      .def_readwrite("c", &MarketConfig::c)
      .def_readwrite("q", &MarketConfig::q)
      .def_readwrite("p", &MarketConfig::p)
      .def_readwrite("delta", &MarketConfig::delta)
      .def_readwrite("phi", &MarketConfig::phi)
      .def_readwrite("psi", &MarketConfig::psi)
      .def_readwrite("total_users", &MarketConfig::total_users)
      .def("validate", &MarketConfig::validate);

  py::class_<StrategyMatrix>(mod, "StrategyMatrix")
      .def(py::init<int, int>(), py::arg("n_cps"), py::arg("n_isps"))
      .def_static("from_bitstring", &StrategyMatrix::from_bitstring)
      .def_static("from_bits", &StrategyMatrix::from_bits)
      .def_static("ones", &StrategyMatrix::ones)
      .def("at", &StrategyMatrix::at)
      .def("set", &StrategyMatrix::set)
      .def("count_ones", &StrategyMatrix::count_ones)
      .def("encode", &StrategyMatrix::encode)
      .def_property_readonly("n_cps", &StrategyMatrix::n_cps)
      .def_property_readonly("n_isps", &StrategyMatrix::n_isps)
      .def("__str__", &StrategyMatrix::to_bitstring)
      .def("__repr__", [](const StrategyMatrix& t) { return "StrategyMatrix('" + t.to_bitstring() + "')"; })
      .def(py::self == py::self)
      .def("__hash__", [](const StrategyMatrix& t) { return t.encode(); });

  mod.def("allocate", [](const MarketConfig& m, const StrategyMatrix& t) { return allocation_dict(m, allocate(m, t)); });
  mod.def("payoffs", [](const MarketConfig& m, const StrategyMatrix& t) {
    const PayoffVector v = payoffs(m, t);
    py::dict out;
    out["cp_utility"] = v.cp_utility;
    out["isp_revenue"] = v.isp_revenue;
    return out;
  });
  mod.def("forced_cells", [](const MarketConfig& m) {
    std::vector<std::pair<int, int>> out;
    for (const Cell& c : forced_cells(m)) out.emplace_back(c.cp, c.isp);
    return out;
  });
  mod.def("is_zre", &is_zre);
  mod.def("enumerate_zre", [](const MarketConfig& m) { return zre_dict(enumerate_zre(m)); });
  mod.def("select_zre", [](const MarketConfig& m, const std::vector<StrategyMatrix>& all) { return select_zre(m, all); });
  mod.def("oracle_verify_zre", [](const MarketConfig& m, const StrategyMatrix& t) {
    const oracle::OracleVerdict v = oracle::oracle_verify_zre(m, t);
    return py::make_tuple(v.is_zre, v.violation);
  });

  mod.def("cp_shares", &cp_shares);
  mod.def("hhi", py::overload_cast<const MarketConfig&, const StrategyMatrix&>(&hhi));
  mod.def("compare_worlds", [](const MarketConfig& m) { return record_dict(compare_worlds(m)); });
  mod.def(
      "grid_sweep",
      [](const MarketConfig& m, const std::vector<std::vector<double>>& grid, int workers) {
        py::list out;
        for (const SweepRecord& r : grid_sweep(m, grid, workers)) out.append(record_dict(r));
        return out;
      },
      py::arg("market"), py::arg("price_grid"), py::arg("workers") = 0);
  mod.def("aggregate_signs", [](const MarketConfig& m, const std::vector<std::vector<double>>& grid) {
    const AggregateSummary s = aggregate_signs(grid_sweep(m, grid));
    std::string utility;
    std::string share;
    for (Sign x : s.utility_sign) utility += sign_symbol(x);
    for (Sign x : s.share_sign) share += sign_symbol(x);
    return py::make_tuple(utility, share);
  });

  mod.def("default_delta_grid", &default_delta_grid);
  mod.def(
      "discount_equilibrium",
      [](const MarketConfig& m, const std::vector<double>& grid) -> std::optional<std::vector<double>> {
        const DiscountOutcome d = discount_equilibrium(m, grid);
        if (d.status != DiscountStatus::Found) return std::nullopt;
        return d.delta_star;
      },
      py::arg("market"), py::arg("delta_grid") = default_delta_grid());

  py::class_<Scenario>(mod, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("market", &Scenario::market)
      .def_readonly("price_grid", &Scenario::price_grid)
      .def_readonly("delta_grid", &Scenario::delta_grid)
      .def_readonly("output_dir", &Scenario::output_dir)
      .def_property_readonly("mode", [](const Scenario& s) {
        return s.mode == ScenarioMode::DiscountGame ? "discount-game" : "fixed-delta";
      });
  mod.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<scenario>");
  mod.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p); });
  mod.def(
      "run_sweep",
      [](const Scenario& s, const std::filesystem::path& out, int workers) { return run_sweep(s, out, workers).written; },
      py::arg("scenario"), py::arg("out_dir"), py::arg("workers") = 0);

  py::enum_<CheckState>(mod, "CheckState")
      .value("PASS", CheckState::Pass)
      .value("FAIL", CheckState::Fail)
      .value("SKIPPED", CheckState::Skipped);
  mod.def(
      "run_verify",
      [](const Scenario& s, int workers) {
        std::vector<std::tuple<std::string, CheckState, std::string>> out;
        for (const CheckResult& r : run_verify(s, workers)) out.emplace_back(r.name, r.state, r.detail);
        return out;
      },
      py::arg("scenario"), py::arg("workers") = 0);
}
