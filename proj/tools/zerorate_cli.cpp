#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zerorate/equilibrium.hpp"
#include "zerorate/errors.hpp"
#include "zerorate/report.hpp"
#include "zerorate/scenario.hpp"
#include "zerorate/verify.hpp"

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitCapacity = 3;

int worker_count() {
  const char* text = std::getenv("ZERORATE_WORKERS");
  if (text == nullptr || *text == '\0') return 0;
  try {
    const int n = std::stoi(text);
    if (n >= 1) return n;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(std::string("ZERORATE_WORKERS must be a positive integer, got \"") + text + "\"");
}

int cmd_sweep(const std::string& path, const std::string& out_override) {
  const zr::Scenario scenario = zr::load_scenario(path);
  std::string out_dir = out_override.empty() ? scenario.output_dir : out_override;
  if (out_dir.empty()) throw std::invalid_argument("no output directory: pass --out or set output.dir");
  const auto artifacts = zr::run_sweep(scenario, out_dir, worker_count());
  for (const auto& file : artifacts.written) std::cout << "wrote " << file.string() << '\n';
  return 0;
}

int cmd_verify(const std::string& path) {
  const zr::Scenario scenario = zr::load_scenario(path);
  const auto results = zr::run_verify(scenario, worker_count());
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << r.name << zr::state_label(r.state) << "  "
              << r.detail << '\n';
  }
  const bool ok = zr::all_passed(results);
  std::cout << (ok ? "all checks passed" : "some checks failed") << '\n';
  return ok ? 0 : kExitVerifyFailed;
}

int cmd_zre(const std::string& path, const std::vector<double>& prices) {
  const zr::Scenario scenario = zr::load_scenario(path);
  zr::MarketConfig config = scenario.market;
  if (prices.size() != static_cast<std::size_t>(config.n_isps)) {
    throw std::invalid_argument("--p needs one price per ISP (" + std::to_string(config.n_isps) + ")");
  }
  config.p = prices;
  config.validate();
  const zr::ZreResult result = zr::enumerate_zre(config);
  std::cout << "prices";
  for (double p : prices) std::cout << ' ' << zr::format_number(p);
  std::cout << '\n';
  if (result.status == zr::ZreStatus::NoZre) {
    std::cout << "equilibria: none\nselected: NOZRE\n";
    return 0;
  }
  std::cout << "equilibria:";
  for (const auto& theta : result.all_zre) std::cout << ' ' << theta.to_bitstring();
  std::cout << "\nselected: " << result.selected->to_bitstring() << "\npressure:";
  for (bool flag : result.pressure) std::cout << ' ' << (flag ? 1 : 0);
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-rating market equilibria and parameter sweeps"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::vector<double> prices;

  auto* sweep = app.add_subcommand("sweep", "run the scenario's price grid and write grid.csv and summary.json");
  sweep->add_option("scenario", scenario_path, "scenario JSON file")->required();
  sweep->add_option("--out", out_dir, "output directory (overrides output.dir)");

  auto* verify = app.add_subcommand("verify", "run the invariant battery over the scenario grid");
  verify->add_option("scenario", scenario_path, "scenario JSON file")->required();

  auto* zre = app.add_subcommand("zre", "list every equilibrium at one price point");
  zre->add_option("scenario", scenario_path, "scenario JSON file")->required();
  zre->add_option("--p", prices, "one price per ISP")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidInput;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(scenario_path, out_dir);
    if (verify->parsed()) return cmd_verify(scenario_path);
    return cmd_zre(scenario_path, prices);
  } catch (const zr::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const zr::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
