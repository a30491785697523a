#include "zerorate/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace zr {

namespace {

void write_header(std::ostream& out, const std::vector<std::string>& columns) {
  for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
  out << '\n';
}

std::vector<std::string> numbered(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int k = 1; k <= count; ++k) out.push_back(stem + std::to_string(k));
  return out;
}

void append(std::vector<std::string>& to, const std::vector<std::string>& more) { to.insert(to.end(), more.begin(), more.end()); }

std::string theta_text(const std::optional<StrategyMatrix>& selected) {
  return selected ? selected->to_bitstring() : std::string("NOZRE");
}

std::string sign_word(Sign s) {
  switch (s) {
    case Sign::Up:
      return "up";
    case Sign::Down:
      return "down";
    case Sign::Flat:
      break;
  }
  return "flat";
}

// JSON numbers carry the same 12 significant digits as the CSV files.
double rounded(double value) { return std::stod(format_number(value)); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  std::string text = buffer;
  if (text == "-0") return "0";
  return text;
}

void write_grid_csv(std::ostream& out, const MarketConfig& market, std::span<const SweepRecord> records,
                    bool with_deltas) {
  std::vector<std::string> columns = numbered("p_", market.n_isps);
  if (with_deltas) append(columns, numbered("delta_", market.n_isps));
  columns.emplace_back("theta");
  append(columns, numbered("dU_", market.n_cps));
  append(columns, numbered("dshare_", market.n_cps));
  columns.emplace_back("dHHI");
  append(columns, numbered("pressure_", market.n_cps));
  write_header(out, columns);

  for (const SweepRecord& r : records) {
    for (double p : r.prices) out << format_number(p) << ',';
    if (with_deltas) {
      for (double d : r.deltas) out << (r.discount_found ? format_number(d) : std::string()) << ',';
    }
    out << theta_text(r.selected);
    for (double v : r.delta_utility) out << ',' << format_number(v);
    for (double v : r.delta_share) out << ',' << format_number(v);
    out << ',' << format_number(r.delta_hhi);
    for (bool flag : r.pressure) out << ',' << (flag ? 1 : 0);
    out << '\n';
  }
}

void write_summary_json(std::ostream& out, const Scenario& scenario, std::span<const SweepRecord> records) {
  using nlohmann::ordered_json;
  const AggregateSummary summary = aggregate_signs(records);

  std::size_t no_zre = 0;
  std::size_t under_pressure = 0;
  double min_dhhi = records.front().delta_hhi;
  std::map<std::string, std::size_t> profiles;
  for (const SweepRecord& r : records) {
    if (!r.selected) ++no_zre;
    for (bool flag : r.pressure) under_pressure += flag ? 1 : 0;
    min_dhhi = std::min(min_dhhi, r.delta_hhi);
    ++profiles[theta_text(r.selected)];
  }

  ordered_json doc;
  doc["scenario"] = scenario.name;
  doc["mode"] = scenario.mode == ScenarioMode::DiscountGame ? "discount-game" : "fixed-delta";
  doc["cells"] = summary.records;
  doc["no_zre_cells"] = no_zre;
  doc["cp"] = ordered_json::array();
  for (std::size_t i = 0; i < summary.mean_delta_utility.size(); ++i) {
    ordered_json cp;
    cp["index"] = i + 1;
    cp["q"] = scenario.market.q[i];
    cp["mean_delta_utility"] = rounded(summary.mean_delta_utility[i]);
    cp["utility_direction"] = sign_word(summary.utility_sign[i]);
    cp["mean_delta_share"] = rounded(summary.mean_delta_share[i]);
    cp["share_direction"] = sign_word(summary.share_sign[i]);
    doc["cp"].push_back(cp);
  }
  doc["min_delta_hhi"] = rounded(min_dhhi);
  doc["pressure_flags"] = under_pressure;
  ordered_json counts = ordered_json::object();
  for (const auto& [theta, count] : profiles) counts[theta] = count;
  doc["selected_profiles"] = counts;
  out << doc.dump(2) << '\n';
}

void write_discounts_long_csv(std::ostream& out, const MarketConfig& market, std::span<const DiscountRecord> records) {
  std::vector<std::string> columns = numbered("p_", market.n_isps);
  append(columns, numbered("delta_", market.n_isps));
  columns.emplace_back("theta");
  columns.emplace_back("status");
  write_header(out, columns);
  for (const DiscountRecord& r : records) {
    for (double p : r.prices) out << format_number(p) << ',';
    const bool found = r.outcome.status == DiscountStatus::Found;
    for (int j = 0; j < market.n_isps; ++j) {
      out << (found ? format_number(r.outcome.delta_star[static_cast<std::size_t>(j)]) : std::string()) << ',';
    }
    out << (found ? theta_text(r.outcome.zre.selected) : std::string()) << ',' << (found ? "found" : "none") << '\n';
  }
}

void write_discount_table_csv(std::ostream& out, const Scenario& scenario, std::span<const DiscountRecord> records) {
  if (scenario.market.n_isps != 2) {
    write_discounts_long_csv(out, scenario.market, records);
    return;
  }
  const auto& p1_axis = scenario.price_grid[0];
  const auto& p2_axis = scenario.price_grid[1];
  if (records.size() != p1_axis.size() * p2_axis.size()) throw std::invalid_argument("discount records do not match the grid");

  out << "p_2\\p_1";
  for (double p1 : p1_axis) out << ',' << format_number(p1);
  out << '\n';
  for (std::size_t b = 0; b < p2_axis.size(); ++b) {
    out << format_number(p2_axis[b]);
    for (std::size_t a = 0; a < p1_axis.size(); ++a) {
      // Records run with p_1 slowest.
      const DiscountRecord& r = records[a * p2_axis.size() + b];
      if (r.outcome.status == DiscountStatus::Found) {
        out << ",\"" << format_number(r.outcome.delta_star[0]) << ',' << format_number(r.outcome.delta_star[1]) << '"';
      } else {
        out << ",NONE";
      }
    }
    out << '\n';
  }
}

SweepArtifacts run_sweep(const Scenario& scenario, const std::filesystem::path& out_dir, int workers) {
  std::filesystem::create_directories(out_dir);
  SweepArtifacts artifacts;
  auto emit = [&](const std::string& name, auto&& writer) {
    const auto path = out_dir / name;
    std::ofstream out = open_output(path);
    writer(out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
    artifacts.written.push_back(path);
  };

  if (scenario.mode == ScenarioMode::FixedDelta) {
    const auto records = grid_sweep(scenario.market, scenario.price_grid, workers);
    emit("grid.csv", [&](std::ostream& out) { write_grid_csv(out, scenario.market, records); });
    emit("summary.json", [&](std::ostream& out) { write_summary_json(out, scenario, records); });
    return artifacts;
  }

  const auto records = discount_sweep(scenario.market, scenario.price_grid, scenario.delta_grid, workers);
  std::vector<SweepRecord> comparisons;
  comparisons.reserve(records.size());
  for (const auto& r : records) comparisons.push_back(r.comparison);
  emit("grid.csv", [&](std::ostream& out) { write_grid_csv(out, scenario.market, comparisons, true); });
  emit("summary.json", [&](std::ostream& out) { write_summary_json(out, scenario, comparisons); });
  emit("discounts.csv", [&](std::ostream& out) { write_discount_table_csv(out, scenario, records); });
  emit("discounts_long.csv", [&](std::ostream& out) { write_discounts_long_csv(out, scenario.market, records); });
  return artifacts;
}

}  // namespace zr
