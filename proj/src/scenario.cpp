#include "zerorate/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace zr {

namespace {

using nlohmann::json;

int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Finds the line of a key path by walking successive quoted keys through the
// raw text. Good enough for hand-written scenario files.
int locate(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const std::string& key : path) {
    const std::size_t found = text.find('"' + key + '"', pos);
    if (found == std::string::npos) return 0;
    pos = found + 1;
  }
  return path.empty() ? 0 : line_at(text, pos);
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    std::string dotted;
    for (const auto& k : path) dotted += (dotted.empty() ? "" : ".") + k;
    throw ScenarioError(source_, locate(text_, path), (dotted.empty() ? "" : dotted + ": ") + message);
  }

  void only_keys(const json& object, const std::vector<std::string>& path, std::initializer_list<const char*> allowed) const {
    if (!object.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : object.items()) {
      const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
      if (!known) {
        auto where = path;
        where.push_back(key);
        fail(where, "unknown key");
      }
    }
  }

  double number(const json& value, const std::vector<std::string>& path) const {
    if (!value.is_number()) fail(path, "expected a number");
    return value.get<double>();
  }

  // A list of numbers, or {"from": a, "to": b, "steps": n} for an even grid.
  std::vector<double> axis(const json& value, const std::vector<std::string>& path) const {
    std::vector<double> out;
    if (value.is_array()) {
      for (const auto& v : value) out.push_back(number(v, path));
    } else if (value.is_object()) {
      only_keys(value, path, {"from", "to", "steps"});
      if (!value.contains("from") || !value.contains("to") || !value.contains("steps")) {
        fail(path, "range needs from, to and steps");
      }
      const double from = number(value["from"], path);
      const double to = number(value["to"], path);
      if (!value["steps"].is_number_integer() || value["steps"].get<int>() < 1) fail(path, "steps must be a positive integer");
      const int steps = value["steps"].get<int>();
      for (int k = 0; k < steps; ++k) {
        // Exact endpoints; interior points are rounded to 12 decimals so a
        // 0.1-step range yields the literal values 0.1, 0.2, ...
        const double raw = steps == 1 ? from : from + (to - from) * k / (steps - 1);
        out.push_back(std::round(raw * 1e12) / 1e12);
      }
    } else {
      fail(path, "expected a list of numbers or a range object");
    }
    if (out.empty()) fail(path, "must not be empty");
    return out;
  }

  const std::string& text() const { return text_; }

 private:
  const std::string& text_;
  std::string source_;
};

}  // namespace

ScenarioError::ScenarioError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message), line_(line) {}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(source, line_at(text, e.byte > 0 ? e.byte - 1 : 0), "malformed JSON");
  }
  const Reader r(text, source);
  r.only_keys(doc, {}, {"name", "market", "price_grid", "mode", "delta_grid", "output", "expect"});

  Scenario s;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) r.fail({"name"}, "expected a string");
    s.name = doc["name"].get<std::string>();
  }

  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) r.fail({"mode"}, "expected a string");
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "fixed-delta") {
      s.mode = ScenarioMode::FixedDelta;
    } else if (mode == "discount-game") {
      s.mode = ScenarioMode::DiscountGame;
    } else {
      r.fail({"mode"}, "must be \"fixed-delta\" or \"discount-game\"");
    }
  }

  if (!doc.contains("market")) r.fail({}, "missing required key \"market\"");
  const json& market = doc["market"];
  r.only_keys(market, {"market"}, {"n_cps", "n_isps", "alpha", "c", "q", "delta", "phi", "psi", "total_users"});
  for (const char* key : {"alpha", "c", "q", "phi", "psi"}) {
    if (!market.contains(key)) r.fail({"market"}, std::string("missing required key \"") + key + "\"");
  }

  if (!doc.contains("price_grid")) r.fail({}, "missing required key \"price_grid\"");
  if (!doc["price_grid"].is_array() || doc["price_grid"].empty()) r.fail({"price_grid"}, "expected a non-empty list of axes");
  for (const auto& axis : doc["price_grid"]) s.price_grid.push_back(r.axis(axis, {"price_grid"}));

  MarketConfig& m = s.market;
  m.alpha = r.number(market["alpha"], {"market", "alpha"});
  m.c = r.number(market["c"], {"market", "c"});
  m.q = r.axis(market["q"], {"market", "q"});
  m.phi = r.axis(market["phi"], {"market", "phi"});
  m.psi = r.axis(market["psi"], {"market", "psi"});
  if (market.contains("total_users")) m.total_users = r.number(market["total_users"], {"market", "total_users"});
  m.n_cps = static_cast<int>(m.q.size());
  m.n_isps = static_cast<int>(s.price_grid.size());
  if (market.contains("n_cps")) {
    if (!market["n_cps"].is_number_integer() || market["n_cps"].get<int>() != m.n_cps) {
      r.fail({"market", "n_cps"}, "does not match the length of q");
    }
  }
  if (market.contains("n_isps")) {
    if (!market["n_isps"].is_number_integer() || market["n_isps"].get<int>() != m.n_isps) {
      r.fail({"market", "n_isps"}, "does not match the number of price_grid axes");
    }
  }
  if (market.contains("delta")) {
    m.delta = r.axis(market["delta"], {"market", "delta"});
  } else if (s.mode == ScenarioMode::DiscountGame) {
    m.delta.assign(static_cast<std::size_t>(m.n_isps), 1.0);
  } else {
    r.fail({"market"}, "missing required key \"delta\" (fixed-delta mode)");
  }

  // Validate every grid cell's market up front; the message names the field.
  for (std::size_t axis = 0; axis < s.price_grid.size(); ++axis) {
    for (double v : s.price_grid[axis]) {
      if (!(v >= 0.0)) r.fail({"price_grid"}, "prices must be non-negative");
    }
  }
  m.p.clear();
  for (const auto& axis : s.price_grid) m.p.push_back(axis.front());
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    const std::string message = e.what();
    const std::string field = message.substr(0, message.find(' '));
    if (field == "p") r.fail({"price_grid"}, message);
    if (field == "n_isps") r.fail({"price_grid"}, message);
    r.fail({"market", field}, message);
  }

  if (doc.contains("delta_grid")) {
    if (s.mode != ScenarioMode::DiscountGame) r.fail({"delta_grid"}, "only valid in discount-game mode");
    s.delta_grid = r.axis(doc["delta_grid"], {"delta_grid"});
    for (double d : s.delta_grid) {
      if (d < 0.0 || d > 1.0) r.fail({"delta_grid"}, "discounts must lie in [0,1]");
    }
  } else if (s.mode == ScenarioMode::DiscountGame) {
    for (int k = 0; k <= 10; ++k) s.delta_grid.push_back(k / 10.0);
  }

  if (doc.contains("output")) {
    r.only_keys(doc["output"], {"output"}, {"dir"});
    if (doc["output"].contains("dir")) {
      if (!doc["output"]["dir"].is_string()) r.fail({"output", "dir"}, "expected a string");
      s.output_dir = doc["output"]["dir"].get<std::string>();
    }
  }

  if (doc.contains("expect")) {
    r.only_keys(doc["expect"], {"expect"}, {"no_zre_cells"});
    if (doc["expect"].contains("no_zre_cells")) {
      const json& cells = doc["expect"]["no_zre_cells"];
      if (!cells.is_array()) r.fail({"expect", "no_zre_cells"}, "expected a list of price points");
      std::vector<std::vector<double>> points;
      for (const auto& cell : cells) {
        if (!cell.is_array() || cell.size() != static_cast<std::size_t>(m.n_isps)) {
          r.fail({"expect", "no_zre_cells"}, "each price point needs one price per ISP");
        }
        std::vector<double> point;
        for (const auto& v : cell) point.push_back(r.number(v, {"expect", "no_zre_cells"}));
        points.push_back(std::move(point));
      }
      s.expected_no_zre = std::move(points);
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), 0, "cannot open scenario file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

}  // namespace zr
