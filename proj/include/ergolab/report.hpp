#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ergolab/errors.hpp"

namespace ergolab {

inline constexpr const char* kLibraryVersion = "0.3.0";

/// Decimal form with 17 significant digits; round-trips every double.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string command;
  int n = 2;
  std::vector<double> t_grid;
  std::optional<double> theta;
  int quad_nodes = 0;  // 0: 1024 circle nodes (n = 2), 16^3 Euler nodes (n = 3)
  std::optional<double> inner_scale;
  std::string f = "one";
  std::string phi = "one";
  std::string psi = "one";
  std::string u = "all";
  std::string v = "all";
  int level = 1;
  double r = 0.5;
  std::vector<double> s_grid;
  double alpha = 0.0;
  std::vector<std::int64_t> sizes;
  std::string cache_dir;
  std::string out;
  std::string format = "json";
  double max_T2 = 14.0;
  double max_T3 = 1.8;
  std::int64_t max_records = 5'000'000;
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["n"] = c.n;
  j["T_grid"] = c.t_grid;
  j["theta"] = c.theta ? nlohmann::json(*c.theta) : nlohmann::json(nullptr);
  j["quad_nodes"] = c.quad_nodes;
  j["inner_scale"] = c.inner_scale ? nlohmann::json(*c.inner_scale) : nlohmann::json(nullptr);
  j["f"] = c.f;
  j["phi"] = c.phi;
  j["psi"] = c.psi;
  j["U"] = c.u;
  j["V"] = c.v;
  j["level"] = c.level;
  j["r"] = c.r;
  j["s_grid"] = c.s_grid;
  j["alpha"] = c.alpha;
  j["sizes"] = c.sizes;
  j["cache_dir"] = c.cache_dir;
  j["out"] = c.out;
  j["format"] = c.format;
  j["max_T2"] = c.max_T2;
  j["max_T3"] = c.max_T3;
  j["max_records"] = c.max_records;
  j["seed"] = c.seed;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.n = j.at("n").get<int>();
    c.t_grid = j.at("T_grid").get<std::vector<double>>();
    if (!j.at("theta").is_null()) c.theta = j.at("theta").get<double>();
    c.quad_nodes = j.at("quad_nodes").get<int>();
    if (!j.at("inner_scale").is_null()) c.inner_scale = j.at("inner_scale").get<double>();
    c.f = j.at("f").get<std::string>();
    c.phi = j.at("phi").get<std::string>();
    c.psi = j.at("psi").get<std::string>();
    c.u = j.at("U").get<std::string>();
    c.v = j.at("V").get<std::string>();
    c.level = j.at("level").get<int>();
    c.r = j.at("r").get<double>();
    c.s_grid = j.at("s_grid").get<std::vector<double>>();
    c.alpha = j.at("alpha").get<double>();
    c.sizes = j.at("sizes").get<std::vector<std::int64_t>>();
    c.cache_dir = j.at("cache_dir").get<std::string>();
    c.out = j.at("out").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.max_T2 = j.at("max_T2").get<double>();
    c.max_T3 = j.at("max_T3").get<double>();
    c.max_records = j.at("max_records").get<std::int64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

/// Compact JSON with sorted keys and every float printed by format_number.
inline void write_json(std::ostream& os, const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        os << nlohmann::json(it.key()).dump() << ':';
        write_json(os, it.value());
      }
      os << '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      os << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',';
        write_json(os, j[i]);
      }
      os << ']';
      break;
    }
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      // JSON has no inf/nan
      if (std::isfinite(x))
        os << format_number(x);
      else
        os << "null";
      break;
    }
    default:
      os << j.dump();
  }
}

inline std::string canonical(const RunConfig& c) {
  std::ostringstream os;
  write_json(os, to_json(c));
  return os.str();
}

// ---------------------------------------------------------------------------
// Result tables and the envelope
// ---------------------------------------------------------------------------

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error("row width does not match the table header");
    rows.push_back(std::move(row));
  }
};

inline nlohmann::json cell_json(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) return std::get<std::int64_t>(c);
  if (std::holds_alternative<double>(c)) return std::get<double>(c);
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return nullptr;
}

inline std::string cell_text(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return "";
}

struct ResultEnvelope {
  RunConfig config;
  std::string version = kLibraryVersion;
  double wall_time_s = 0.0;
  Table data;
};

/// The deterministic part of an envelope: columns and rows.
inline std::string data_section(const Table& t) {
  nlohmann::json d;
  d["columns"] = t.columns;
  d["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    d["rows"].push_back(std::move(r));
  }
  std::ostringstream os;
  write_json(os, d);
  return os.str();
}

inline void write_envelope_json(std::ostream& os, const ResultEnvelope& e) {
  os << "{\"config\":" << canonical(e.config) << ",\"version\":" << nlohmann::json(e.version).dump()
     << ",\"wall_time_s\":" << format_number(e.wall_time_s) << ",\"data\":" << data_section(e.data) << "}\n";
}

/// CSV: one comment line with the config echo, the column header, then rows.
inline void write_envelope_csv(std::ostream& os, const ResultEnvelope& e) {
  os << "# " << canonical(e.config) << " version=" << e.version << "\n";
  for (std::size_t i = 0; i < e.data.columns.size(); ++i) os << (i ? "," : "") << e.data.columns[i];
  os << "\n";
  for (const auto& row : e.data.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << "\n";
  }
}

}  // namespace ergolab
