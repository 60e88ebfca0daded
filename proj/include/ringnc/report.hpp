#pragma once

// Result rows and their CSV / JSON serializations.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "ringnc/baselines.hpp"
#include "ringnc/errors.hpp"

namespace ringnc {

struct ReportRow {
  MethodTag method{MethodTag::RingPmoo};
  int scenario{0};  // 0 for a user-supplied network
  int nodes{0};
  double load_pct{0.0};
  double burst_bytes{0.0};
  std::string traffic_class;
  int flow_id{0};
  int hops{0};
  double delay_bound_s{0.0};  // +inf when infeasible
  bool stable{true};
  double det_margin{std::numeric_limits<double>::quiet_NaN()};

  friend bool operator==(const ReportRow& a, const ReportRow& b) {
    const auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.method == b.method && a.scenario == b.scenario && a.nodes == b.nodes && same(a.load_pct, b.load_pct) &&
           same(a.burst_bytes, b.burst_bytes) && a.traffic_class == b.traffic_class && a.flow_id == b.flow_id &&
           a.hops == b.hops && same(a.delay_bound_s, b.delay_bound_s) && a.stable == b.stable &&
           same(a.det_margin, b.det_margin);
  }
};

enum class ReportFormat { Csv, Json };

inline constexpr std::string_view kCsvHeader =
    "method,scenario,M,load_pct,burst_bytes,traffic_class,flow_id,hops,delay_bound_s,stable,det_margin";

// Shortest round-trip decimal; "INF" for +inf and "NaN" for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "INF" : "-INF";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, end);
}

inline double parse_number(std::string_view s) {
  if (s == "INF") return std::numeric_limits<double>::infinity();
  if (s == "-INF") return -std::numeric_limits<double>::infinity();
  if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("not a number: '" + std::string(s) + "'");
  return v;
}

inline void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << to_string(r.method) << ',' << r.scenario << ',' << r.nodes << ',' << format_number(r.load_pct) << ','
       << format_number(r.burst_bytes) << ',' << r.traffic_class << ',' << r.flow_id << ',' << r.hops << ','
       << format_number(r.delay_bound_s) << ',' << (r.stable ? "true" : "false") << ','
       << format_number(r.det_margin) << '\n';
  }
}

inline std::string to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

namespace detail {

// Non-finite numbers travel as the same literals used in CSV.
inline nlohmann::ordered_json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline double number_from_json(const nlohmann::ordered_json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>());
  throw ParseError(where + ": expected a number");
}

}  // namespace detail

inline nlohmann::ordered_json rows_to_json(const std::vector<ReportRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({
        {"method", to_string(r.method)},
        {"scenario", r.scenario},
        {"M", r.nodes},
        {"load_pct", detail::number_to_json(r.load_pct)},
        {"burst_bytes", detail::number_to_json(r.burst_bytes)},
        {"traffic_class", r.traffic_class},
        {"flow_id", r.flow_id},
        {"hops", r.hops},
        {"delay_bound_s", detail::number_to_json(r.delay_bound_s)},
        {"stable", r.stable},
        {"det_margin", detail::number_to_json(r.det_margin)},
    });
  }
  return arr;
}

inline std::vector<ReportRow> rows_from_json(const nlohmann::ordered_json& arr) {
  if (!arr.is_array()) throw ParseError("report: expected an array of rows");
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& o = arr[i];
    const std::string where = "rows[" + std::to_string(i) + "]";
    try {
      ReportRow r;
      const auto tag = parse_method(o.at("method").get<std::string>());
      if (!tag) throw ParseError(where + ".method: unknown method");
      r.method = *tag;
      r.scenario = o.at("scenario").get<int>();
      r.nodes = o.at("M").get<int>();
      r.load_pct = detail::number_from_json(o.at("load_pct"), where + ".load_pct");
      r.burst_bytes = detail::number_from_json(o.at("burst_bytes"), where + ".burst_bytes");
      r.traffic_class = o.at("traffic_class").get<std::string>();
      r.flow_id = o.at("flow_id").get<int>();
      r.hops = o.at("hops").get<int>();
      r.delay_bound_s = detail::number_from_json(o.at("delay_bound_s"), where + ".delay_bound_s");
      r.stable = o.at("stable").get<bool>();
      r.det_margin = detail::number_from_json(o.at("det_margin"), where + ".det_margin");
      rows.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return rows;
}

inline std::string to_json_text(const std::vector<ReportRow>& rows) { return rows_to_json(rows).dump(2) + "\n"; }

inline std::vector<ReportRow> rows_from_json_text(std::string_view text) {
  try {
    return rows_from_json(nlohmann::ordered_json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

inline void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
  if (rows.empty()) throw Error("emit_report: no rows to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << (format == ReportFormat::Csv ? to_csv(rows) : to_json_text(rows));
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace ringnc
