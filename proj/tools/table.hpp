#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lab {

struct Provenance {
  std::string command, version, mode;
  std::uint64_t seed = 0;
};

/// One artifact: named columns, rows of preformatted fields, optional summary entries.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> summary;
  nlohmann::json extra;  // JSON-only payload (laws, castles)
};

inline std::string num(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.18Lg", v);
  return buf;
}

inline std::string num(std::int64_t v) { return std::to_string(v); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& out, const Provenance& p, const Table& t) {
  out << "# llt_lab version=" << p.version << " command=" << p.command << " seed=" << p.seed
      << " mode=" << p.mode << "\n";
  for (const auto& [k, v] : t.summary) out << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << "\n";
  }
}

inline void write_json(std::ostream& out, const Provenance& p, const Table& t) {
  nlohmann::ordered_json j;
  j["provenance"] = {{"version", p.version}, {"command", p.command}, {"seed", p.seed}, {"mode", p.mode}};
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.summary) s[k] = v;
  j["summary"] = s;
  if (!t.extra.is_null()) j["data"] = nlohmann::ordered_json::parse(t.extra.dump());
  out << j.dump(2) << "\n";
}

}  // namespace lab
