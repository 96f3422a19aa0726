#include "cavspin/csv.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "cavspin/errors.hpp"

namespace cavspin {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_number(value)); }

void Manifest::set(const std::string& key, int value) { set(key, std::to_string(value)); }

void Manifest::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

std::optional<std::string> Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : entries_) j[k] = v;
  return j.dump(2) + "\n";
}

void CsvTable::add_row(std::vector<std::optional<double>> row) {
  if (row.size() != columns.size()) throw InvalidParameter("csv row width does not match the header");
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Manifest& manifest, const CsvTable& table) {
  for (const auto& [k, v] : manifest.entries()) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i]) out << format_number(*row[i]);
    }
    out << '\n';
  }
  for (const auto& [k, v] : table.summary) out << "# " << k << '=' << v << '\n';
}

}  // namespace cavspin
