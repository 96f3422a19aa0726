#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cavspin {

/// Ordered key=value record of every resolved run parameter.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, bool value);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::optional<std::string> get(const std::string& key) const;

  /// Flat JSON object with the same keys, values kept as strings.
  std::string to_json() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Numeric table; empty cells mark values that are undefined for the run.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<std::pair<std::string, std::string>> summary;  // trailing "# key=value" lines

  void add_row(std::vector<std::optional<double>> row);
};

/// Shortest text that round-trips: 17 significant digits.
std::string format_number(double value);

/// Manifest as "# key=value" lines, then the header and rows, then the summary.
void write_csv(std::ostream& out, const Manifest& manifest, const CsvTable& table);

}  // namespace cavspin
