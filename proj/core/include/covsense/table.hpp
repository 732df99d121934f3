#pragma once

// Tabular experiment output with a self-describing header, written as CSV or JSON.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace covsense {

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;
  /// Numeric value of a cell (NaN for strings).
  double number(std::size_t row, const std::string& column) const;
  const std::string& text(std::size_t row, const std::string& column) const;
};

struct OutputHeader {
  std::string version;
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config;
};

/// Doubles use %.17g; non-finite values print as nan / inf / -inf.
std::string format_cell(const Cell& cell);

/// Header lines start with '#', followed by one CSV header row and the data rows.
void write_csv(std::ostream& out, const OutputHeader& header, const Table& table);
/// {"version", "command", "seed", "config", "columns", "rows": [{column: value}]};
/// non-finite doubles become null.
void write_json(std::ostream& out, const OutputHeader& header, const Table& table);

}  // namespace covsense
