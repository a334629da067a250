#pragma once

#include <string>
#include <vector>

#include "uamo/cli/config.hpp"

namespace uamo::cli {

// Rectangular numeric table; rows keep insertion order.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  explicit CsvTable(std::vector<std::string> cols) : columns(std::move(cols)) {}
  void add(std::vector<double> row);
};

// %.17g with '.' as decimal separator regardless of locale.
std::string format_number(double v);

// Two '#' provenance lines (format_version, resolved config), header, rows.
std::string render_csv(const CsvTable& table, const json& config);
json render_json(const CsvTable& table, const json& config);

// Writes <dir>/<stem>.csv or <dir>/<stem>.json according to config.format.
std::string write_table(const std::string& dir, const std::string& stem, const CsvTable& table,
                        const RunConfig& config);
std::string write_document(const std::string& dir, const std::string& name, json doc, const RunConfig& config);

}  // namespace uamo::cli
