#include "uamo/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace uamo::cli {

namespace fs = std::filesystem;

void CsvTable::add(std::vector<double> row) {
  require(row.size() == columns.size(), "table row width does not match header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string render_csv(const CsvTable& table, const json& config) {
  std::string s = "# format_version: " + std::to_string(format_version) + "\n";
  s += "# config: " + config.dump() + "\n";
  for (size_t k = 0; k < table.columns.size(); ++k) s += (k ? "," : "") + table.columns[k];
  s += "\n";
  for (const auto& row : table.rows) {
    for (size_t k = 0; k < row.size(); ++k) {
      if (k) s += ',';
      s += format_number(row[k]);
    }
    s += "\n";
  }
  return s;
}

json render_json(const CsvTable& table, const json& config) {
  json rows = json::array();
  for (const auto& row : table.rows) rows.push_back(row);
  return json{{"format_version", format_version}, {"config", config}, {"columns", table.columns}, {"rows", rows}};
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write output file", path.string());
}

}  // namespace

std::string write_table(const std::string& dir, const std::string& stem, const CsvTable& table,
                        const RunConfig& config) {
  json cfg = to_json(config);
  fs::path path = fs::path(dir) / (stem + "." + config.format);
  if (config.format == "csv")
    write_file(path, render_csv(table, cfg));
  else
    write_file(path, render_json(table, cfg).dump(2) + "\n");
  return path.string();
}

std::string write_document(const std::string& dir, const std::string& name, json doc, const RunConfig& config) {
  doc["format_version"] = format_version;
  doc["config"] = to_json(config);
  fs::path path = fs::path(dir) / name;
  write_file(path, doc.dump(2) + "\n");
  return path.string();
}

}  // namespace uamo::cli
