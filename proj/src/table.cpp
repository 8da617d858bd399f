#include "tleak/table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tleak/errors.hpp"

namespace tleak {

namespace {

std::string format_cell(double x, ColumnType type) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  if (type == ColumnType::integer) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(x)));
  } else {
    std::snprintf(buf, sizeof buf, "%.15e", x);
  }
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

int ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<double> ResultTable::column(const std::string& name) const {
  const int c = column_index(name);
  if (c < 0) throw InvalidParameter("table has no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

void ResultTable::add_row(std::vector<double> values, nlohmann::json flags) {
  if (values.size() != columns.size()) throw InvalidParameter("row width does not match the column count");
  rows.push_back(std::move(values));
  if (!flags.contains("ok")) flags["ok"] = true;
  row_flags.push_back(std::move(flags));
}

bool ResultTable::all_rows_ok() const {
  for (const auto& f : row_flags) {
    if (!f.value("ok", true)) return false;
  }
  return true;
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c].name;
  }
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_cell(r[c], columns[c].type);
    }
    out += '\n';
  }
  return out;
}

void ResultTable::write_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << to_csv();
  if (!os) throw Error("failed writing '" + path + "'");
}

void ResultTable::write_metadata(const std::string& csv_path) const {
  nlohmann::json meta = metadata;
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns) {
    cols.push_back({{"name", c.name}, {"type", c.type == ColumnType::integer ? "integer" : "real"}});
  }
  meta["columns"] = cols;
  nlohmann::json flags = nlohmann::json::array();
  for (std::size_t i = 0; i < row_flags.size(); ++i) {
    nlohmann::json f = row_flags[i];
    f["row"] = i;
    flags.push_back(std::move(f));
  }
  meta["rows"] = flags;
  const std::string path = metadata_path(csv_path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << meta.dump(2) << '\n';
}

ResultTable ResultTable::read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidParameter("cannot read table '" + path + "'");
  ResultTable t;
  std::string line;
  if (!std::getline(is, line)) throw InvalidParameter("table '" + path + "' is empty");
  for (const auto& name : split(line, ',')) t.columns.push_back({name, ColumnType::real});
  std::vector<bool> integral(t.columns.size(), true);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) throw InvalidParameter("table '" + path + "' has a ragged row");
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      const double x = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0') {
        throw InvalidParameter("table '" + path + "': cannot parse '" + cells[c] + "'");
      }
      if (cells[c].find_first_of(".eEn") != std::string::npos) integral[c] = false;
      row.push_back(x);
    }
    t.add_row(std::move(row));
  }
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (integral[c] && !t.rows.empty()) t.columns[c].type = ColumnType::integer;
  }
  return t;
}

std::string metadata_path(const std::string& csv_path) { return csv_path + ".meta.json"; }

}  // namespace tleak
