#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tleak {

enum class ColumnType { real, integer };

struct Column {
  std::string name;
  ColumnType type = ColumnType::real;
};

// Flat numeric table. Failed rows keep their keys and carry NaN in the value columns.
struct ResultTable {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
  std::vector<nlohmann::json> row_flags;  // one object per row
  nlohmann::json metadata = nlohmann::json::object();

  int column_index(const std::string& name) const;  // -1 if absent
  std::vector<double> column(const std::string& name) const;
  void add_row(std::vector<double> values, nlohmann::json flags = nlohmann::json::object());
  bool all_rows_ok() const;

  std::string to_csv() const;
  void write_csv(const std::string& path) const;
  // Writes <path>.meta.json with the metadata and the per-row flags.
  void write_metadata(const std::string& csv_path) const;

  static ResultTable read_csv(const std::string& path);
};

std::string metadata_path(const std::string& csv_path);

}  // namespace tleak
