#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace spinsq::cli {

struct Column {
  std::string name;
  std::string unit;
};

struct Table {
  std::string subcommand;
  std::string config_hash;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;  // extra header comment lines

  void add_row(std::vector<double> row);
};

/// 17 significant digits, shortest form that round-trips at that precision.
std::string format_number(double value);

/// CSV with '#' header lines (subcommand, config hash, units, notes) and LF
/// line endings.
std::string to_csv(const Table& table);

nlohmann::json to_json(const Table& table);

/// Writes the table as <stem>.csv or <stem>.json; returns the path.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const Table& table, bool json);

std::filesystem::path write_json(const std::filesystem::path& dir, const std::string& stem,
                                 const nlohmann::json& value);

}  // namespace spinsq::cli
