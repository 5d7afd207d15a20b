#include "spinsq/cli/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace spinsq::cli {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match columns");
  rows.push_back(std::move(row));
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buffer{};
  const auto [end, ec] =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                    std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buffer.data(), end);
}

std::string to_csv(const Table& table) {
  std::string out;
  out += "# spinsq " + table.subcommand + "\n";
  out += "# config_sha256: " + table.config_hash + "\n";
  out += "# units:";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i == 0 ? " " : ", ") + table.columns[i].name + " [" + table.columns[i].unit + "]";
  }
  out += "\n";
  for (const auto& note : table.notes) out += "# " + note + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i].name;
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Table& table) {
  nlohmann::json j;
  j["subcommand"] = table.subcommand;
  j["config_sha256"] = table.config_hash;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : table.columns) j["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
  j["notes"] = table.notes;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) {
      if (std::isfinite(v)) {
        r.push_back(v);
      } else {
        r.push_back(nullptr);
      }
    }
    j["rows"].push_back(std::move(r));
  }
  return j;
}

namespace {

std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path;
}

}  // namespace

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const Table& table, bool json) {
  if (json) return write_text(dir / (stem + ".json"), to_json(table).dump(2) + "\n");
  return write_text(dir / (stem + ".csv"), to_csv(table));
}

std::filesystem::path write_json(const std::filesystem::path& dir, const std::string& stem,
                                 const nlohmann::json& value) {
  return write_text(dir / (stem + ".json"), value.dump(2) + "\n");
}

}  // namespace spinsq::cli
