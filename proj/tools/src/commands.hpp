#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinsq/cli/config.hpp"
#include "spinsq/cli/output.hpp"

namespace spinsq::cli {

struct CommandContext {
  const Config& config;
  std::filesystem::path out;
  int jobs = 1;
  bool json = false;
  std::vector<std::filesystem::path> outputs;
  nlohmann::json summary = nlohmann::json::object();

  Table table(std::vector<Column> columns) const;
  void emit(const std::string& stem, const Table& table);
  void emit_json(const std::string& stem, const nlohmann::json& value);
};

void ramsey_sweep(CommandContext& ctx);
void twist_evolve(CommandContext& ctx);
void master_evolve(CommandContext& ctx);
void moment_evolve(CommandContext& ctx);
void compare_oracle(CommandContext& ctx);
void cavity_squeeze(CommandContext& ctx);
void cavity_scan(CommandContext& ctx);
void wigner_map(CommandContext& ctx);
void regime_report(CommandContext& ctx);

}  // namespace spinsq::cli
