#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace spinsq::cli {

enum class Format { Csv, Json };

struct RunOptions {
  std::string subcommand;
  std::filesystem::path config;
  std::filesystem::path out = ".";
  int jobs = 1;
  Format format = Format::Csv;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

const std::vector<std::string>& subcommand_names();

/// Runs one subcommand, writes its outputs and manifest.json into
/// options.out, and returns the exit status. Diagnostics go to `log`.
int run(const RunOptions& options, std::ostream& log);

/// Calls body(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace spinsq::cli
