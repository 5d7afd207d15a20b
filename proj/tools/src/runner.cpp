#include "spinsq/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <openssl/opensslv.h>

#include "commands.hpp"
#include "spinsq/error.hpp"

#ifndef SPINSQ_VERSION
#define SPINSQ_VERSION "unknown"
#endif

namespace spinsq::cli {

namespace {

using Command = void (*)(CommandContext&);

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"ramsey-sweep", ramsey_sweep},     {"twist-evolve", twist_evolve},
      {"master-evolve", master_evolve},   {"moment-evolve", moment_evolve},
      {"compare-oracle", compare_oracle}, {"cavity-squeeze", cavity_squeeze},
      {"cavity-scan", cavity_scan},       {"wigner-map", wigner_map},
      {"regime-report", regime_report},
  };
  return table;
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, _] : commands()) v.push_back(name);
    return v;
  }();
  return names;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex guard;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!first) first = std::current_exception();
        next = count;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (first) std::rethrow_exception(first);
}

int run(const RunOptions& options, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const auto it = commands().find(options.subcommand);
  if (it == commands().end()) {
    log << "unknown subcommand '" << options.subcommand << "'\n";
    return kExitConfig;
  }
  try {
    if (options.jobs < 1) throw ConfigError("--jobs", "config error: --jobs must be >= 1");
    const Config config = Config::load(options.config, options.subcommand);
    std::filesystem::create_directories(options.out);
    CommandContext ctx{config, options.out, options.jobs, options.format == Format::Json, {}, {}};
    it->second(ctx);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::json manifest;
    manifest["subcommand"] = options.subcommand;
    manifest["config"] = options.config.string();
    manifest["config_sha256"] = config.sha256();
    manifest["versions"] = {{"spinsq", SPINSQ_VERSION},
                            {"eigen", eigen_version()},
                            {"boost", BOOST_LIB_VERSION},
                            {"openssl", OPENSSL_VERSION_TEXT}};
    manifest["jobs"] = options.jobs;
    manifest["format"] = options.format == Format::Json ? "json" : "csv";
    manifest["outputs"] = nlohmann::json::array();
    for (const auto& p : ctx.outputs) manifest["outputs"].push_back(p.filename().string());
    manifest["wall_time_seconds"] = wall;
    manifest["summary"] = ctx.summary;
    write_json(options.out, "manifest", manifest);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << (e.is_numerical() ? "numerical failure: " : "invalid input: ") << e.what() << '\n';
    return e.is_numerical() ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace spinsq::cli
