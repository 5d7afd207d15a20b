#include <iostream>

#include "CLI11.hpp"
#include "spinsq/cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace spinsq::cli;
  CLI::App app{"spinsq: spin squeezing scenarios"};
  RunOptions options;
  std::string format = "csv";
  app.add_option("subcommand", options.subcommand, "scenario to run")
      ->required()
      ->check(CLI::IsMember(subcommand_names()));
  app.add_option("--config", options.config, "INI file with a [subcommand] section")->required();
  app.add_option("--out", options.out, "output directory")->capture_default_str();
  app.add_option("--jobs", options.jobs, "worker threads for scans")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--format", format, "table format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  options.format = format == "json" ? Format::Json : Format::Csv;
  return run(options, std::cerr);
}
