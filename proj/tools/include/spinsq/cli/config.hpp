#pragma once

// INI-style run configuration. One section per subcommand:
//
//   [ramsey-sweep]
//   N = 100
//   state = psi_a
//   a = -1
//
// Every key a subcommand does not read is rejected, so typos surface as
// config errors naming the key.

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace spinsq::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class Config {
 public:
  /// Reads `path` and selects `section`. A missing section is an error.
  static Config load(const std::filesystem::path& path, const std::string& section);

  /// Parses INI text directly (hash computed over the text).
  static Config parse(const std::string& text, const std::string& section);

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const;
  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) const;
  std::string text(const std::string& key,
                   std::optional<std::string> fallback = std::nullopt) const;
  bool flag(const std::string& key, std::optional<bool> fallback = std::nullopt) const;
  bool has(const std::string& key) const;

  /// Fails on the first key that no accessor asked for.
  void reject_unknown() const;

  const std::string& sha256() const noexcept { return hash_; }
  const std::string& section() const noexcept { return section_name_; }

  /// ConfigError for `key` with a message prefixed by the section.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::optional<std::string> raw(const std::string& key) const;

  boost::property_tree::ptree section_;
  std::string section_name_;
  std::string hash_;
  mutable std::set<std::string> used_;
};

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

}  // namespace spinsq::cli
