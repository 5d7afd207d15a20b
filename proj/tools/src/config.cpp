#include "spinsq/cli/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <openssl/evp.h>

namespace spinsq::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

Config Config::load(const std::filesystem::path& path, const std::string& section) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "config error: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), section);
}

Config Config::parse(const std::string& text, const std::string& section) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "config error: line " + std::to_string(e.line()) + ": " + e.message());
  }
  const auto found = tree.get_child_optional(section);
  if (!found) throw ConfigError("[" + section + "]", "config error: missing section [" + section + "]");
  Config config;
  config.section_ = *found;
  config.section_name_ = section;
  config.hash_ = sha256_hex(text);
  return config;
}

void Config::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(key, "config error: [" + section_name_ + "] key '" + key + "': " + message);
}

std::optional<std::string> Config::raw(const std::string& key) const {
  used_.insert(key);
  // Keys are matched literally; dotted keys are not paths.
  const auto it = section_.find(key);
  if (it == section_.not_found()) return std::nullopt;
  return trim(it->second.data());
}

bool Config::has(const std::string& key) const {
  return section_.find(key) != section_.not_found();
}

double Config::number(const std::string& key, std::optional<double> fallback) const {
  const auto value = raw(key);
  if (!value) {
    if (fallback) return *fallback;
    fail(key, "required number is missing");
  }
  double out = 0;
  const char* first = value->data();
  const char* last = first + value->size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) fail(key, "expected a number, got '" + *value + "'");
  return out;
}

int Config::integer(const std::string& key, std::optional<int> fallback) const {
  const auto value = raw(key);
  if (!value) {
    if (fallback) return *fallback;
    fail(key, "required integer is missing");
  }
  int out = 0;
  const char* first = value->data();
  const char* last = first + value->size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) fail(key, "expected an integer, got '" + *value + "'");
  return out;
}

std::string Config::text(const std::string& key, std::optional<std::string> fallback) const {
  const auto value = raw(key);
  if (!value) {
    if (fallback) return *fallback;
    fail(key, "required value is missing");
  }
  return *value;
}

bool Config::flag(const std::string& key, std::optional<bool> fallback) const {
  const auto value = raw(key);
  if (!value) {
    if (fallback) return *fallback;
    fail(key, "required flag is missing");
  }
  if (*value == "true" || *value == "1" || *value == "yes") return true;
  if (*value == "false" || *value == "0" || *value == "no") return false;
  fail(key, "expected true/false, got '" + *value + "'");
}

void Config::reject_unknown() const {
  for (const auto& [key, node] : section_) {
    if (!used_.contains(key)) fail(key, "unknown key");
  }
}

}  // namespace spinsq::cli
