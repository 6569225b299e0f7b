#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace evtlearn {

/// Bad configuration: unknown key, malformed value, or a value outside its range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyType { kString, kReal, kCount, kRealList, kBool };

struct Range {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;

  static Range any() { return {}; }
  static Range closed(double a, double b) { return {a, b, false, false}; }
  static Range open(double a, double b) { return {a, b, true, true}; }
  static Range left_open(double a, double b) { return {a, b, true, false}; }
  static Range at_least(double a) { return {a, std::numeric_limits<double>::infinity(), false, false}; }
  static Range above(double a) { return {a, std::numeric_limits<double>::infinity(), true, false}; }

  bool contains(double v) const;
  std::string describe() const;
};

struct KeySpec {
  std::string name;
  KeyType type = KeyType::kString;
  std::optional<std::string> fallback;  // nullopt: required
  Range range;
  std::vector<std::string> choices;     // kString only; empty means free text
};

using Schema = std::vector<KeySpec>;

/// Flat "key = value" text, '#' starts a comment. Every key must appear in the schema
/// and every value is checked when it is set.
class Config {
 public:
  explicit Config(Schema schema);

  static Config parse(std::istream& in, Schema schema);
  static Config load(const std::filesystem::path& path, Schema schema);

  /// Validated assignment; a later set overrides an earlier one.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError when a required key was never set.
  void require_complete() const;

  bool has(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  double real(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;

  const Schema& schema() const { return schema_; }

 private:
  const KeySpec& spec(const std::string& key) const;
  const std::string& raw(const std::string& key) const;

  Schema schema_;
  std::map<std::string, std::string> values_;
};

}  // namespace evtlearn
