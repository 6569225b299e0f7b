#include "evtlearn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "evtlearn/csv.hpp"

namespace evtlearn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  const auto v = parse_double(trim(text));
  if (!v || std::isnan(*v)) throw ConfigError(key + ": '" + text + "' is not a number");
  return *v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void check_range(const KeySpec& spec, double v) {
  if (!spec.range.contains(v)) {
    throw ConfigError(spec.name + ": value " + format_double(v) + " outside " + spec.range.describe());
  }
}

void check_value(const KeySpec& spec, const std::string& value) {
  switch (spec.type) {
    case KeyType::kString:
      if (!spec.choices.empty() &&
          std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
        std::string all;
        for (const auto& c : spec.choices) all += (all.empty() ? "" : ", ") + c;
        throw ConfigError(spec.name + ": '" + value + "' is not one of " + all);
      }
      break;
    case KeyType::kReal:
      check_range(spec, parse_real(spec.name, value));
      break;
    case KeyType::kCount:
      check_range(spec, static_cast<double>(parse_count(spec.name, value)));
      break;
    case KeyType::kRealList:
      for (double v : parse_list(spec.name, value)) check_range(spec, v);
      break;
    case KeyType::kBool:
      if (value != "true" && value != "false") throw ConfigError(spec.name + ": expected true or false");
      break;
  }
}

}  // namespace

bool Range::contains(double v) const {
  const bool lo_ok = lo_open ? v > lo : v >= lo;
  const bool hi_ok = hi_open ? v < hi : v <= hi;
  return lo_ok && hi_ok;
}

std::string Range::describe() const {
  return std::string(lo_open ? "(" : "[") + format_double(lo) + ", " + format_double(hi) + (hi_open ? ")" : "]");
}

Config::Config(Schema schema) : schema_(std::move(schema)) {
  for (const auto& s : schema_) {
    if (s.fallback) values_[s.name] = *s.fallback;
  }
}

Config Config::parse(std::istream& in, Schema schema) {
  Config cfg(std::move(schema));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path, Schema schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse(in, std::move(schema));
}

const KeySpec& Config::spec(const std::string& key) const {
  const auto it = std::find_if(schema_.begin(), schema_.end(), [&](const KeySpec& s) { return s.name == key; });
  if (it == schema_.end()) throw ConfigError("unknown key '" + key + "'");
  return *it;
}

void Config::set(const std::string& key, const std::string& value) {
  check_value(spec(key), value);
  values_[key] = value;
}

void Config::require_complete() const {
  for (const auto& s : schema_) {
    if (!values_.contains(s.name)) throw ConfigError("missing required key '" + s.name + "'");
  }
}

bool Config::has(const std::string& key) const {
  spec(key);
  return values_.contains(key) && !values_.at(key).empty();
}

const std::string& Config::raw(const std::string& key) const {
  spec(key);
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

const std::string& Config::str(const std::string& key) const { return raw(key); }
double Config::real(const std::string& key) const { return parse_real(key, raw(key)); }
std::size_t Config::count(const std::string& key) const {
  return static_cast<std::size_t>(parse_count(key, raw(key)));
}
std::uint64_t Config::u64(const std::string& key) const { return parse_count(key, raw(key)); }
bool Config::flag(const std::string& key) const { return raw(key) == "true"; }
std::vector<double> Config::reals(const std::string& key) const { return parse_list(key, raw(key)); }

}  // namespace evtlearn
