#include "ddlab/config.hpp"

#include "ddlab/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ddlab {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw InvalidArgument(key + ": expected " + what + ", got '" + value + "'");
}

double to_real(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE || std::isnan(v))
    bad_value(key, value, "a number");
  return v;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text,
                                                                    std::string_view source) {
  std::vector<std::pair<std::string, std::string>> out;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(number);
    if (eq == std::string::npos) throw InvalidArgument(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw InvalidArgument(where + ": missing key");
    if (seen.count(key))
      throw InvalidArgument(key + ": set twice (" + where + " and line " +
                            std::to_string(seen[key]) + ")");
    seen[key] = number;
    out.emplace_back(key, value);
  }
  return out;
}

void Settings::declare(const std::string& key, const std::string& default_value) {
  values_[key] = default_value;
}

void Settings::set(const std::string& key, const std::string& value, std::string_view source) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw InvalidArgument(key + ": unknown key for this command (from " + std::string(source) + ")");
  it->second = value;
}

void Settings::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("config: cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  for (const auto& [key, value] : parse_config_text(text.str(), path)) set(key, value, path);
}

const std::string& Settings::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument(key + ": not declared");
  return it->second;
}

double Settings::real(const std::string& key) const { return to_real(key, raw(key)); }

int Settings::integer(const std::string& key) const {
  const std::string& value = raw(key);
  const double v = to_real(key, value);
  if (v != std::floor(v) || std::abs(v) > 2e9) bad_value(key, value, "an integer");
  return static_cast<int>(v);
}

std::uint64_t Settings::seed(const std::string& key) const {
  const std::string& value = raw(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (value.empty() || value[0] == '-' || end != value.c_str() + value.size() || errno == ERANGE)
    bad_value(key, value, "a non-negative integer seed");
  return v;
}

bool Settings::flag(const std::string& key) const {
  const std::string& value = raw(key);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

Axis Settings::axis(const std::string& key) const { return parse_axis(raw(key), key); }

std::vector<double> Settings::reals(const std::string& key) const {
  std::vector<double> out;
  std::string item;
  std::istringstream in(raw(key));
  while (std::getline(in, item, ',')) out.push_back(to_real(key, trim(item)));
  if (out.empty()) bad_value(key, raw(key), "a comma-separated list of numbers");
  return out;
}

std::string Settings::word(const std::string& key, const std::vector<std::string>& allowed) const {
  const std::string& value = raw(key);
  for (const auto& a : allowed)
    if (a == value) return value;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
  bad_value(key, value, list.c_str());
}

}  // namespace ddlab
