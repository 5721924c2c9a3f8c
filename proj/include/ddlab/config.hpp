#pragma once

// Flat key = value experiment files with dotted keys. Each subcommand declares
// the keys it reads; anything else in a file or on the command line is
// rejected with the key named in the error.

#include "ddlab/grid.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ddlab {

/// Parses "key = value" lines; '#' starts a comment. Duplicate keys are an
/// error. `source` names the file in messages.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text,
                                                                    std::string_view source);

class Settings {
 public:
  void declare(const std::string& key, const std::string& default_value);
  bool declared(const std::string& key) const { return values_.count(key) != 0; }

  /// Throws InvalidArgument for keys that were never declared.
  void set(const std::string& key, const std::string& value, std::string_view source);
  void load_file(const std::string& path);

  const std::string& raw(const std::string& key) const;
  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t seed(const std::string& key) const;
  bool flag(const std::string& key) const;
  Axis axis(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;  ///< comma separated
  std::string word(const std::string& key, const std::vector<std::string>& allowed) const;

  /// All keys in sorted order with their effective values.
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace ddlab
