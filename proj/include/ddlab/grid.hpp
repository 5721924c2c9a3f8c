#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ddlab {

enum class AxisScale { linear, log };

/// count points from min to max inclusive, evenly spaced in value or in log10.
struct Axis {
  AxisScale scale = AxisScale::log;
  double min = 1.0;
  double max = 1.0;
  int count = 2;

  /// Throws InvalidArgument (naming `key`) on count < 2, max < min, or
  /// non-positive bounds on a log axis.
  void validate(std::string_view key = "grid") const;

  std::vector<double> values() const;

  /// values() rounded to the nearest integer with duplicates dropped, for
  /// engines that need whole step counts.
  std::vector<std::int64_t> integer_values() const;

  /// "log:min:max:count" / "lin:min:max:count".
  std::string to_string() const;
};

/// Parses the to_string() form. `key` is used in error messages.
Axis parse_axis(std::string_view text, std::string_view key = "grid");

}  // namespace ddlab
