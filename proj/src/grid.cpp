#include "ddlab/grid.hpp"

#include "ddlab/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace ddlab {

namespace {

double parse_number(const std::string& token, std::string_view key) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(v))
    throw InvalidArgument(std::string(key) + ": bad number '" + token + "'");
  return v;
}

}  // namespace

void Axis::validate(std::string_view key) const {
  const std::string k(key);
  if (count < 2) throw InvalidArgument(k + ": axis needs at least 2 points");
  if (!std::isfinite(min) || !std::isfinite(max) || !(max > min))
    throw InvalidArgument(k + ": axis needs finite bounds with max > min");
  if (scale == AxisScale::log && !(min > 0.0))
    throw InvalidArgument(k + ": log axis needs positive bounds");
}

std::vector<double> Axis::values() const {
  validate();
  std::vector<double> out(count);
  const double lo = scale == AxisScale::log ? std::log10(min) : min;
  const double hi = scale == AxisScale::log ? std::log10(max) : max;
  for (int i = 0; i < count; ++i) {
    const double u = lo + (hi - lo) * i / (count - 1);
    out[i] = scale == AxisScale::log ? std::pow(10.0, u) : u;
  }
  out.front() = min;
  out.back() = max;
  return out;
}

std::vector<std::int64_t> Axis::integer_values() const {
  std::vector<std::int64_t> out;
  for (const double v : values()) {
    const auto r = static_cast<std::int64_t>(std::llround(v));
    if (out.empty() || r > out.back()) out.push_back(r);
  }
  return out;
}

std::string Axis::to_string() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s:%.17g:%.17g:%d", scale == AxisScale::log ? "log" : "lin", min,
                max, count);
  return buf;
}

Axis parse_axis(std::string_view text, std::string_view key) {
  std::vector<std::string> parts;
  std::string current;
  for (const char c : text) {
    if (c == ':') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  const std::string k(key);
  if (parts.size() != 4)
    throw InvalidArgument(k + ": expected log:<min>:<max>:<count> or lin:<min>:<max>:<count>, got '" +
                          std::string(text) + "'");
  Axis axis;
  if (parts[0] == "log")
    axis.scale = AxisScale::log;
  else if (parts[0] == "lin")
    axis.scale = AxisScale::linear;
  else
    throw InvalidArgument(k + ": unknown axis scale '" + parts[0] + "'");
  axis.min = parse_number(parts[1], key);
  axis.max = parse_number(parts[2], key);
  const double count = parse_number(parts[3], key);
  if (count != std::floor(count) || count > 1e7)
    throw InvalidArgument(k + ": axis count must be a whole number");
  axis.count = static_cast<int>(count);
  axis.validate(key);
  return axis;
}

}  // namespace ddlab
