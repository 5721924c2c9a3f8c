#pragma once

#include "ddlab/experiment_engine.hpp"

#include <map>
#include <string>
#include <string_view>

namespace ddlab {

inline constexpr const char* kToolVersion = "0.1.0";

/// A data table plus the provenance needed to regenerate it.
struct OutputTable {
  std::string command;  ///< subcommand that produced it
  std::string name;     ///< table name within the command, e.g. "sim_mean"
  std::map<std::string, std::string> config;  ///< effective settings, echoed verbatim
  DataTable data;
};

/// CSV with '#' header lines:
///   # ddlab <version>
///   # command <command>
///   # table <name>
///   # config <key> = <value>     (one per setting; `sed -n 's/^# config //p'` rebuilds the file)
/// then the column row and one line per row, numbers as %.17g, '\n' endings.
std::string write_csv(const OutputTable& table);

/// Inverse of write_csv. Header lines other than config echoes are checked
/// for shape only.
OutputTable parse_csv(std::string_view text);

/// {"tool", "command", "table", "config": {...}, "columns": [...], "rows": [[...]]};
/// non-finite values become null.
std::string write_json(const OutputTable& table);

/// %.17g, with "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

}  // namespace ddlab
