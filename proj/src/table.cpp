#include "ddlab/table.hpp"

#include "ddlab/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace ddlab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string write_csv(const OutputTable& table) {
  const DataTable& data = table.data;
  if (data.columns.empty()) throw InvalidArgument("table '" + table.name + "' has no columns");
  std::string out;
  out += "# ddlab " + std::string(kToolVersion) + "\n";
  out += "# command " + table.command + "\n";
  out += "# table " + table.name + "\n";
  for (const auto& [key, value] : table.config) out += "# config " + key + " = " + value + "\n";
  for (std::size_t c = 0; c < data.columns.size(); ++c)
    out += (c ? "," : "") + data.columns[c];
  out += '\n';
  for (const auto& row : data.rows) {
    if (row.size() != data.columns.size())
      throw InvalidArgument("table '" + table.name + "': row width differs from column count");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

OutputTable parse_csv(std::string_view text) {
  OutputTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_columns = false;
  int number = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (!s.empty() && s.back() == ',') parts.emplace_back();
    return parts;
  };
  while (std::getline(in, line)) {
    ++number;
    const std::string where = "csv line " + std::to_string(number);
    if (!line.empty() && line[0] == '#') {
      if (have_columns) throw InvalidArgument(where + ": header line after the column row");
      if (line.rfind("# command ", 0) == 0) {
        table.command = line.substr(10);
      } else if (line.rfind("# table ", 0) == 0) {
        table.name = line.substr(8);
      } else if (line.rfind("# config ", 0) == 0) {
        const std::string body = line.substr(9);
        const auto eq = body.find(" = ");
        if (eq == std::string::npos) throw InvalidArgument(where + ": malformed config echo");
        table.config[body.substr(0, eq)] = body.substr(eq + 3);
      }
      continue;
    }
    if (!have_columns) {
      table.data.columns = split(line);
      have_columns = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != table.data.columns.size())
      throw InvalidArgument(where + ": expected " + std::to_string(table.data.columns.size()) +
                            " values");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw InvalidArgument(where + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    table.data.rows.push_back(std::move(row));
  }
  if (!have_columns) throw InvalidArgument("csv: no column row");
  return table;
}

std::string write_json(const OutputTable& table) {
  nlohmann::ordered_json j;
  j["tool"] = std::string("ddlab ") + kToolVersion;
  j["command"] = table.command;
  j["table"] = table.name;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.config) j["config"][key] = value;
  j["columns"] = table.data.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.data.rows) {
    if (row.size() != table.data.columns.size())
      throw InvalidArgument("table '" + table.name + "': row width differs from column count");
    auto r = nlohmann::ordered_json::array();
    for (const double v : row) {
      if (std::isfinite(v))
        r.push_back(v);
      else
        r.push_back(nullptr);
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(1) + "\n";
}

}  // namespace ddlab
