#pragma once

#include "ddlab/experiment_engine.hpp"

#include <string>
#include <vector>

namespace ddlab {

enum class SvgKind { lines, heatmap, phase };

struct SvgOptions {
  std::string x = "t";
  std::vector<std::string> y = {"L_G"};  ///< lines: one curve per column (and group)
  std::string group = "kappa";           ///< split rows into curves; ignored if absent
  std::string heat_y = "inv_lambda";     ///< heatmap row coordinate
  std::string value = "L_G";             ///< heatmap / phase colour
  bool log_x = true;                     ///< non-positive x values are dropped
  std::string title;
  const DataTable* background = nullptr;  ///< phase: the (R, Q, L_G) grid
};

/// Standalone SVG document. Throws InvalidArgument for an empty table or a
/// table whose columns do not fit `kind`.
///   lines:   polylines of y against x
///   heatmap: one <rect> per (x, heat_y) cell on an index grid, linear colour
///            ramp between the min and max of `value`, stated in a legend
///   phase:   background cells from options.background with the R, Q
///            trajectories of the table drawn over them
std::string render_svg(const DataTable& table, SvgKind kind, const SvgOptions& options = {});

}  // namespace ddlab
