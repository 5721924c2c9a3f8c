#pragma once

// Sweeps that turn the three engines into figure data. Every table is
// assembled in a fixed order after the parallel part finishes, so outputs do
// not depend on the thread budget.

#include "ddlab/core_model.hpp"
#include "ddlab/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ddlab {

struct DataTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  ///< throws if absent
  std::vector<double> column_values(const std::string& name) const;
};

/// Instance seed for replicate `replicate` of sweep cell `cell`.
std::uint64_t cell_seed(std::uint64_t base_seed, std::uint64_t cell, std::uint64_t replicate);

/// L_G as emitted: roundoff negatives down to -1e-12 are clamped to 0; anything
/// lower or non-finite is a NumericalFailure.
double clamp_loss(double L_G);

struct ComparisonConfig {
  ModelDims dims{100, 70, 150};
  std::vector<double> kappas{1.0, 10.0, 100.0};
  double sigma1 = 1.0;  ///< sigma2 = sigma1 / kappa
  double eta = 0.1;
  double lambda = 1e-4;
  double sigma_eps = 0.3;
  Axis t_axis{AxisScale::log, 10.0, 1e7, 40};
  int num_seeds = 100;
  std::uint64_t base_seed = 0;

  void validate() const;
};

/// Per kappa and t (a t = 0 row first, then the integer t grid):
///   theory:   kappa, t, R, Q, L_G
///   sim_mean: kappa, t, R, Q, L_G, L_T, exact_R, exact_Q, exact_L_G, n_used, diverged
///   sim_std:  kappa, t, R, Q, L_G, L_T, n_used
/// exact_* is the label-noise-averaged closed form, averaged over the same
/// instances as the simulation. Diverged seeds are left out of both and
/// counted in `diverged`.
struct ComparisonResult {
  DataTable theory;
  DataTable sim_mean;
  DataTable sim_std;
};
ComparisonResult run_comparison(const ComparisonConfig& config, int threads = 1);

struct HeatmapConfig {
  ModelDims dims{100, 70, 150};
  double kappa = 100.0;
  double sigma1 = 1.0;
  double eta = 0.1;
  double sigma_eps = 0.3;
  Axis lambda_axis{AxisScale::log, 1e-6, 10.0, 40};
  bool include_infinite_lambda = true;  ///< adds the 1/lambda = 0 column
  Axis t_axis{AxisScale::log, 1.0, 1e7, 60};

  void validate() const;
};

/// Columns inv_lambda, lambda, t, R, Q, L_G; lambda-major, then t.
DataTable run_heatmap(const HeatmapConfig& config, int threads = 1);

struct PhaseConfig {
  ModelDims dims{100, 70, 150};
  std::vector<double> kappas{10.0, 1e2, 1e3, 1e5};
  double sigma1 = 1.0;
  double eta = 0.1;
  double lambda = 0.0;
  double sigma_eps = 0.3;
  Axis t_axis{AxisScale::log, 1.0, 1e7, 60};
  int grid_R = 101;  ///< background points over R in [0, 1]
  int grid_Q = 121;  ///< background points over Q in [0, 1.2]

  void validate() const;
};

struct PhaseResult {
  DataTable background;    ///< R, Q, L_G
  DataTable trajectories;  ///< kappa, t, R, Q, L_G; each kappa starts at t = 0
};
PhaseResult run_phase(const PhaseConfig& config, int threads = 1);

struct RDecompositionConfig {
  ModelDims dims{100, 50, 150};
  double sigma1 = 1.0;
  double sigma2 = 0.01;
  double eta = 0.1;
  double lambda = 0.0;
  double sigma_eps = 0.0;
  Axis t_axis{AxisScale::log, 1.0, 1e9, 90};

  void validate() const;
};

/// Columns t, R1, R2, R with a t = 0 row first.
DataTable run_R_decomposition(const RDecompositionConfig& config);

}  // namespace ddlab
