#include "ddlab/classify.hpp"
#include "ddlab/error.hpp"
#include "ddlab/experiment_engine.hpp"

#include <doctest.h>

#include <cmath>

using namespace ddlab;

namespace {

ComparisonConfig small_comparison() {
  ComparisonConfig c;
  c.dims = {20, 14, 30};
  c.kappas = {1.0, 10.0};
  c.num_seeds = 4;
  c.t_axis = parse_axis("log:1:1e5:12");
  c.base_seed = 5;
  return c;
}

}  // namespace

TEST_CASE("comparison tables are thread independent") {
  const ComparisonConfig c = small_comparison();
  const ComparisonResult a = run_comparison(c, 1);
  const ComparisonResult b = run_comparison(c, 3);
  CHECK(a.theory.rows == b.theory.rows);
  CHECK(a.sim_mean.rows == b.sim_mean.rows);
  CHECK(a.sim_std.rows == b.sim_std.rows);
  const std::size_t per_kappa = c.t_axis.integer_values().size() + 1;
  CHECK(a.sim_mean.rows.size() == 2 * per_kappa);
  const auto& first = a.sim_mean.rows.front();
  CHECK(first[a.sim_mean.column("t")] == 0.0);
  CHECK(first[a.sim_mean.column("L_G")] == 0.5);
  CHECK(first[a.sim_mean.column("exact_L_G")] == 0.5);
  CHECK(a.theory.rows.front()[a.theory.column("L_G")] == 0.5);
}

TEST_CASE("one noiseless seed: simulation equals exact dynamics") {
  ComparisonConfig c = small_comparison();
  c.num_seeds = 1;
  c.sigma_eps = 0.0;
  c.lambda = 0.0;
  const ComparisonResult r = run_comparison(c);
  const std::size_t lg = r.sim_mean.column("L_G"), ex = r.sim_mean.column("exact_L_G");
  for (const auto& row : r.sim_mean.rows) CHECK(std::abs(row[lg] - row[ex]) < 1e-8);
  for (const auto& row : r.sim_std.rows) CHECK(row[r.sim_std.column("L_G")] == 0.0);
}

TEST_CASE("comparison validation names the key") {
  ComparisonConfig c = small_comparison();
  c.kappas = {0.5};
  CHECK_THROWS_WITH_AS(run_comparison(c), doctest::Contains("kappa"), InvalidArgument);
}

TEST_CASE("heatmap") {
  HeatmapConfig h;
  h.lambda_axis = parse_axis("log:1e-6:10:6");
  h.t_axis = parse_axis("log:1:1e7:12");
  const DataTable a = run_heatmap(h, 1);
  const DataTable b = run_heatmap(h, 4);
  CHECK(a.rows == b.rows);
  CHECK(a.rows.size() == 7 * 12);
  const std::size_t inv = a.column("inv_lambda"), lg = a.column("L_G");
  int infinite_cells = 0;
  for (const auto& row : a.rows) {
    CHECK(row[lg] >= 0.0);
    if (row[inv] == 0.0) {
      ++infinite_cells;
      CHECK(std::abs(row[lg] - 0.5) < 1e-6);
    }
  }
  CHECK(infinite_cells == 12);
}

TEST_CASE("phase trajectories start at the origin") {
  PhaseConfig p;
  p.grid_R = 3;
  p.grid_Q = 4;
  const PhaseResult r = run_phase(p);
  CHECK(r.background.rows.size() == 12);
  CHECK(r.background.rows.back()[0] == 1.0);
  CHECK(r.background.rows.back()[1] == doctest::Approx(1.2));
  CHECK(r.background.rows.back()[2] == doctest::Approx(0.1));
  const std::size_t per = p.t_axis.count + 1;
  for (std::size_t k = 0; k < p.kappas.size(); ++k) {
    const auto& row = r.trajectories.rows[k * per];
    CHECK(row[1] == 0.0);
    CHECK(row[2] == 0.0);
    CHECK(row[3] == 0.0);
  }
}

TEST_CASE("phase: moderate kappa ends below its interior maximum") {
  PhaseConfig p;
  p.kappas = {1e3};
  const PhaseResult r = run_phase(p);
  const auto lg = r.trajectories.column_values("L_G");
  const auto t = r.trajectories.column_values("t");
  const CurveShape s = classify_curve(std::span(t).subspan(1), std::span(lg).subspan(1));
  double interior_max = 0.0;
  for (const Extremum& e : s.extrema)
    if (e.is_max && e.index > 0) interior_max = std::max(interior_max, e.value);
  CHECK(interior_max > 0.0);
  CHECK(lg.back() < interior_max);
}

TEST_CASE("R decomposition: slow block learns kappa^2 later") {
  const RDecompositionConfig cfg;
  const DataTable table = run_R_decomposition(cfg);
  const auto t = table.column_values("t");
  const auto r1 = table.column_values("R1");
  const auto r2 = table.column_values("R2");
  const auto r = table.column_values("R");
  CHECK(r1[0] == 0.0);
  CHECK(r[0] == 0.0);
  // Midpoint crossing in log t, interpolated between grid points.
  auto crossing = [&](const std::vector<double>& v) {
    const double half = 0.5 * v.back();
    for (std::size_t i = 2; i < v.size(); ++i)
      if (v[i] >= half) {
        const double w = (half - v[i - 1]) / (v[i] - v[i - 1]);
        return std::exp(std::log(t[i - 1]) + w * (std::log(t[i]) - std::log(t[i - 1])));
      }
    return std::nan("");
  };
  const double ratio = crossing(r2) / crossing(r1);
  const double kappa2 = std::pow(cfg.sigma1 / cfg.sigma2, 2);
  CHECK(ratio > kappa2 / 2);
  CHECK(ratio < kappa2 * 2);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(r1[i] + r2[i]));
}
