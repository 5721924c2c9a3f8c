#include "ddlab/experiment_engine.hpp"

#include "ddlab/error.hpp"
#include "ddlab/exact_dynamics.hpp"
#include "ddlab/gd_simulator.hpp"
#include "ddlab/parallel.hpp"
#include "ddlab/replica_theory.hpp"
#include "ddlab/rng.hpp"

#include <cmath>
#include <limits>

namespace ddlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_common(const ModelDims& dims, double sigma1, double eta, double sigma_eps) {
  dims.validate(true);
  if (!(sigma1 > 0.0) || !std::isfinite(sigma1))
    throw InvalidArgument("modulation.sigma1 must be finite and > 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("train.eta must be > 0");
  if (!(sigma_eps >= 0.0) || !std::isfinite(sigma_eps))
    throw InvalidArgument("model.sigma_eps must be finite and >= 0");
}

void check_kappa(double kappa) {
  if (!(kappa >= 1.0) || !std::isfinite(kappa))
    throw InvalidArgument("modulation.kappa must be finite and >= 1");
}

ReplicaInputs replica_inputs(const ModelDims& dims, double sigma1, double kappa, double eta,
                             double lambda, double sigma_eps) {
  ReplicaInputs in;
  in.dims = dims;
  in.sigma1 = sigma1;
  in.sigma2 = sigma1 / kappa;
  in.eta = eta;
  in.lambda = lambda;
  in.sigma_eps = sigma_eps;
  return in;
}

std::vector<double> with_zero(const std::vector<std::int64_t>& grid) {
  std::vector<double> out{0.0};
  for (const auto t : grid) out.push_back(static_cast<double>(t));
  return out;
}

struct SeedRun {
  SingleRun sim;
  std::vector<MacroObservables> exact;
};

}  // namespace

std::size_t DataTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw InvalidArgument("table has no column '" + name + "'");
}

std::vector<double> DataTable::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::uint64_t cell, std::uint64_t replicate) {
  return hash64(base_seed, cell, replicate);
}

double clamp_loss(double L_G) {
  if (!std::isfinite(L_G) || L_G < -1e-12)
    throw NumericalFailure("generalization error " + std::to_string(L_G) + " is out of range");
  return L_G < 0.0 ? 0.0 : L_G;
}

void ComparisonConfig::validate() const {
  check_common(dims, sigma1, eta, sigma_eps);
  if (kappas.empty()) throw InvalidArgument("sweep.kappas must not be empty");
  for (const double k : kappas) check_kappa(k);
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("train.lambda must be finite and >= 0");
  t_axis.validate("sweep.t_grid");
  if (!(t_axis.min >= 1.0)) throw InvalidArgument("sweep.t_grid: simulated steps start at t >= 1");
  if (num_seeds < 1) throw InvalidArgument("sweep.seeds must be >= 1");
}

ComparisonResult run_comparison(const ComparisonConfig& config, int threads) {
  config.validate();
  const std::vector<std::int64_t> grid = config.t_axis.integer_values();
  const std::vector<double> times = with_zero(grid);
  const std::size_t kappas = config.kappas.size();
  const auto seeds = static_cast<std::size_t>(config.num_seeds);

  TrainConfig train;
  train.eta = config.eta;
  train.lambda = config.lambda;
  train.checkpoints.push_back(0);
  train.checkpoints.insert(train.checkpoints.end(), grid.begin(), grid.end());

  std::vector<SeedRun> runs(kappas * seeds);
  parallel_for(runs.size(), threads, [&](std::size_t cell) {
    const std::size_t k = cell / seeds;
    const std::size_t s = cell % seeds;
    const double kappa = config.kappas[k];
    const Modulation f = Modulation::bipartite(config.dims.d, config.dims.p, config.sigma1,
                                               config.sigma1 / kappa);
    const ProblemInstance instance =
        generate_instance(config.dims, f, config.sigma_eps, cell_seed(config.base_seed, k, s));
    SeedRun& run = runs[cell];
    run.sim = train_single(instance, train);
    run.exact = exact_curve(instance, config.eta, config.lambda, train.checkpoints,
                            {.mode = ExactMode::noise_averaged});
  });

  ComparisonResult out;
  out.theory.columns = {"kappa", "t", "R", "Q", "L_G"};
  out.sim_mean.columns = {"kappa", "t",       "R",         "Q",      "L_G",     "L_T",
                          "exact_R", "exact_Q", "exact_L_G", "n_used", "diverged"};
  out.sim_std.columns = {"kappa", "t", "R", "Q", "L_G", "L_T", "n_used"};

  for (std::size_t k = 0; k < kappas; ++k) {
    const double kappa = config.kappas[k];
    ReplicaInputs in = replica_inputs(config.dims, config.sigma1, kappa, config.eta,
                                      config.lambda, config.sigma_eps);
    const std::vector<MacroObservables> theory =
        theory_curve(in, std::span<const double>(times).subspan(1));
    for (std::size_t j = 0; j < times.size(); ++j)
      out.theory.rows.push_back({kappa, times[j], theory[j].R, theory[j].Q, clamp_loss(theory[j].L_G)});

    for (std::size_t j = 0; j < times.size(); ++j) {
      // sums of R, Q, L_G, L_T, exact R, Q, L_G and the squares of the first four
      double sum[7] = {};
      double sq[4] = {};
      int used = 0, diverged = 0;
      for (std::size_t s = 0; s < seeds; ++s) {
        const SeedRun& run = runs[k * seeds + s];
        if (run.sim.diverged) {
          ++diverged;
          continue;
        }
        ++used;
        const MacroObservables& o = run.sim.points[j];
        const MacroObservables& e = run.exact[j];
        const double v[7] = {o.R, o.Q, o.L_G, run.sim.train_loss[j], e.R, e.Q, e.L_G};
        for (int c = 0; c < 7; ++c) sum[c] += v[c];
        for (int c = 0; c < 4; ++c) sq[c] += v[c] * v[c];
      }
      double mean[7], sd[4];
      for (int c = 0; c < 7; ++c) mean[c] = used > 0 ? sum[c] / used : kNaN;
      for (int c = 0; c < 4; ++c)
        sd[c] = used > 1 ? std::sqrt(std::max(0.0, (sq[c] - used * mean[c] * mean[c]) / (used - 1)))
                : used == 1 ? 0.0
                            : kNaN;
      if (used > 0) {
        mean[2] = clamp_loss(mean[2]);
        mean[6] = clamp_loss(mean[6]);
      }
      out.sim_mean.rows.push_back({kappa, times[j], mean[0], mean[1], mean[2], mean[3], mean[4],
                                   mean[5], mean[6], static_cast<double>(used),
                                   static_cast<double>(diverged)});
      out.sim_std.rows.push_back(
          {kappa, times[j], sd[0], sd[1], sd[2], sd[3], static_cast<double>(used)});
    }
  }
  return out;
}

void HeatmapConfig::validate() const {
  check_common(dims, sigma1, eta, sigma_eps);
  check_kappa(kappa);
  lambda_axis.validate("sweep.lambda_grid");
  if (lambda_axis.min < 0.0) throw InvalidArgument("sweep.lambda_grid: lambda must be >= 0");
  t_axis.validate("sweep.t_grid");
  if (!(t_axis.min > 0.0)) throw InvalidArgument("sweep.t_grid: t must be > 0");
}

DataTable run_heatmap(const HeatmapConfig& config, int threads) {
  config.validate();
  std::vector<double> lambdas = config.lambda_axis.values();
  if (config.include_infinite_lambda) lambdas.push_back(std::numeric_limits<double>::infinity());
  const std::vector<double> times = config.t_axis.values();

  std::vector<std::vector<MacroObservables>> columns(lambdas.size());
  parallel_for(lambdas.size(), threads, [&](std::size_t c) {
    const ReplicaInputs in = replica_inputs(config.dims, config.sigma1, config.kappa, config.eta,
                                            lambdas[c], config.sigma_eps);
    columns[c] = theory_curve(in, times);
  });

  DataTable table;
  table.columns = {"inv_lambda", "lambda", "t", "R", "Q", "L_G"};
  for (std::size_t c = 0; c < lambdas.size(); ++c) {
    const double inv = std::isinf(lambdas[c]) ? 0.0 : 1.0 / lambdas[c];
    // Skip the prepended t = 0 point; the heatmap is over the t axis only.
    for (std::size_t j = 1; j < columns[c].size(); ++j) {
      const MacroObservables& o = columns[c][j];
      table.rows.push_back({inv, lambdas[c], o.t, o.R, o.Q, clamp_loss(o.L_G)});
    }
  }
  return table;
}

void PhaseConfig::validate() const {
  check_common(dims, sigma1, eta, sigma_eps);
  if (kappas.empty()) throw InvalidArgument("sweep.kappas must not be empty");
  for (const double k : kappas) check_kappa(k);
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("train.lambda must be finite and >= 0");
  t_axis.validate("sweep.t_grid");
  if (!(t_axis.min > 0.0)) throw InvalidArgument("sweep.t_grid: t must be > 0");
  if (grid_R < 2) throw InvalidArgument("phase.grid_R must be >= 2");
  if (grid_Q < 2) throw InvalidArgument("phase.grid_Q must be >= 2");
}

PhaseResult run_phase(const PhaseConfig& config, int threads) {
  config.validate();
  PhaseResult out;
  out.background.columns = {"R", "Q", "L_G"};
  for (int i = 0; i < config.grid_R; ++i) {
    const double R = static_cast<double>(i) / (config.grid_R - 1);
    for (int j = 0; j < config.grid_Q; ++j) {
      const double Q = 1.2 * j / (config.grid_Q - 1);
      out.background.rows.push_back({R, Q, gen_error_from_rq(R, Q)});
    }
  }

  const std::vector<double> times = config.t_axis.values();
  std::vector<std::vector<MacroObservables>> curves(config.kappas.size());
  parallel_for(curves.size(), threads, [&](std::size_t k) {
    const ReplicaInputs in = replica_inputs(config.dims, config.sigma1, config.kappas[k],
                                            config.eta, config.lambda, config.sigma_eps);
    curves[k] = theory_curve(in, times);
  });
  out.trajectories.columns = {"kappa", "t", "R", "Q", "L_G"};
  for (std::size_t k = 0; k < curves.size(); ++k)
    for (const MacroObservables& o : curves[k])
      out.trajectories.rows.push_back({config.kappas[k], o.t, o.R, o.Q, clamp_loss(o.L_G)});
  return out;
}

void RDecompositionConfig::validate() const {
  check_common(dims, sigma1, eta, sigma_eps);
  if (!(sigma2 > 0.0) || sigma2 > sigma1)
    throw InvalidArgument("modulation.sigma2 must be in (0, sigma1]");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("train.lambda must be finite and >= 0");
  t_axis.validate("sweep.t_grid");
  if (!(t_axis.min > 0.0)) throw InvalidArgument("sweep.t_grid: t must be > 0");
}

DataTable run_R_decomposition(const RDecompositionConfig& config) {
  config.validate();
  ReplicaInputs in = replica_inputs(config.dims, config.sigma1, config.sigma1 / config.sigma2,
                                    config.eta, config.lambda, config.sigma_eps);
  in.sigma2 = config.sigma2;
  DataTable table;
  table.columns = {"t", "R1", "R2", "R"};
  table.rows.push_back({0.0, 0.0, 0.0, 0.0});
  for (const double t : config.t_axis.values()) {
    in.t = t;
    const BipartitePrediction p = bipartite_prediction(in);
    table.rows.push_back({t, p.params.R1, p.params.R2, p.observables.R});
  }
  return table;
}

}  // namespace ddlab
