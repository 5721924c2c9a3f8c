#include "ddlab/error.hpp"
#include "ddlab/exact_dynamics.hpp"
#include "ddlab/gd_simulator.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace ddlab;

TEST_CASE("stepper agrees with the literal gradient update") {
  const ProblemInstance inst = generate_instance({15, 0, 20}, testing::well_conditioned(15, 3), 0.4, 1);
  GradientDescent gd(inst, 0.05, 0.1);
  for (const std::int64_t t : {0, 1, 7, 512}) {
    CHECK(testing::max_rel_dev(gd.iterate(t), gd_iterate(inst, 0.05, 0.1, t)) < 1e-12);
  }
}

TEST_CASE("binary powers agree with stepping past the direct horizon") {
  const ProblemInstance inst =
      generate_instance({15, 10, 20}, Modulation::bipartite(15, 10, 1.0, 0.1), 0.4, 2);
  GradientDescent gd(inst, 0.1, 0.0);
  for (const std::int64_t t : {513, 1000, 4097}) {
    CHECK(testing::max_rel_dev(gd.iterate(t), gd_iterate(inst, 0.1, 0.0, t)) < 1e-10);
  }
  const Eigen::VectorXd far = gd.iterate(10000000);
  const SpectralCache cache = build_spectral_cache(inst);
  CHECK(testing::max_rel_dev(far, gd_iterate_closed_form(cache, 0.1, 0.0, 10000000).weights) < 1e-8);
}

TEST_CASE("train_single checkpoints") {
  const ProblemInstance inst =
      generate_instance({10, 5, 20}, Modulation::bipartite(10, 5, 1.0, 0.5), 0.2, 3);
  TrainConfig cfg;
  cfg.checkpoints = {0, 3, 600, 2000};
  const SingleRun run = train_single(inst, cfg);
  REQUIRE(run.points.size() == 4);
  CHECK(run.points[0].R == 0.0);
  CHECK(run.points[0].Q == 0.0);
  CHECK(run.points[0].L_G == 0.5);
  CHECK_FALSE(run.diverged);
  for (std::size_t k = 1; k < 4; ++k) {
    const Overlaps o = measure_rq(inst, gd_iterate(inst, 0.1, 0.0, cfg.checkpoints[k]));
    CHECK(run.points[k].R == doctest::Approx(o.R).epsilon(1e-10));
  }
  // Stable GD never increases the objective it descends.
  for (std::size_t k = 1; k < 4; ++k) CHECK(run.train_loss[k] <= run.train_loss[k - 1]);
}

TEST_CASE("divergence is detected and masked") {
  const ProblemInstance inst = generate_instance({10, 0, 40}, Modulation::identity(10), 0.1, 4);
  TrainConfig cfg;
  cfg.eta = 5.0;
  cfg.checkpoints = {1, 100, 1000};
  const SingleRun run = train_single(inst, cfg);
  CHECK(run.diverged);
  CHECK(run.diverged_at == 100);
  CHECK(std::isnan(run.points[2].L_G));
  cfg.num_seeds = 3;
  const TrajectoryStats stats = train({10, 0, 40}, Modulation::identity(10), 0.1, cfg);
  CHECK(stats.seeds_used == 0);
  CHECK(stats.diverged_seeds.size() == 3);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);  // no checkpoints
  cfg.checkpoints = {1, 1};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.checkpoints = {1, 2};
  cfg.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.eta = 0.1;
  cfg.num_seeds = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("seed statistics are reproducible and thread independent") {
  const ModelDims dims{12, 6, 18};
  const Modulation f = Modulation::bipartite(12, 6, 1.0, 0.1);
  TrainConfig cfg;
  cfg.checkpoints = {0, 10, 1000};
  cfg.num_seeds = 6;
  cfg.base_seed = 17;
  const TrajectoryStats a = train(dims, f, 0.3, cfg, 1);
  const TrajectoryStats b = train(dims, f, 0.3, cfg, 4);
  CHECK(a.mean_L_G == b.mean_L_G);
  CHECK(a.std_R == b.std_R);
  CHECK(a.seeds_used == 6);
  cfg.num_seeds = 1;
  const TrajectoryStats one = train(dims, f, 0.3, cfg);
  CHECK(one.std_L_G[2] == 0.0);
}

TEST_CASE("update noise") {
  const ModelDims dims{8, 0, 16};
  TrainConfig cfg;
  cfg.checkpoints = {50};
  cfg.sgd_noise_std = 0.01;
  cfg.keep_raw = true;
  const TrajectoryStats a = train(dims, Modulation::identity(8), 0.0, cfg);
  const TrajectoryStats b = train(dims, Modulation::identity(8), 0.0, cfg);
  CHECK(a.mean_R == b.mean_R);
  cfg.sgd_noise_std = 0.0;
  const TrajectoryStats clean = train(dims, Modulation::identity(8), 0.0, cfg);
  CHECK(a.mean_Q[0] != clean.mean_Q[0]);
  CHECK(std::abs(a.mean_R[0] - clean.mean_R[0]) < 0.05);
}
