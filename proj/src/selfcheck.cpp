#include "ddlab/cli.hpp"

#include "ddlab/exact_dynamics.hpp"
#include "ddlab/gd_simulator.hpp"
#include "ddlab/replica_theory.hpp"
#include "ddlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace ddlab {

namespace {

std::string sci(const char* label, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %.3e", label, v);
  return buf;
}

Modulation perturbed_identity(int d, std::uint64_t seed) {
  CounterRng rng(seed, Stream::rotation);
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i, j) += 0.3 * rng.normal() / std::sqrt(double(d));
  return Modulation::general(f);
}

double rel_dev(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace

std::vector<CheckResult> run_selfchecks() {
  std::vector<CheckResult> out;

  {
    double worst = 0.0, residual = 0.0;
    for (std::uint64_t s = 0; s < 4; ++s) {
      const ProblemInstance inst = generate_instance({20, 0, 30}, perturbed_identity(20, s), 0.5, s);
      const SpectralCache cache = build_spectral_cache(inst);
      residual = std::max(residual, reconstruction_residual(cache, inst));
      for (const double lambda : {0.0, 0.1})
        for (const std::int64_t t : {1, 10, 100})
          worst = std::max(worst, rel_dev(gd_iterate_closed_form(cache, 0.05, lambda, t).weights,
                                          gd_iterate(inst, 0.05, lambda, t)));
    }
    out.push_back({"closed-form iterate vs gradient steps", worst <= 1e-8, sci("max rel dev", worst)});
    out.push_back({"eigendecomposition residual", residual <= 1e-12, sci("residual", residual)});
  }

  {
    const ProblemInstance inst =
        generate_instance({30, 21, 45}, Modulation::bipartite(30, 21, 1.0, 0.1), 0.3, 3);
    GradientDescent gd(inst, 0.1, 0.0);
    const double dev = rel_dev(gd.iterate(3000), gd_iterate(inst, 0.1, 0.0, 3000));
    out.push_back({"binary-power stepping vs plain steps", dev <= 1e-10, sci("max rel dev", dev)});
  }

  {
    const ProblemInstance inst = generate_instance({20, 0, 30}, perturbed_identity(20, 9), 0.0, 10);
    const SpectralCache cache = build_spectral_cache(inst);
    double worst = 0.0;
    for (const std::int64_t t : {1, 10, 100, 10000}) {
      const Overlaps o = measure_rq(inst, gd_iterate_closed_form(cache, 0.05, 0.1, t).weights);
      worst = std::max({worst, std::abs(r_trace(cache, inst.teacher, 0.05, 0.1, t) - o.R),
                        std::abs(q_trace(cache, inst.teacher, 0.05, 0.1, 0.0, t) - o.Q)});
    }
    out.push_back({"trace formulas vs measured overlaps", worst <= 1e-10, sci("max abs dev", worst)});
  }

  {
    double worst = 0.0;
    for (const double alpha : {0.25, 1.1, 5.0})
      for (const double lt : {1e-3, 0.1, 10.0}) {
        const SaddleState s = saddle_oracle(alpha, lt, 0.3);
        const MacroObservables c = single_block_prediction(alpha, lt, 0.3);
        worst = std::max({worst, std::abs(s.R - c.R), std::abs(s.Q - c.Q)});
      }
    out.push_back({"saddle oracle vs closed form", worst <= 1e-10, sci("max abs dev", worst)});
  }

  {
    double worst = 0.0;
    for (const double alpha : {0.25, 0.5, 0.9, 1.1, 2.0, 5.0})
      worst = std::max(worst, std::abs(block_a(alpha, 1e-12) - std::max(1.0, alpha)));
    out.push_back({"block_a zero-ridge limit", worst <= 1e-6, sci("max abs dev", worst)});
  }

  {
    ReplicaInputs in;
    in.dims = {20, 14, 30};
    in.sigma2 = 0.1;
    in.sigma_eps = 0.3;
    in.t = 0.0;
    const MacroObservables th = bipartite_prediction(in).observables;
    const ProblemInstance inst =
        generate_instance(in.dims, Modulation::bipartite(20, 14, 1.0, 0.1), 0.3, 1);
    const std::vector<std::int64_t> zero{0};
    const MacroObservables ex = exact_curve(inst, 0.1, 0.0, zero).front();
    TrainConfig cfg;
    cfg.checkpoints = {0};
    const MacroObservables sim = train_single(inst, cfg).points.front();
    const bool ok = th.R == 0 && th.Q == 0 && th.L_G == 0.5 && ex.R == 0 && ex.Q == 0 &&
                    ex.L_G == 0.5 && sim.R == 0 && sim.Q == 0 && sim.L_G == 0.5;
    out.push_back({"t = 0 is (0, 0, 0.5) in all engines", ok, ok ? "exact" : "mismatch"});
  }
  return out;
}

}  // namespace ddlab
