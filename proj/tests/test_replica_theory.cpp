#include "ddlab/error.hpp"
#include "ddlab/replica_theory.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace ddlab;

namespace {

ReplicaInputs fig_inputs(double kappa) {
  ReplicaInputs in;
  in.dims = {100, 70, 150};
  in.sigma1 = 1.0;
  in.sigma2 = 1.0 / kappa;
  in.eta = 0.1;
  in.lambda = 1e-4;
  in.sigma_eps = 0.3;
  return in;
}

}  // namespace

TEST_CASE("effective ridge") {
  CHECK(effective_ridge(0.1, 0.01, 1000.0) == doctest::Approx(0.02));
  CHECK(effective_ridge(0.1, 0.01, std::numeric_limits<double>::infinity()) == 0.01);
  CHECK_THROWS_AS(effective_ridge(0.1, 0.01, 0.0), InvalidArgument);
  CHECK_THROWS_AS(effective_ridge(0.0, 0.01, 1.0), InvalidArgument);
}

TEST_CASE("block_a values") {
  CHECK(block_a(0.5, 0.0) == 1.0);
  CHECK(block_a(2.0, 0.0) == 2.0);
  CHECK(block_a(2.0, 1.0) == doctest::Approx(1.0 + 2.0 / (-2.0 + std::sqrt(8.0))).epsilon(1e-14));
  CHECK(std::isinf(block_a(2.0, std::numeric_limits<double>::infinity())));
}

TEST_CASE("block_a solves its quadratic on both branches") {
  for (const double alpha : {0.1, 0.5, 0.99, 1.0, 1.01, 2.0, 7.0})
    for (const double lt : {1e-9, 1e-4, 0.1, 0.5, 1.0, 3.0, 100.0, 1e8}) {
      const double a = block_a(alpha, lt);
      const double residual = a * a - (1.0 + alpha + lt) * a + alpha;
      CHECK(std::abs(residual) <= 1e-12 * a * a);
      CHECK(a >= 1.0);
    }
}

TEST_CASE("block_a zero-ridge limit and continuity") {
  for (const double alpha : {0.25, 0.5, 0.9, 1.1, 2.0, 5.0}) {
    CHECK(std::abs(block_a(alpha, 1e-12) - std::max(1.0, alpha)) <= 1e-6);
    double prev = block_a(alpha, 1e-6);
    for (double lt = 1e-6; lt < 1e3; lt *= 1.01) {
      const double a = block_a(alpha, lt);
      CHECK(a >= prev);  // increasing in lambda~
      CHECK(a - prev < 0.05 * a);
      prev = a;
    }
  }
}

TEST_CASE("single block limits") {
  const MacroObservables interp = single_block_prediction(2.0, 0.0, 0.0);
  CHECK(interp.R == doctest::Approx(1.0));
  CHECK(interp.Q == doctest::Approx(1.0));
  CHECK(std::abs(interp.L_G) < 1e-14);
  const MacroObservables noisy = single_block_prediction(2.0, 0.0, 0.3);
  CHECK(noisy.Q == doctest::Approx(1.09));
  CHECK(noisy.L_G == doctest::Approx(0.045));
  const MacroObservables frozen =
      single_block_prediction(2.0, std::numeric_limits<double>::infinity(), 0.3);
  CHECK(frozen.R == 0.0);
  CHECK(frozen.Q == 0.0);
  CHECK(frozen.L_G == 0.5);
  CHECK_THROWS_AS(single_block_prediction(1.0, 0.0, 0.0), NumericalFailure);  // a^2 = alpha
}

TEST_CASE("saddle oracle matches the closed form") {
  for (const double alpha : {0.25, 0.5, 2.0, 5.0})
    for (const double lt : {1e-3, 0.1, 10.0}) {
      const SaddleState s = saddle_oracle(alpha, lt, 0.2);
      const MacroObservables c = single_block_prediction(alpha, lt, 0.2);
      CHECK(std::abs(s.R - c.R) < 1e-10);
      CHECK(std::abs(s.Q - c.Q) < 1e-10);
      CHECK(s.a == doctest::Approx(block_a(alpha, lt)).epsilon(1e-10));
      CHECK(s.Q0 > s.Q);
      CHECK(std::isfinite(s.f));
    }
}

TEST_CASE("saddle oracle across beta") {
  // The stationary R and Q do not depend on beta at all; only Q0 - Q = O(1/beta) does.
  const MacroObservables c = single_block_prediction(2.0, 0.1, 0.0);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (const double beta : {1e4, 1e5, 1e6, 1e7, 1e8}) {
    const SaddleState s = saddle_oracle(2.0, 0.1, 0.0, beta);
    CHECK(std::abs(s.R - c.R) < 1e-10);
    CHECK(std::abs(s.Q - c.Q) < 1e-10);
    const double gap = s.Q0 - s.Q;
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("saddle oracle reports non-convergence") {
  CHECK_THROWS_AS(saddle_oracle(1.0, 1e-3, 0.0, 1e8, {.damping = 0.5, .tolerance = 1e-12, .max_iterations = 5}),
                  NumericalFailure);
  CHECK_THROWS_AS(saddle_oracle(1.0, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("bipartite prediction limits") {
  ReplicaInputs in = fig_inputs(100.0);
  in.t = 0.0;
  const BipartitePrediction zero = bipartite_prediction(in);
  CHECK(zero.observables.R == 0.0);
  CHECK(zero.observables.Q == 0.0);
  CHECK(zero.observables.L_G == 0.5);
  in.t = 1e-12;
  const BipartitePrediction early = bipartite_prediction(in);
  CHECK(early.observables.R < 1e-10);
  CHECK(std::abs(early.observables.L_G - 0.5) < 1e-10);
  in.t = 1e6;
  const BipartitePrediction p = bipartite_prediction(in);
  CHECK(p.observables.R == doctest::Approx(p.params.R1 + p.params.R2));
  CHECK(p.observables.Q == doctest::Approx(p.params.Q1 + p.params.Q2));
  CHECK(p.params.a1 >= 1.0);
  CHECK(p.params.a2 >= 1.0);
  CHECK(p.params.b1 * p.params.b2 < 1.0);
}

TEST_CASE("bipartite prediction is symmetric under block swap") {
  ReplicaInputs a = fig_inputs(10.0);
  a.t = 300.0;
  ReplicaInputs b = a;
  b.dims.p = a.dims.d - a.dims.p;
  b.sigma1 = a.sigma2;
  b.sigma2 = a.sigma1;
  const MacroObservables x = bipartite_prediction(a).observables;
  const MacroObservables y = bipartite_prediction(b).observables;
  CHECK(x.R == doctest::Approx(y.R).epsilon(1e-14));
  CHECK(x.Q == doctest::Approx(y.Q).epsilon(1e-14));
}

TEST_CASE("bipartite R is non-decreasing in t without ridge") {
  for (const double kappa : {1.0, 10.0, 1e3}) {
    ReplicaInputs in = fig_inputs(kappa);
    in.lambda = 0.0;
    double prev = 0.0;
    for (double t = 0.1; t < 1e9; t *= 1.1) {
      in.t = t;
      const double r = bipartite_prediction(in).observables.R;
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("bipartite converged limit with label noise") {
  ReplicaInputs in = fig_inputs(1.0);
  in.lambda = 0.0;
  in.t = std::numeric_limits<double>::infinity();
  const MacroObservables o = bipartite_prediction(in).observables;
  // Both blocks interpolate (n > p_i), so R = n/d * (1/a1 + 1/a2) = 1 at a_i = alpha_i.
  CHECK(o.R == doctest::Approx(1.0));
  CHECK(o.L_G > 0.0);
  CHECK(o.L_G <= 0.09 * 100.0 / 50.0);
}

TEST_CASE("bipartite prediction reports the coupled pole") {
  ReplicaInputs in;
  in.dims = {10, 5, 5};  // alpha_i = 1: a_i^2 = alpha_i at lambda~ = 0
  in.lambda = 0.0;
  in.t = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bipartite_prediction(in), NumericalFailure);
}

TEST_CASE("theory curve") {
  const std::vector<double> grid{1, 10, 100, 1e3, 1e4, 1e5, 1e6, 1e7};
  const auto curve = theory_curve(fig_inputs(100.0), grid);
  REQUIRE(curve.size() == grid.size() + 1);
  CHECK(curve[0].t == 0.0);
  CHECK(curve[0].L_G == 0.5);
  for (std::size_t k = 1; k < curve.size(); ++k) {
    CHECK(curve[k].t == grid[k - 1]);
    CHECK(std::isfinite(curve[k].L_G));
    CHECK(curve[k].L_G >= 0.0);
  }
  const std::vector<double> bad{2, 1};
  CHECK_THROWS_AS(theory_curve(fig_inputs(1.0), bad), InvalidArgument);
}
