#pragma once

// Scalar predictions for R(t), Q(t) from the zero-temperature replica
// solution. Training time enters only through the effective ridge
// lambda~ = lambda + 1/(eta t), i.e. the t-th GD iterate is approximated by
// the ridge minimizer at lambda~.

#include "ddlab/core_model.hpp"

#include <span>
#include <vector>

namespace ddlab {

/// lambda + 1/(eta t). Throws for t <= 0 or eta <= 0; t = +inf gives lambda.
double effective_ridge(double eta, double lambda, double t);

/// Positive root of a^2 - (1 + alpha + lambda~) a + alpha = 0, i.e.
///   a = 1 + 2 lambda~ / ((1 - alpha - lambda~) + sqrt((1 - alpha - lambda~)^2 + 4 lambda~)).
/// lambda~ = 0 returns the limit max(1, alpha); lambda~ = inf returns inf.
double block_a(double alpha, double lambda_tilde);

struct ReplicaInputs {
  ModelDims dims;  ///< p is the size of the sigma1 block
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double eta = 0.1;
  double lambda = 0.0;
  double sigma_eps = 0.0;
  double t = 1.0;  ///< continuous; 0 is the analytic start, +inf the converged limit
  bool include_test_noise = false;

  void validate() const;
};

struct ReplicaParams {
  double a1 = 0.0, a2 = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double R1 = 0.0, R2 = 0.0;
  double Q1 = 0.0, Q2 = 0.0;
};

struct BipartitePrediction {
  ReplicaParams params;
  MacroObservables observables;
};

/// Two-block solution. Each block i (p_1 = p, p_2 = d - p) sees
///   alpha_i = n / p_i,  lambda~_i = (d / p_i) lambda~ / sigma_i^2,
/// and R_i = n / (a_i d), b_i = alpha_i / (a_i^2 - alpha_i),
///   c_i = 1 + sigma_eps^2 - 2 R_j - (n/d)(2 - a_i)/a_i   (j the other block),
///   Q_1 = (b1 b2 c2 + b1 c1) / (1 - b1 b2),  Q_2 = (b1 b2 c1 + b2 c2) / (1 - b1 b2).
/// Throws NumericalFailure when b1 b2 >= 1 or a_i^2 <= alpha_i.
BipartitePrediction bipartite_prediction(const ReplicaInputs& inputs);

/// F = I solution at load alpha = n/d:
///   R = alpha / a,  Q = alpha / (a^2 - alpha) * (G - alpha (2 - a) / a),  G = 1 + sigma_eps^2.
/// The returned t is left at 0; callers fill it in.
MacroObservables single_block_prediction(double alpha, double lambda_tilde, double sigma_eps,
                                         bool include_test_noise = false);

struct SaddleState {
  double R = 0.0;
  double Q = 0.0;
  double Q0 = 0.0;
  double beta = 0.0;
  double G = 1.0;
  double H = 1.0;
  double f = 0.0;  ///< free energy per dimension
  double a = 1.0;  ///< 1 + 1/(beta (Q0 - Q))
  int iterations = 0;
  double residual = 0.0;
};

struct SaddleOptions {
  double damping = 0.5;  ///< weight of the new iterate
  double tolerance = 1e-12;
  int max_iterations = 100000;
};

/// Damped fixed-point iteration of the stationarity conditions of the
/// single-block free energy, started from (R, Q, Q0) = (0, 0, 1). Works in
/// Delta = Q0 - Q so that Q0 never has to be differenced at large beta.
/// Throws NumericalFailure on non-convergence.
SaddleState saddle_oracle(double alpha, double lambda_tilde, double sigma_eps, double beta = 1e8,
                          const SaddleOptions& options = {});

/// Bipartite prediction over t_grid (positive, strictly increasing; inputs.t
/// is ignored) with the exact t = 0 point (0, 0, 0.5) prepended.
std::vector<MacroObservables> theory_curve(const ReplicaInputs& inputs,
                                           std::span<const double> t_grid);

}  // namespace ddlab
