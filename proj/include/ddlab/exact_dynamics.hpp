#pragma once

// Closed-form gradient-descent dynamics for one instance, evaluated in the
// eigenbasis of X^T X = V Lambda V^T. With w_0 = 0 the t-th iterate is
//   w_t = V diag(1 - (1 - eta*lambda - eta*Lambda_i)^t) (Lambda + lambda)^{-1} V^T X^T y.

#include "ddlab/core_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace ddlab {

/// Eigendecomposition of X^T X plus the rotated modulation F~ = F V.
struct SpectralCache {
  Eigen::MatrixXd eigenvectors;  ///< V, columns ordered by descending eigenvalue
  Eigen::VectorXd eigenvalues;   ///< Lambda, descending, roundoff negatives clamped to 0
  Eigen::MatrixXd f_tilde;       ///< F V
  Eigen::MatrixXd f_tilde_inv;   ///< V^T F^{-1}
  Eigen::VectorXd projected_xty; ///< V^T X^T y
  Eigen::VectorXd f_tilde_col_sq_norms;
  double clamp_threshold = 0.0;  ///< d * eps * lambda_max
  int d = 0;

  double max_eigenvalue() const { return eigenvalues.size() ? eigenvalues(0) : 0.0; }
};

/// Throws NumericalFailure if X^T X has an eigenvalue below -clamp_threshold.
SpectralCache build_spectral_cache(const ProblemInstance& instance);

/// || V Lambda V^T - X^T X ||_2 / || X^T X ||_2.
double reconstruction_residual(const SpectralCache& cache, const ProblemInstance& instance);

enum class TimeMode {
  discrete,    ///< (1 - x)^t, integer steps
  continuous,  ///< exp(-x t), gradient-flow limit
};

/// 1 - (1 - eta*(lambda + eigenvalue))^t, the fraction of the eigendirection
/// learned after t steps.
double learning_filter(double eta, double lambda, double eigenvalue, double t,
                       TimeMode mode = TimeMode::discrete);

/// eta * (lambda_max + lambda) < 2.
bool is_stable(const SpectralCache& cache, double eta, double lambda);

/// (X^T X + lambda I)^{-1} X^T y; minimum-norm solution when lambda = 0 and
/// X^T X is singular (eigenvalues at or below the clamp threshold dropped).
Eigen::VectorXd ridge_solution(const SpectralCache& cache, double lambda);
Eigen::VectorXd ridge_solution(const ProblemInstance& instance, double lambda);

struct ClosedFormIterate {
  Eigen::VectorXd weights;
  bool stable = true;  ///< false when eta * (lambda_max + lambda) >= 2
};

ClosedFormIterate gd_iterate_closed_form(const SpectralCache& cache, double eta, double lambda,
                                         std::int64_t t, TimeMode mode = TimeMode::discrete);
ClosedFormIterate gd_iterate_closed_form(const ProblemInstance& instance, double eta,
                                         double lambda, std::int64_t t);

/// Label-noise expectation of R(t) for the given teacher:
///   (1/d) W^T F~ D' F~^{-1} W,  D' = D Lambda / (Lambda + lambda).
double r_trace(const SpectralCache& cache, const Eigen::VectorXd& teacher, double eta,
               double lambda, double t, TimeMode mode = TimeMode::discrete);

/// Label-noise expectation of Q(t) for the given teacher:
///   (1/d) ||F~ D' F~^{-1} W||^2 + (sigma^2/d) Tr(B^T B),  B = F~ D' Lambda^{-1/2}.
double q_trace(const SpectralCache& cache, const Eigen::VectorXd& teacher, double eta,
               double lambda, double sigma_eps, double t, TimeMode mode = TimeMode::discrete);

/// The trace formulas averaged over the teacher as well:
///   R = Tr(D') / d,  Q = Tr(A^T A) / d + (sigma^2/d) Tr(B^T B),  A = F~ D' F~^{-1}.
Overlaps teacher_averaged_rq(const SpectralCache& cache, double eta, double lambda,
                             double sigma_eps, double t, TimeMode mode = TimeMode::discrete);

/// Explicit d x d propagators, for inspection and tests. D and the scalar
/// factors live in the eigenbasis; A and B are as in q_trace.
struct PropagatorMatrices {
  Eigen::MatrixXd filter;      ///< D (diagonal)
  Eigen::MatrixXd modulated;   ///< A
  Eigen::MatrixXd noise;       ///< B
};
PropagatorMatrices propagators(const SpectralCache& cache, double eta, double lambda, double t,
                               TimeMode mode = TimeMode::discrete);

enum class ExactMode {
  realized,        ///< the instance's own labels, identical to running GD
  noise_averaged,  ///< r_trace / q_trace, expectation over label noise
};

struct ExactCurveOptions {
  ExactMode mode = ExactMode::realized;
  TimeMode time = TimeMode::discrete;
  bool include_test_noise = false;
};

/// One eigendecomposition, then one evaluation per grid point. The grid must
/// be strictly increasing and non-negative.
std::vector<MacroObservables> exact_curve(const ProblemInstance& instance, double eta,
                                          double lambda, std::span<const std::int64_t> t_grid,
                                          const ExactCurveOptions& options = {});
std::vector<MacroObservables> exact_curve(const ProblemInstance& instance,
                                          const SpectralCache& cache, double eta,
                                          double lambda, std::span<const std::int64_t> t_grid,
                                          const ExactCurveOptions& options = {});

}  // namespace ddlab
