#include "ddlab/exact_dynamics.hpp"

#include "ddlab/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace ddlab {

namespace {

double power_by_squaring(double base, std::int64_t exponent) {
  double result = 1.0;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

void check_eta_lambda(double eta, double lambda) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be > 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
}

// Per-eigendirection scalars shared by R, Q and the iterate.
struct DirectionFactors {
  Eigen::VectorXd shrink;  // D Lambda / (Lambda + lambda)
  Eigen::VectorXd noise;   // D Lambda^{1/2} / (Lambda + lambda), 0 on the null space
};

DirectionFactors direction_factors(const SpectralCache& cache, double eta, double lambda,
                                   double t, TimeMode mode) {
  check_eta_lambda(eta, lambda);
  const int d = cache.d;
  DirectionFactors f{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  for (int i = 0; i < d; ++i) {
    const double ev = cache.eigenvalues(i);
    if (ev <= 0.0) continue;
    const double filter = learning_filter(eta, lambda, ev, t, mode);
    const double denom = ev + lambda;
    f.shrink(i) = filter * ev / denom;
    f.noise(i) = filter * std::sqrt(ev) / denom;
  }
  return f;
}

}  // namespace

SpectralCache build_spectral_cache(const ProblemInstance& instance) {
  const int d = instance.dims.d;
  const Eigen::MatrixXd gram = instance.x.transpose() * instance.x;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("spectral cache: eigendecomposition of X^T X failed");

  SpectralCache cache;
  cache.d = d;
  // Eigen returns ascending order.
  cache.eigenvalues = solver.eigenvalues().reverse();
  cache.eigenvectors = solver.eigenvectors().rowwise().reverse();

  const double lambda_max = std::max(cache.eigenvalues(0), 0.0);
  cache.clamp_threshold = d * std::numeric_limits<double>::epsilon() * lambda_max;
  for (int i = 0; i < d; ++i) {
    double& ev = cache.eigenvalues(i);
    if (ev < -cache.clamp_threshold)
      throw NumericalFailure("spectral cache: X^T X has eigenvalue " + std::to_string(ev) +
                             " below -" + std::to_string(cache.clamp_threshold));
    if (ev < 0.0) ev = 0.0;
  }

  cache.f_tilde = instance.f() * cache.eigenvectors;
  cache.f_tilde_inv = cache.eigenvectors.transpose() * instance.modulation.inverse();
  cache.projected_xty = cache.eigenvectors.transpose() * (instance.x.transpose() * instance.y);
  cache.f_tilde_col_sq_norms = cache.f_tilde.colwise().squaredNorm().transpose();
  return cache;
}

double reconstruction_residual(const SpectralCache& cache, const ProblemInstance& instance) {
  const Eigen::MatrixXd gram = instance.x.transpose() * instance.x;
  const Eigen::MatrixXd rebuilt =
      cache.eigenvectors * cache.eigenvalues.asDiagonal() * cache.eigenvectors.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> diff_solver(rebuilt - gram,
                                                                   Eigen::EigenvaluesOnly);
  const double diff_norm = diff_solver.eigenvalues().cwiseAbs().maxCoeff();
  const double gram_norm = std::max(cache.max_eigenvalue(), std::numeric_limits<double>::min());
  return diff_norm / gram_norm;
}

double learning_filter(double eta, double lambda, double eigenvalue, double t, TimeMode mode) {
  if (t <= 0.0) return 0.0;
  const double rate = eta * (lambda + eigenvalue);
  if (rate == 0.0) return 0.0;
  if (mode == TimeMode::continuous) return -std::expm1(-rate * t);
  if (rate < 1.0) return -std::expm1(t * std::log1p(-rate));
  // Overshooting (or exactly zeroing) step: r = 1 - rate <= 0.
  return 1.0 - power_by_squaring(1.0 - rate, static_cast<std::int64_t>(std::llround(t)));
}

bool is_stable(const SpectralCache& cache, double eta, double lambda) {
  return eta * (cache.max_eigenvalue() + lambda) < 2.0;
}

Eigen::VectorXd ridge_solution(const SpectralCache& cache, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("ridge_solution: lambda must be >= 0");
  const int d = cache.d;
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(d);
  if (std::isinf(lambda)) return coeffs;
  for (int i = 0; i < d; ++i) {
    const double ev = cache.eigenvalues(i);
    if (lambda == 0.0 && ev <= cache.clamp_threshold) continue;
    coeffs(i) = cache.projected_xty(i) / (ev + lambda);
  }
  return cache.eigenvectors * coeffs;
}

Eigen::VectorXd ridge_solution(const ProblemInstance& instance, double lambda) {
  return ridge_solution(build_spectral_cache(instance), lambda);
}

ClosedFormIterate gd_iterate_closed_form(const SpectralCache& cache, double eta, double lambda,
                                         std::int64_t t, TimeMode mode) {
  check_eta_lambda(eta, lambda);
  if (t < 0) throw InvalidArgument("gd_iterate_closed_form: t must be >= 0");
  const int d = cache.d;
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    const double ev = cache.eigenvalues(i);
    const double denom = ev + lambda;
    if (denom <= 0.0) continue;
    coeffs(i) = learning_filter(eta, lambda, ev, static_cast<double>(t), mode) *
                cache.projected_xty(i) / denom;
  }
  return {cache.eigenvectors * coeffs, is_stable(cache, eta, lambda)};
}

ClosedFormIterate gd_iterate_closed_form(const ProblemInstance& instance, double eta,
                                         double lambda, std::int64_t t) {
  return gd_iterate_closed_form(build_spectral_cache(instance), eta, lambda, t);
}

double r_trace(const SpectralCache& cache, const Eigen::VectorXd& teacher, double eta,
               double lambda, double t, TimeMode mode) {
  if (teacher.size() != cache.d) throw InvalidArgument("r_trace: teacher length mismatch");
  const DirectionFactors f = direction_factors(cache, eta, lambda, t, mode);
  const Eigen::VectorXd learned = cache.f_tilde * f.shrink.cwiseProduct(cache.f_tilde_inv * teacher);
  return teacher.dot(learned) / cache.d;
}

double q_trace(const SpectralCache& cache, const Eigen::VectorXd& teacher, double eta,
               double lambda, double sigma_eps, double t, TimeMode mode) {
  if (teacher.size() != cache.d) throw InvalidArgument("q_trace: teacher length mismatch");
  const DirectionFactors f = direction_factors(cache, eta, lambda, t, mode);
  const Eigen::VectorXd learned = cache.f_tilde * f.shrink.cwiseProduct(cache.f_tilde_inv * teacher);
  const double noise_trace = f.noise.cwiseAbs2().dot(cache.f_tilde_col_sq_norms);
  return (learned.squaredNorm() + sigma_eps * sigma_eps * noise_trace) / cache.d;
}

Overlaps teacher_averaged_rq(const SpectralCache& cache, double eta, double lambda,
                             double sigma_eps, double t, TimeMode mode) {
  const DirectionFactors f = direction_factors(cache, eta, lambda, t, mode);
  // Tr(A^T A) = || F~ D' F~^{-1} ||_F^2.
  const Eigen::MatrixXd a = cache.f_tilde * f.shrink.asDiagonal() * cache.f_tilde_inv;
  const double noise_trace = f.noise.cwiseAbs2().dot(cache.f_tilde_col_sq_norms);
  return {f.shrink.sum() / cache.d,
          (a.squaredNorm() + sigma_eps * sigma_eps * noise_trace) / cache.d};
}

PropagatorMatrices propagators(const SpectralCache& cache, double eta, double lambda, double t,
                               TimeMode mode) {
  check_eta_lambda(eta, lambda);
  const int d = cache.d;
  Eigen::VectorXd filter(d);
  for (int i = 0; i < d; ++i)
    filter(i) = learning_filter(eta, lambda, cache.eigenvalues(i), t, mode);
  const DirectionFactors f = direction_factors(cache, eta, lambda, t, mode);
  PropagatorMatrices out;
  out.filter = filter.asDiagonal();
  out.modulated = cache.f_tilde * f.shrink.asDiagonal() * cache.f_tilde_inv;
  out.noise = cache.f_tilde * f.noise.asDiagonal();
  return out;
}

std::vector<MacroObservables> exact_curve(const ProblemInstance& instance,
                                          const SpectralCache& cache, double eta,
                                          double lambda, std::span<const std::int64_t> t_grid,
                                          const ExactCurveOptions& options) {
  check_eta_lambda(eta, lambda);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 0) throw InvalidArgument("exact_curve: t grid must be non-negative");
    if (k > 0 && t_grid[k] <= t_grid[k - 1])
      throw InvalidArgument("exact_curve: t grid must be strictly increasing");
  }

  std::vector<MacroObservables> curve;
  curve.reserve(t_grid.size());
  for (const std::int64_t t : t_grid) {
    MacroObservables obs;
    obs.t = static_cast<double>(t);
    if (t > 0) {
      if (options.mode == ExactMode::realized) {
        const ClosedFormIterate it = gd_iterate_closed_form(cache, eta, lambda, t, options.time);
        const Overlaps o = measure_rq(instance, it.weights);
        obs.R = o.R;
        obs.Q = o.Q;
      } else {
        const double tt = static_cast<double>(t);
        obs.R = r_trace(cache, instance.teacher, eta, lambda, tt, options.time);
        obs.Q = q_trace(cache, instance.teacher, eta, lambda, instance.noise_std, tt, options.time);
      }
    }
    obs.L_G = gen_error_from_rq(obs.R, obs.Q, instance.noise_std, options.include_test_noise);
    curve.push_back(obs);
  }
  return curve;
}

std::vector<MacroObservables> exact_curve(const ProblemInstance& instance, double eta,
                                          double lambda, std::span<const std::int64_t> t_grid,
                                          const ExactCurveOptions& options) {
  return exact_curve(instance, build_spectral_cache(instance), eta, lambda, t_grid, options);
}

}  // namespace ddlab
