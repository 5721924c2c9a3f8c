#include "ddlab/replica_theory.hpp"

#include "ddlab/error.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace ddlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* pattern, double a, double b, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

// b = alpha / (a^2 - alpha), 0 when a is infinite.
double block_b(double alpha, double a, const char* who) {
  if (std::isinf(a)) return 0.0;
  const double gap = a * a - alpha;
  if (!(gap > 0.0))
    throw NumericalFailure(std::string(who) +
                           fmt(": a^2 <= alpha (a = %.17g, alpha = %.17g)", a, alpha));
  return alpha / gap;
}

// (2 - a) / a, which tends to -1 as a -> inf.
double two_minus_a_over_a(double a) { return std::isinf(a) ? -1.0 : (2.0 - a) / a; }

}  // namespace

double effective_ridge(double eta, double lambda, double t) {
  if (!(eta > 0.0)) throw InvalidArgument("effective_ridge: eta must be > 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("effective_ridge: lambda must be >= 0");
  if (!(t > 0.0)) throw InvalidArgument("effective_ridge: t must be > 0");
  if (std::isinf(t)) return lambda;
  return lambda + 1.0 / (eta * t);
}

double block_a(double alpha, double lambda_tilde) {
  if (!(alpha > 0.0)) throw InvalidArgument("block_a: alpha must be > 0");
  if (!(lambda_tilde >= 0.0)) throw InvalidArgument("block_a: lambda~ must be >= 0");
  if (lambda_tilde == 0.0) return alpha > 1.0 ? alpha : 1.0;
  if (std::isinf(lambda_tilde)) return kInf;
  const double u = 1.0 - alpha - lambda_tilde;
  const double s = std::hypot(u, 2.0 * std::sqrt(lambda_tilde));
  if (u >= 0.0) return 1.0 + 2.0 * lambda_tilde / (u + s);
  return 1.0 + 0.5 * (s - u);
}

void ReplicaInputs::validate() const {
  dims.validate(true);
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma2))
    throw InvalidArgument("modulation: sigma1 and sigma2 must be finite and > 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("train.eta must be > 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("train.lambda must be >= 0");
  if (!(sigma_eps >= 0.0) || !std::isfinite(sigma_eps))
    throw InvalidArgument("model.sigma_eps must be finite and >= 0");
  if (!(t >= 0.0)) throw InvalidArgument("replica: t must be >= 0");
}

BipartitePrediction bipartite_prediction(const ReplicaInputs& in) {
  in.validate();
  BipartitePrediction out;
  out.observables.t = in.t;
  if (in.t == 0.0) {
    out.observables.L_G = gen_error_from_rq(0.0, 0.0, in.sigma_eps, in.include_test_noise);
    return out;
  }

  const double d = in.dims.d;
  const double n = in.dims.n;
  const double p1 = in.dims.p;
  const double p2 = d - p1;
  const double lt = effective_ridge(in.eta, in.lambda, in.t);
  const double alpha1 = n / p1;
  const double alpha2 = n / p2;
  const double lt1 = (d / p1) * lt / (in.sigma1 * in.sigma1);
  const double lt2 = (d / p2) * lt / (in.sigma2 * in.sigma2);

  ReplicaParams& r = out.params;
  r.a1 = block_a(alpha1, lt1);
  r.a2 = block_a(alpha2, lt2);
  r.R1 = std::isinf(r.a1) ? 0.0 : n / (r.a1 * d);
  r.R2 = std::isinf(r.a2) ? 0.0 : n / (r.a2 * d);
  r.b1 = block_b(alpha1, r.a1, "bipartite_prediction (block 1)");
  r.b2 = block_b(alpha2, r.a2, "bipartite_prediction (block 2)");
  const double g = 1.0 + in.sigma_eps * in.sigma_eps;
  r.c1 = g - 2.0 * r.R2 - (n / d) * two_minus_a_over_a(r.a1);
  r.c2 = g - 2.0 * r.R1 - (n / d) * two_minus_a_over_a(r.a2);

  const double coupling = r.b1 * r.b2;
  if (!(coupling < 1.0))
    throw NumericalFailure(fmt("bipartite_prediction: b1*b2 = %.17g >= 1 (a1 = %.17g, a2 = %.17g, t = %.17g)",
                               coupling, r.a1, r.a2, in.t));
  r.Q1 = (coupling * r.c2 + r.b1 * r.c1) / (1.0 - coupling);
  r.Q2 = (coupling * r.c1 + r.b2 * r.c2) / (1.0 - coupling);

  out.observables.R = r.R1 + r.R2;
  out.observables.Q = r.Q1 + r.Q2;
  out.observables.L_G =
      gen_error_from_rq(out.observables.R, out.observables.Q, in.sigma_eps, in.include_test_noise);
  return out;
}

MacroObservables single_block_prediction(double alpha, double lambda_tilde, double sigma_eps,
                                         bool include_test_noise) {
  const double a = block_a(alpha, lambda_tilde);
  MacroObservables obs;
  if (!std::isinf(a)) {
    const double g = 1.0 + sigma_eps * sigma_eps;
    obs.R = alpha / a;
    obs.Q = block_b(alpha, a, "single_block_prediction") * (g - alpha * two_minus_a_over_a(a));
  }
  obs.L_G = gen_error_from_rq(obs.R, obs.Q, sigma_eps, include_test_noise);
  return obs;
}

SaddleState saddle_oracle(double alpha, double lambda_tilde, double sigma_eps, double beta,
                          const SaddleOptions& options) {
  if (!(alpha > 0.0)) throw InvalidArgument("saddle_oracle: alpha must be > 0");
  if (!(lambda_tilde > 0.0) || !std::isfinite(lambda_tilde))
    throw InvalidArgument("saddle_oracle: lambda~ must be finite and > 0");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InvalidArgument("saddle_oracle: beta must be finite and > 0");
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw InvalidArgument("saddle_oracle: damping must be in (0, 1]");

  SaddleState s;
  s.beta = beta;
  s.G = 1.0 + sigma_eps * sigma_eps;
  s.H = 1.0;
  const double w = options.damping;

  double R = 0.0, Q = 0.0, delta = 1.0;  // Q0 = 1
  double residual = kInf;
  int it = 0;
  while (it < options.max_iterations) {
    ++it;
    const double bd = beta * delta;
    const double next_delta = 1.0 / (alpha * beta / (1.0 + bd) + beta * lambda_tilde);
    const double next_R = alpha * s.H * bd / (1.0 + bd);
    const double frac = bd / (1.0 + bd);
    const double k = alpha * frac * frac;
    const double next_Q = R * R + k * (s.G - 2.0 * s.H * R + Q);

    const double new_R = (1.0 - w) * R + w * next_R;
    const double new_Q = (1.0 - w) * Q + w * next_Q;
    const double new_delta = (1.0 - w) * delta + w * next_delta;
    // Delta is O(1/beta); compare it on the beta * Delta scale.
    residual = std::max({std::abs(new_R - R), std::abs(new_Q - Q),
                         beta * std::abs(new_delta - delta) / (1.0 + bd)});
    R = new_R;
    Q = new_Q;
    delta = new_delta;
    if (!std::isfinite(residual))
      throw NumericalFailure(fmt("saddle_oracle: iteration blew up (alpha = %.17g, lambda~ = %.17g)",
                                 alpha, lambda_tilde));
    if (residual < options.tolerance) break;
  }
  s.iterations = it;
  s.residual = residual;
  if (!(residual < options.tolerance))
    throw NumericalFailure(fmt("saddle_oracle: no convergence after %.0f iterations, residual %.3g "
                               "(alpha = %.17g, lambda~ = %.17g)",
                               it, residual, alpha, lambda_tilde));

  s.R = R;
  s.Q = Q;
  s.Q0 = Q + delta;
  const double bd = beta * delta;
  s.a = 1.0 + 1.0 / bd;
  const double minus_beta_f = 0.5 * (Q - R * R) / delta + 0.5 * std::log(delta) -
                              0.5 * alpha * std::log1p(bd) -
                              0.5 * alpha * beta * (s.G - 2.0 * s.H * R + Q) / (1.0 + bd) -
                              0.5 * beta * lambda_tilde * (Q + delta);
  s.f = -minus_beta_f / beta;
  return s;
}

std::vector<MacroObservables> theory_curve(const ReplicaInputs& inputs,
                                           std::span<const double> t_grid) {
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > 0.0)) throw InvalidArgument("theory_curve: t grid must be positive");
    if (k > 0 && !(t_grid[k] > t_grid[k - 1]))
      throw InvalidArgument("theory_curve: t grid must be strictly increasing");
  }
  std::vector<MacroObservables> curve;
  curve.reserve(t_grid.size() + 1);
  ReplicaInputs at = inputs;
  at.t = 0.0;
  curve.push_back(bipartite_prediction(at).observables);
  for (const double t : t_grid) {
    at.t = t;
    curve.push_back(bipartite_prediction(at).observables);
  }
  return curve;
}

}  // namespace ddlab
