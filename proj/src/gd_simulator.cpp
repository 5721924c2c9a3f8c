#include "ddlab/gd_simulator.hpp"

#include "ddlab/error.hpp"
#include "ddlab/parallel.hpp"
#include "ddlab/rng.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace ddlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool diverged(const Eigen::VectorXd& w, double threshold) {
  const double norm = w.norm();
  return !std::isfinite(norm) || norm > threshold;
}

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
};

void finish(const std::vector<Accumulator>& acc, int count, std::vector<double>& mean,
            std::vector<double>& stdev) {
  mean.assign(acc.size(), kNaN);
  stdev.assign(acc.size(), kNaN);
  if (count == 0) return;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const double m = acc[k].sum / count;
    mean[k] = m;
    stdev[k] = count > 1
                   ? std::sqrt(std::max(0.0, (acc[k].sum_sq - count * m * m) / (count - 1)))
                   : 0.0;
  }
}

// Stepping with additive update noise; one draw per coordinate per step.
SingleRun train_noisy(const ProblemInstance& instance, const TrainConfig& config) {
  const int d = instance.dims.d;
  const Eigen::MatrixXd gram = instance.x.transpose() * instance.x;
  const Eigen::VectorXd drive = config.eta * (instance.x.transpose() * instance.y);
  const double decay = 1.0 - config.eta * config.lambda;
  const double threshold = divergence_threshold(d);
  CounterRng rng(instance.seed, Stream::update_noise);

  SingleRun run;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  std::int64_t step = 0;
  for (const std::int64_t target : config.checkpoints) {
    MacroObservables obs{.t = static_cast<double>(target)};
    if (!run.diverged) {
      for (; step < target; ++step) {
        w = decay * w - config.eta * (gram * w) + drive;
        for (int i = 0; i < d; ++i) w(i) += config.sgd_noise_std * rng.normal();
      }
      if (diverged(w, threshold)) {
        run.diverged = true;
        run.diverged_at = target;
      }
    }
    if (run.diverged) {
      obs.R = obs.Q = obs.L_G = kNaN;
      run.points.push_back(obs);
      run.train_loss.push_back(kNaN);
      continue;
    }
    const Overlaps o = measure_rq(instance, w);
    obs.R = o.R;
    obs.Q = o.Q;
    obs.L_G = gen_error_from_rq(o.R, o.Q, instance.noise_std, config.include_test_noise);
    run.points.push_back(obs);
    run.train_loss.push_back(training_loss(instance, w, config.lambda));
  }
  return run;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("train.eta must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("train.lambda must be finite and >= 0");
  if (!(sgd_noise_std >= 0.0)) throw InvalidArgument("train.sgd_noise_std must be >= 0");
  if (num_seeds < 1) throw InvalidArgument("train.seeds must be >= 1");
  if (checkpoints.empty()) throw InvalidArgument("train: checkpoint list is empty");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] < 0) throw InvalidArgument("train: checkpoints must be >= 0");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1])
      throw InvalidArgument("train: checkpoints must be strictly increasing");
  }
}

double divergence_threshold(int d) { return 1e6 * std::sqrt(static_cast<double>(d)); }

std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index) {
  return hash64(base_seed, index);
}

double training_loss(const ProblemInstance& instance, const Eigen::VectorXd& w, double lambda) {
  const double n = instance.dims.n;
  return ((instance.y - instance.x * w).squaredNorm() + lambda * w.squaredNorm()) / (2.0 * n);
}

GradientDescent::GradientDescent(const ProblemInstance& instance, double eta, double lambda)
    : eta_(eta), lambda_(lambda) {
  if (!(eta > 0.0)) throw InvalidArgument("GradientDescent: eta must be > 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("GradientDescent: lambda must be >= 0");
  gram_ = instance.x.transpose() * instance.x;
  xty_ = instance.x.transpose() * instance.y;
  const int d = instance.dims.d;
  transition_ = (1.0 - eta * lambda) * Eigen::MatrixXd::Identity(d, d) - eta * gram_;
}

void GradientDescent::step(Eigen::VectorXd& w) const {
  w = transition_ * w + eta_ * xty_;
}

void GradientDescent::ensure_powers(int levels) {
  if (powers_.empty()) {
    powers_.push_back(transition_);
    offsets_.push_back(eta_ * xty_);
  }
  while (static_cast<int>(powers_.size()) < levels) {
    const Eigen::MatrixXd& p = powers_.back();
    const Eigen::VectorXd& c = offsets_.back();
    Eigen::VectorXd next_offset = p * c + c;
    Eigen::MatrixXd next_power = p * p;
    powers_.push_back(std::move(next_power));
    offsets_.push_back(std::move(next_offset));
  }
}

Eigen::VectorXd GradientDescent::iterate(std::int64_t t) {
  if (t < 0) throw InvalidArgument("GradientDescent::iterate: t must be >= 0");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(xty_.size());
  if (t <= kDirectSteps) {
    for (std::int64_t s = 0; s < t; ++s) step(w);
    return w;
  }
  const auto steps = static_cast<std::uint64_t>(t);
  const int levels = std::bit_width(steps);
  ensure_powers(levels);
  for (int k = levels - 1; k >= 0; --k) {
    if ((steps >> k) & 1U) w = powers_[k] * w + offsets_[k];
  }
  return w;
}

Eigen::VectorXd gd_iterate(const ProblemInstance& instance, double eta, double lambda,
                           std::int64_t t) {
  if (t < 0) throw InvalidArgument("gd_iterate: t must be >= 0");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(instance.dims.d);
  for (std::int64_t s = 0; s < t; ++s) {
    const Eigen::VectorXd grad = -instance.x.transpose() * (instance.y - instance.x * w) + lambda * w;
    w -= eta * grad;
  }
  return w;
}

SingleRun train_single(const ProblemInstance& instance, const TrainConfig& config) {
  config.validate();
  GradientDescent gd(instance, config.eta, config.lambda);
  const double threshold = divergence_threshold(instance.dims.d);

  SingleRun run;
  Eigen::VectorXd running = Eigen::VectorXd::Zero(instance.dims.d);
  std::int64_t running_step = 0;
  for (const std::int64_t target : config.checkpoints) {
    MacroObservables obs{.t = static_cast<double>(target)};
    Eigen::VectorXd w;
    if (!run.diverged) {
      if (target <= GradientDescent::kDirectSteps) {
        for (; running_step < target; ++running_step) gd.step(running);
        w = running;
      } else {
        w = gd.iterate(target);
      }
      if (diverged(w, threshold)) {
        run.diverged = true;
        run.diverged_at = target;
      }
    }
    if (run.diverged) {
      obs.R = obs.Q = obs.L_G = kNaN;
      run.points.push_back(obs);
      run.train_loss.push_back(kNaN);
      continue;
    }
    const Overlaps o = measure_rq(instance, w);
    obs.R = o.R;
    obs.Q = o.Q;
    obs.L_G = gen_error_from_rq(o.R, o.Q, instance.noise_std, config.include_test_noise);
    run.points.push_back(obs);
    run.train_loss.push_back(training_loss(instance, w, config.lambda));
  }
  return run;
}

TrajectoryStats train(const ModelDims& dims, const Modulation& modulation, double noise_std,
                      const TrainConfig& config, int threads) {
  config.validate();
  const auto seeds = static_cast<std::size_t>(config.num_seeds);
  std::vector<SingleRun> runs(seeds);
  parallel_for(seeds, threads, [&](std::size_t s) {
    const ProblemInstance instance =
        generate_instance(dims, modulation, noise_std, replicate_seed(config.base_seed, s));
    runs[s] = config.sgd_noise_std > 0.0 ? train_noisy(instance, config)
                                         : train_single(instance, config);
  });

  const std::size_t points = config.checkpoints.size();
  std::vector<Accumulator> acc_r(points), acc_q(points), acc_lg(points), acc_lt(points);
  TrajectoryStats stats;
  stats.checkpoints = config.checkpoints;
  for (std::size_t s = 0; s < seeds; ++s) {
    const SingleRun& run = runs[s];
    if (run.diverged) {
      stats.diverged_seeds.push_back(static_cast<int>(s));
      continue;
    }
    ++stats.seeds_used;
    for (std::size_t k = 0; k < points; ++k) {
      const MacroObservables& o = run.points[k];
      acc_r[k].sum += o.R;
      acc_r[k].sum_sq += o.R * o.R;
      acc_q[k].sum += o.Q;
      acc_q[k].sum_sq += o.Q * o.Q;
      acc_lg[k].sum += o.L_G;
      acc_lg[k].sum_sq += o.L_G * o.L_G;
      acc_lt[k].sum += run.train_loss[k];
      acc_lt[k].sum_sq += run.train_loss[k] * run.train_loss[k];
    }
  }
  finish(acc_r, stats.seeds_used, stats.mean_R, stats.std_R);
  finish(acc_q, stats.seeds_used, stats.mean_Q, stats.std_Q);
  finish(acc_lg, stats.seeds_used, stats.mean_L_G, stats.std_L_G);
  finish(acc_lt, stats.seeds_used, stats.mean_L_T, stats.std_L_T);
  if (config.keep_raw) stats.raw = std::move(runs);
  return stats;
}

}  // namespace ddlab
