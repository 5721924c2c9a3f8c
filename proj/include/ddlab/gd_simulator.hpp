#pragma once

// Ground-truth iterative trainer. Full-batch gradient descent on
//   J(w) = 1/2 ||y - X w||^2 + lambda/2 ||w||^2
// (the unnormalized gradient, so eta and lambda mean the same thing as in the
// closed forms), optionally with additive isotropic Gaussian update noise.

#include "ddlab/core_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ddlab {

struct TrainConfig {
  double eta = 0.1;
  double lambda = 0.0;
  double sgd_noise_std = 0.0;  ///< std of xi per coordinate and step
  std::vector<std::int64_t> checkpoints;
  std::uint64_t base_seed = 0;
  int num_seeds = 1;
  bool keep_raw = false;
  bool include_test_noise = false;

  void validate() const;
};

/// One training run on one instance.
struct SingleRun {
  std::vector<MacroObservables> points;  ///< one per checkpoint, NaN after divergence
  std::vector<double> train_loss;
  bool diverged = false;
  std::int64_t diverged_at = -1;  ///< first checkpoint (step) where divergence was seen
};

struct TrajectoryStats {
  std::vector<std::int64_t> checkpoints;
  std::vector<double> mean_R, std_R;
  std::vector<double> mean_Q, std_Q;
  std::vector<double> mean_L_G, std_L_G;
  std::vector<double> mean_L_T, std_L_T;
  int seeds_used = 0;
  std::vector<int> diverged_seeds;  ///< excluded from the statistics above
  std::vector<SingleRun> raw;       ///< per seed, only when keep_raw
};

/// Norm above which a run counts as diverged: 1e6 * sqrt(d).
double divergence_threshold(int d);

/// Instance seed for replicate `index`.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index);

/// (1/2n)||y - X w||^2 + (lambda/2n)||w||^2: the minimized objective on the
/// 1/(2n) scale of the usual mean-squared loss.
double training_loss(const ProblemInstance& instance, const Eigen::VectorXd& w, double lambda);

/// Noise-free GD on one instance. The iterate at step t is a deterministic
/// function of t alone: short horizons are stepped one update at a time,
/// longer ones are composed from exact binary powers of the affine update map.
class GradientDescent {
 public:
  GradientDescent(const ProblemInstance& instance, double eta, double lambda);

  /// w <- w - eta * (-X^T (y - X w) + lambda w)
  void step(Eigen::VectorXd& w) const;

  /// w_t from w_0 = 0.
  Eigen::VectorXd iterate(std::int64_t t);

  /// Number of steps that are applied one at a time before switching to powers.
  static constexpr std::int64_t kDirectSteps = 512;

 private:
  void ensure_powers(int levels);

  double eta_;
  double lambda_;
  Eigen::MatrixXd gram_;        // X^T X
  Eigen::VectorXd xty_;         // X^T y
  Eigen::MatrixXd transition_;  // (1 - eta lambda) I - eta X^T X
  // Applying 2^k steps: w -> powers_[k] w + offsets_[k].
  std::vector<Eigen::MatrixXd> powers_;
  std::vector<Eigen::VectorXd> offsets_;
};

/// Plain stepping, t updates from zero. The oracle for the closed form.
Eigen::VectorXd gd_iterate(const ProblemInstance& instance, double eta, double lambda,
                           std::int64_t t);

/// Train on a supplied instance with xi = 0 (sgd_noise_std is ignored).
SingleRun train_single(const ProblemInstance& instance, const TrainConfig& config);

/// Seed-averaged training. Replicate s uses instance seed
/// replicate_seed(base_seed, s); seeds run concurrently up to `threads` and are
/// reduced in seed order.
TrajectoryStats train(const ModelDims& dims, const Modulation& modulation, double noise_std,
                      const TrainConfig& config, int threads = 1);

}  // namespace ddlab
