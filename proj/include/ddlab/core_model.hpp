#pragma once

// Teacher-student data model: a fixed linear teacher y = z^T W + eps acting on
// latent inputs z, and a linear student that only sees the modulated inputs
// x = F^T z. Everything downstream is expressed through the two overlaps
//   R = W^T F w / d   (teacher-student alignment)
//   Q = w^T F^T F w / d   (modulated student norm)
// and L_G = (1 + Q - 2R) / 2.

#include <Eigen/Dense>

#include <cstdint>
#include <limits>

namespace ddlab {

struct ModelDims {
  int d = 0;  ///< input dimension
  int p = 0;  ///< size of the fast singular block (bipartite modulation only)
  int n = 0;  ///< number of training examples

  /// Throws InvalidArgument unless d >= 2 and n >= 1. The block size is only
  /// checked when `bipartite` is set.
  void validate(bool bipartite = false) const;
};

enum class ModulationKind { identity, bipartite, general };

/// The modulation matrix F together with its inverse and singular-value summary.
class Modulation {
 public:
  static Modulation identity(int d);

  /// diag(sigma1 * 1_p, sigma2 * 1_{d-p}); requires sigma1 >= sigma2 > 0.
  static Modulation bipartite(int d, int p, double sigma1, double sigma2);

  /// U diag(sigma1 * 1_p, sigma2 * 1_{d-p}) V^T with Haar-random orthogonal U, V.
  /// Same spectrum as the diagonal form; used for rotation-robustness checks.
  static Modulation rotated_bipartite(int d, int p, double sigma1, double sigma2,
                                      std::uint64_t seed);

  /// Arbitrary square matrix; rejected unless its smallest singular value
  /// exceeds d * eps * sigma_max.
  static Modulation general(Eigen::MatrixXd f);

  ModulationKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(f_.rows()); }
  int block_size() const { return block_size_; }
  double sigma1() const { return sigma1_; }
  double sigma2() const { return sigma2_; }
  double kappa() const { return sigma1_ / sigma2_; }
  bool is_diagonal() const { return kind_ != ModulationKind::general; }

  const Eigen::MatrixXd& matrix() const { return f_; }
  const Eigen::MatrixXd& inverse() const { return f_inv_; }

 private:
  Modulation() = default;

  ModulationKind kind_ = ModulationKind::identity;
  Eigen::MatrixXd f_;
  Eigen::MatrixXd f_inv_;
  int block_size_ = 0;
  double sigma1_ = 1.0;
  double sigma2_ = 1.0;
};

enum class TeacherNormalization {
  unit_energy,  ///< rescale the Gaussian draw so ||W||^2 = d exactly
  none,         ///< raw i.i.d. N(0, 1) entries
};

struct ProblemInstance {
  ModelDims dims;
  Modulation modulation;
  Eigen::VectorXd teacher;  ///< W
  Eigen::MatrixXd z;        ///< n x d teacher inputs, entries N(0, 1/d)
  Eigen::MatrixXd x;        ///< n x d student inputs, Z F
  Eigen::VectorXd y_star;   ///< Z W
  Eigen::VectorXd y;        ///< y_star + eps
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  const Eigen::MatrixXd& f() const { return modulation.matrix(); }
  int d() const { return dims.d; }
  int n() const { return dims.n; }
};

/// Deterministic in all arguments. W, Z and eps come from independent
/// sub-streams of `seed`.
ProblemInstance generate_instance(const ModelDims& dims, const Modulation& modulation,
                                  double noise_std, std::uint64_t seed,
                                  TeacherNormalization normalization = TeacherNormalization::unit_energy);

struct Overlaps {
  double R = 0.0;
  double Q = 0.0;
};

/// One point of a learning curve. t = +inf marks the converged limit.
struct MacroObservables {
  double t = 0.0;
  double R = 0.0;
  double Q = 0.0;
  double L_G = 0.5;

  static constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();
};

Overlaps measure_rq(const ProblemInstance& instance, const Eigen::VectorXd& student);

/// (1 + Q - 2R)/2, or (1 + sigma^2 + Q - 2R)/2 when the test labels are noisy.
double gen_error_from_rq(double R, double Q, double noise_std = 0.0,
                         bool include_test_noise = false) noexcept;

/// ||W||^2 / d. Equal to 1 for unit-energy teachers.
double teacher_energy(const ProblemInstance& instance);

/// Exact expected half squared error against the noiseless teacher for this
/// instance: (||W||^2/d + Q - 2R) / 2.
double expected_test_error(const ProblemInstance& instance, const Eigen::VectorXd& student);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Half mean squared error of the student against the noiseless teacher on
/// `num_test` fresh inputs drawn from the teacher distribution.
McEstimate monte_carlo_test_error(const ProblemInstance& instance,
                                  const Eigen::VectorXd& student, long num_test,
                                  std::uint64_t seed);

}  // namespace ddlab
