#include "ddlab/core_model.hpp"

#include "ddlab/error.hpp"
#include "ddlab/rng.hpp"

#include <cmath>
#include <string>

namespace ddlab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, CounterRng& rng, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

// Haar orthogonal matrix via QR of a Gaussian matrix with the sign fix on R's
// diagonal.
Eigen::MatrixXd haar_orthogonal(int d, CounterRng& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(d, d, rng, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

void check_bipartite_args(int d, int p, double sigma1, double sigma2) {
  require(d >= 2, "modulation: d must be >= 2, got " + std::to_string(d));
  require(p >= 1 && p <= d - 1,
          "modulation: block size p must lie in [1, d-1], got " + std::to_string(p));
  require(std::isfinite(sigma1) && std::isfinite(sigma2) && sigma2 > 0.0 && sigma1 >= sigma2,
          "modulation: need sigma1 >= sigma2 > 0");
}

}  // namespace

void ModelDims::validate(bool bipartite) const {
  require(d >= 2, "dims: d must be >= 2, got " + std::to_string(d));
  require(n >= 1, "dims: n must be >= 1, got " + std::to_string(n));
  if (bipartite)
    require(p >= 1 && p <= d - 1, "dims: p must lie in [1, d-1], got " + std::to_string(p));
}

Modulation Modulation::identity(int d) {
  require(d >= 2, "modulation: d must be >= 2, got " + std::to_string(d));
  Modulation m;
  m.kind_ = ModulationKind::identity;
  m.f_ = Eigen::MatrixXd::Identity(d, d);
  m.f_inv_ = m.f_;
  m.block_size_ = d;
  return m;
}

Modulation Modulation::bipartite(int d, int p, double sigma1, double sigma2) {
  check_bipartite_args(d, p, sigma1, sigma2);
  Modulation m;
  m.kind_ = ModulationKind::bipartite;
  Eigen::VectorXd diag(d);
  diag.head(p).setConstant(sigma1);
  diag.tail(d - p).setConstant(sigma2);
  m.f_ = diag.asDiagonal();
  m.f_inv_ = diag.cwiseInverse().asDiagonal();
  m.block_size_ = p;
  m.sigma1_ = sigma1;
  m.sigma2_ = sigma2;
  return m;
}

Modulation Modulation::rotated_bipartite(int d, int p, double sigma1, double sigma2,
                                         std::uint64_t seed) {
  check_bipartite_args(d, p, sigma1, sigma2);
  CounterRng rng(seed, Stream::rotation);
  const Eigen::MatrixXd u = haar_orthogonal(d, rng);
  const Eigen::MatrixXd v = haar_orthogonal(d, rng);
  Eigen::VectorXd diag(d);
  diag.head(p).setConstant(sigma1);
  diag.tail(d - p).setConstant(sigma2);
  Modulation m;
  m.kind_ = ModulationKind::general;
  m.f_ = u * diag.asDiagonal() * v.transpose();
  m.f_inv_ = v * diag.cwiseInverse().asDiagonal() * u.transpose();
  m.block_size_ = p;
  m.sigma1_ = sigma1;
  m.sigma2_ = sigma2;
  return m;
}

Modulation Modulation::general(Eigen::MatrixXd f) {
  require(f.rows() == f.cols(), "modulation: F must be square");
  require(f.rows() >= 2, "modulation: d must be >= 2");
  require(f.allFinite(), "modulation: F has non-finite entries");
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(f);
  const Eigen::VectorXd& s = svd.singularValues();
  const double tol = static_cast<double>(f.rows()) * std::numeric_limits<double>::epsilon() * s(0);
  if (!(s(s.size() - 1) > tol))
    throw InvalidArgument("modulation: F is not invertible (smallest singular value " +
                          std::to_string(s(s.size() - 1)) + ")");
  Modulation m;
  m.kind_ = ModulationKind::general;
  m.f_inv_ = f.partialPivLu().inverse();
  m.f_ = std::move(f);
  m.block_size_ = static_cast<int>(m.f_.rows());
  m.sigma1_ = s(0);
  m.sigma2_ = s(s.size() - 1);
  return m;
}

ProblemInstance generate_instance(const ModelDims& dims, const Modulation& modulation,
                                  double noise_std, std::uint64_t seed,
                                  TeacherNormalization normalization) {
  dims.validate(modulation.kind() == ModulationKind::bipartite);
  require(modulation.dim() == dims.d, "instance: modulation dimension " +
                                          std::to_string(modulation.dim()) +
                                          " does not match d = " + std::to_string(dims.d));
  if (modulation.kind() == ModulationKind::bipartite)
    require(modulation.block_size() == dims.p,
            "instance: modulation block size does not match dims.p");
  require(std::isfinite(noise_std) && noise_std >= 0.0, "instance: noise_std must be >= 0");

  const int d = dims.d;
  const int n = dims.n;

  ProblemInstance inst{.dims = dims,
                       .modulation = modulation,
                       .teacher = {},
                       .z = {},
                       .x = {},
                       .y_star = {},
                       .y = {},
                       .noise_std = noise_std,
                       .seed = seed};

  CounterRng teacher_rng(seed, Stream::teacher);
  inst.teacher.resize(d);
  for (int i = 0; i < d; ++i) inst.teacher(i) = teacher_rng.normal();
  if (normalization == TeacherNormalization::unit_energy)
    inst.teacher *= std::sqrt(static_cast<double>(d)) / inst.teacher.norm();

  CounterRng input_rng(seed, Stream::inputs);
  inst.z = gaussian_matrix(n, d, input_rng, 1.0 / std::sqrt(static_cast<double>(d)));
  inst.x = modulation.kind() == ModulationKind::general
               ? Eigen::MatrixXd(inst.z * modulation.matrix())
               : Eigen::MatrixXd(inst.z * modulation.matrix().diagonal().asDiagonal());

  inst.y_star = inst.z * inst.teacher;
  inst.y = inst.y_star;
  if (noise_std > 0.0) {
    CounterRng noise_rng(seed, Stream::label_noise);
    for (int i = 0; i < n; ++i) inst.y(i) += noise_std * noise_rng.normal();
  }
  return inst;
}

Overlaps measure_rq(const ProblemInstance& instance, const Eigen::VectorXd& student) {
  if (student.size() != instance.dims.d)
    throw InvalidArgument("measure_rq: student has length " + std::to_string(student.size()) +
                          ", expected " + std::to_string(instance.dims.d));
  const Eigen::VectorXd fw = instance.f() * student;
  const double d = instance.dims.d;
  return {instance.teacher.dot(fw) / d, fw.squaredNorm() / d};
}

double gen_error_from_rq(double R, double Q, double noise_std, bool include_test_noise) noexcept {
  const double label_var = include_test_noise ? noise_std * noise_std : 0.0;
  return 0.5 * (1.0 + label_var + Q - 2.0 * R);
}

double teacher_energy(const ProblemInstance& instance) {
  return instance.teacher.squaredNorm() / instance.dims.d;
}

double expected_test_error(const ProblemInstance& instance, const Eigen::VectorXd& student) {
  const Overlaps o = measure_rq(instance, student);
  return 0.5 * (teacher_energy(instance) + o.Q - 2.0 * o.R);
}

McEstimate monte_carlo_test_error(const ProblemInstance& instance,
                                  const Eigen::VectorXd& student, long num_test,
                                  std::uint64_t seed) {
  require(num_test >= 1, "monte_carlo_test_error: num_test must be >= 1");
  if (student.size() != instance.dims.d)
    throw InvalidArgument("monte_carlo_test_error: student length mismatch");

  const int d = instance.dims.d;
  // y* - y_hat = z^T (W - F w), so only the residual direction matters.
  const Eigen::VectorXd residual = instance.teacher - instance.f() * student;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  CounterRng rng(seed, Stream::test_set);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long k = 0; k < num_test; ++k) {
    double diff = 0.0;
    for (int i = 0; i < d; ++i) diff += scale * rng.normal() * residual(i);
    const double loss = 0.5 * diff * diff;
    sum += loss;
    sum_sq += loss * loss;
  }
  const double m = static_cast<double>(num_test);
  const double mean = sum / m;
  const double var = num_test > 1 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) : 0.0;
  return {mean, std::sqrt(var / m)};
}

}  // namespace ddlab
