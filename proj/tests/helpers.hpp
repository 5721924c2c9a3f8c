#pragma once

#include "ddlab/core_model.hpp"
#include "ddlab/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace testing {

// I + 0.3 G / sqrt(d): condition number stays small for d up to a few hundred.
inline ddlab::Modulation well_conditioned(int d, std::uint64_t seed) {
  ddlab::CounterRng rng(seed, ddlab::Stream::rotation);
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i, j) += 0.3 * rng.normal() / std::sqrt(double(d));
  return ddlab::Modulation::general(f);
}

inline double max_rel_dev(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace testing
