#pragma once

#include <Eigen/Dense>

#include "pss/dataset.hpp"

namespace pss {

struct Whitening {
  Dataset data;               // (x - mean) * transform
  Eigen::VectorXd mean;
  Eigen::MatrixXd transform;  // symmetric Sigma^{-1/2}
  double log_det_covariance = 0.0;
};

// Sample covariance with divisor n - 1.
Eigen::MatrixXd sample_covariance(const Dataset& data);

// Symmetric (ZCA) whitening: zero column means and identity sample covariance.
// Throws kInvalidInput when n <= d and kDegenerate when an eigenvalue of the
// covariance falls below 1e-12 times the largest.
Whitening whiten_detail(const Dataset& data);

Dataset whiten(const Dataset& data);

}  // namespace pss
