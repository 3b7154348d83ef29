#pragma once

// Seeded samplers for the benchmark families and their closed-form entropies:
// a multivariate normal with correlation matrix R, and Gamma marginals joined
// by a Gaussian copula with the same R. For both,
//   H(X) = sum_j h(X_j) + 1/2 log det R.

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "pss/dataset.hpp"

namespace pss {

// Symmetric positive-definite matrix with unit diagonal.
class CorrelationMatrix {
 public:
  // Throws kInvalidInput if `r` is not square, not symmetric within 1e-12,
  // lacks a unit diagonal, or is not positive definite.
  explicit CorrelationMatrix(Eigen::MatrixXd r);

  static CorrelationMatrix identity(std::size_t d);

  std::size_t dims() const noexcept { return static_cast<std::size_t>(r_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return r_; }
  const Eigen::MatrixXd& cholesky_factor() const noexcept { return lower_; }
  double log_det() const noexcept { return log_det_; }

 private:
  Eigen::MatrixXd r_;
  Eigen::MatrixXd lower_;
  double log_det_ = 0.0;
};

enum class Family { kNormal, kGammaCopula };

struct DistributionSpec {
  Family family = Family::kNormal;
  CorrelationMatrix correlation = CorrelationMatrix::identity(1);
  double shape = 1.0;  // Gamma only
  double scale = 1.0;  // Gamma only

  std::size_t dims() const noexcept { return correlation.dims(); }

  static DistributionSpec normal(CorrelationMatrix r);
  // Throws kInvalidInput unless shape > 0 and scale > 0.
  static DistributionSpec gamma_copula(CorrelationMatrix r, double shape, double scale);
};

// (seed, trial) fully determines a sample; trial t is reachable directly.
struct Seed {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  std::uint64_t stream() const noexcept;
};

// 1 on the diagonal, rho elsewhere. Throws kInvalidInput unless
// -1/(d-1) < rho < 1.
CorrelationMatrix equicorrelation(std::size_t d, double rho);

Dataset sample(const DistributionSpec& spec, std::size_t n, Seed seed);

double gamma_entropy(double shape, double scale);

double oracle_entropy(const DistributionSpec& spec);

}  // namespace pss
