#include "pss/preprocess.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "pss/error.hpp"

namespace pss {
namespace {

constexpr double kRelativeEigenFloor = 1e-12;

Eigen::MatrixXd as_matrix(const Dataset& data) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(data.rows()), static_cast<Eigen::Index>(data.cols()));
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = data(r, j);
    }
  }
  return m;
}

}  // namespace

Eigen::MatrixXd sample_covariance(const Dataset& data) {
  if (data.rows() < 2) throw_invalid("covariance needs at least 2 rows");
  const Eigen::MatrixXd x = as_matrix(data);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(data.rows() - 1);
}

Whitening whiten_detail(const Dataset& data) {
  if (data.rows() <= data.cols()) {
    throw_invalid("whitening needs more rows than columns (n=" + std::to_string(data.rows()) +
                  ", d=" + std::to_string(data.cols()) + ")");
  }
  const Eigen::MatrixXd x = as_matrix(data);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw_degenerate("covariance eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double largest = lambda.maxCoeff();
  if (!(largest > 0.0) || lambda.minCoeff() < kRelativeEigenFloor * largest) {
    std::ostringstream msg;
    msg << "covariance is rank deficient: smallest eigenvalue " << lambda.minCoeff()
        << " is below " << kRelativeEigenFloor << " x largest (" << largest << ")";
    throw_degenerate(msg.str());
  }

  Whitening out;
  out.mean = mean.transpose();
  out.transform = eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                  eig.eigenvectors().transpose();
  out.log_det_covariance = lambda.array().log().sum();
  const Eigen::MatrixXd white = centered * out.transform;
  out.data = Dataset(data.rows(), data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      out.data(r, j) = white(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

Dataset whiten(const Dataset& data) { return whiten_detail(data).data; }

}  // namespace pss
