#include "pss/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pss/error.hpp"

namespace pss {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / M_SQRT2); }

// Upper tail through Q(a, x) keeps precision where Phi(z) rounds to 1.
double gamma_quantile_of_normal(double z, double shape, double scale) {
  if (z <= 0.0) return scale * boost::math::gamma_p_inv(shape, normal_cdf(z));
  return scale * boost::math::gamma_q_inv(shape, normal_cdf(-z));
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd r) : r_(std::move(r)) {
  if (r_.rows() == 0 || r_.rows() != r_.cols()) throw_invalid("correlation matrix must be square and nonempty");
  const Eigen::Index d = r_.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(r_(i, i) - 1.0) > 1e-12) throw_invalid("correlation matrix needs a unit diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(r_(i, j) - r_(j, i)) > 1e-12) throw_invalid("correlation matrix is not symmetric");
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(r_);
  if (llt.info() != Eigen::Success) throw_invalid("correlation matrix is not positive definite");
  lower_ = llt.matrixL();
  log_det_ = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) log_det_ += 2.0 * std::log(lower_(i, i));
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return CorrelationMatrix(Eigen::MatrixXd::Identity(n, n));
}

DistributionSpec DistributionSpec::normal(CorrelationMatrix r) {
  DistributionSpec spec;
  spec.family = Family::kNormal;
  spec.correlation = std::move(r);
  return spec;
}

DistributionSpec DistributionSpec::gamma_copula(CorrelationMatrix r, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw_invalid("Gamma shape and scale must be positive");
  DistributionSpec spec;
  spec.family = Family::kGammaCopula;
  spec.correlation = std::move(r);
  spec.shape = shape;
  spec.scale = scale;
  return spec;
}

std::uint64_t Seed::stream() const noexcept { return splitmix64(splitmix64(seed) ^ trial); }

CorrelationMatrix equicorrelation(std::size_t d, double rho) {
  if (d == 0) throw_invalid("dimension must be >= 1");
  const double lower = d > 1 ? -1.0 / static_cast<double>(d - 1) : -1.0;
  if (d > 1 && !(rho > lower && rho < 1.0)) {
    throw_invalid("rho=" + std::to_string(rho) + " outside the positive-definite range (" +
                  std::to_string(lower) + ", 1)");
  }
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(n, n, rho);
  r.diagonal().setOnes();
  return CorrelationMatrix(std::move(r));
}

Dataset sample(const DistributionSpec& spec, std::size_t n, Seed seed) {
  if (n < 1) throw_invalid("sample size must be >= 1");
  const std::size_t d = spec.dims();
  const Eigen::MatrixXd& lower = spec.correlation.cholesky_factor();
  std::mt19937_64 rng(seed.stream());
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset out(n, d);
  Eigen::VectorXd white(static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& w : white) w = gauss(rng);
    const Eigen::VectorXd z = lower.triangularView<Eigen::Lower>() * white;
    for (std::size_t j = 0; j < d; ++j) {
      const double zj = z(static_cast<Eigen::Index>(j));
      out(r, j) = spec.family == Family::kNormal ? zj
                                                 : gamma_quantile_of_normal(zj, spec.shape, spec.scale);
    }
  }
  return out;
}

double gamma_entropy(double shape, double scale) {
  return shape + std::log(scale) + std::lgamma(shape) +
         (1.0 - shape) * boost::math::digamma(shape);
}

double oracle_entropy(const DistributionSpec& spec) {
  const double d = static_cast<double>(spec.dims());
  const double marginal = spec.family == Family::kNormal
                              ? 0.5 * std::log(2.0 * M_PI * M_E)
                              : gamma_entropy(spec.shape, spec.scale);
  return d * marginal + 0.5 * spec.correlation.log_det();
}

}  // namespace pss
