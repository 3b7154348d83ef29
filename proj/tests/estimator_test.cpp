#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pss/error.hpp"
#include "pss/estimator.hpp"
#include "pss/synthetic.hpp"

namespace {

using pss::Dataset;
using pss::PssConfig;

constexpr double kHalfLog2PiE = 1.4189385332046727;

PssConfig with_ell(std::size_t ell) {
  PssConfig cfg;
  cfg.ell = ell;
  return cfg;
}

Dataset normal_sample(std::size_t n, std::size_t d, double rho, std::uint64_t seed,
                      std::uint64_t trial = 0) {
  return pss::sample(pss::DistributionSpec::normal(pss::equicorrelation(d, rho)), n,
                     pss::Seed{seed, trial});
}

Dataset uniform_sample(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  Dataset data(n, d);
  std::uniform_real_distribution<double> u;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) data(r, j) = u(rng);
  }
  return data;
}

const Dataset kFive{{0}, {1}, {2}, {3}, {4}};

TEST(Fit, SingleCell) {
  const auto model = pss::PssModel::fit(kFive, with_ell(1));
  ASSERT_EQ(model.cells().size(), 1u);
  const auto& cell = model.cells()[0];
  EXPECT_EQ(cell.count(), 5u);
  EXPECT_EQ(cell.m().value, 2u);
  const auto values = cell.axes()[0].sample.values();
  EXPECT_EQ(std::vector<double>(values.begin(), values.end()), (std::vector<double>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(model.skipped_cells().empty());
}

TEST(Fit, SkipsSingletonCells) {
  const Dataset data{{0}, {0.1}, {0.2}, {10}};
  const auto model = pss::PssModel::fit(data, with_ell(2));
  ASSERT_EQ(model.cells().size(), 1u);
  ASSERT_EQ(model.skipped_cells().size(), 1u);
  EXPECT_EQ(model.skipped_cells()[0].count, 1u);
  const double far = 10;
  EXPECT_EQ(model.log_density({&far, 1}).status(), pss::LogDensity::Status::kUndefined);
}

TEST(Fit, CountsAddUp) {
  const auto data = normal_sample(1000, 3, 0.0, 9);
  const auto model = pss::PssModel::fit(data, with_ell(4));
  EXPECT_LE(model.cells().size() + model.skipped_cells().size(), 64u);
  std::size_t total = 0;
  for (const auto& c : model.cells()) {
    total += c.count();
    EXPECT_GE(c.count(), 2u);
    EXPECT_EQ(c.m().value, pss::default_m(c.count()).value);
  }
  for (const auto& c : model.skipped_cells()) total += c.count;
  EXPECT_EQ(total, 1000u);
}

TEST(Fit, Errors) {
  EXPECT_THROW(pss::PssModel::fit(Dataset{{1.0}}, with_ell(1)), pss::Error);
  EXPECT_THROW(pss::PssModel::fit(Dataset(3, 0), with_ell(1)), pss::Error);
  EXPECT_THROW(pss::PssModel::fit(kFive, with_ell(0)), pss::Error);
  PssConfig cfg;
  cfg.min_cell_count = 1;
  EXPECT_THROW(pss::PssModel::fit(kFive, cfg), pss::Error);
}

TEST(LogDensity, Fixtures) {
  const auto model = pss::PssModel::fit(kFive, with_ell(1));
  const double one = 1.0, outside = 5.0;
  const auto ld = model.log_density({&one, 1});
  ASSERT_TRUE(ld.is_defined());
  EXPECT_NEAR(ld.value(), -1.3217558399823195, 1e-14);
  EXPECT_EQ(model.log_density({&outside, 1}).status(), pss::LogDensity::Status::kOutOfRange);
}

TEST(LogDensity, ZeroSpacingIsUndefined) {
  const Dataset data{{1}, {1}, {1}, {1}, {1}, {1}, {1}, {1}, {1}, {5}};
  const auto model = pss::PssModel::fit(data, with_ell(1));
  const double x = 1.0;
  EXPECT_EQ(model.log_density({&x, 1}).status(), pss::LogDensity::Status::kUndefined);
}

// Between the cell wall and the cell's own sample range the density is zero,
// reported as undefined rather than -inf.
TEST(LogDensity, OutsideSubgridIsUndefined) {
  const Dataset data{{0, 0}, {0.1, 0.3}, {0.2, 0.1}, {1, 1}, {0.9, 0.8}, {0.8, 0.9}};
  const auto model = pss::PssModel::fit(data, with_ell(2));
  const std::vector<double> gap{0.45, 0.05};  // cell (0,0), x beyond its sample max
  EXPECT_EQ(model.log_density(gap).status(), pss::LogDensity::Status::kUndefined);
  const std::vector<double> empty_cell{0.1, 0.9};
  EXPECT_EQ(model.log_density(empty_cell).status(), pss::LogDensity::Status::kUndefined);
}

TEST(LogDensity, AlwaysFinite) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 1 + rng() % 3;
    Dataset data = normal_sample(300, d, 0.0, rng());
    for (std::size_t r = 0; r < 300; r += 3) data(r, 0) = std::round(data(r, 0));  // ties
    const auto model = pss::PssModel::fit(data, with_ell(1 + rng() % 6));
    std::normal_distribution<double> z(0, 1.5);
    std::vector<double> q(d);
    for (int i = 0; i < 500; ++i) {
      for (auto& v : q) v = z(rng);
      const auto ld = model.log_density(q);
      if (ld.is_defined()) EXPECT_TRUE(std::isfinite(ld.value()));
    }
  }
}

TEST(Entropy, FiveEvenlySpaced) {
  const auto est = pss::entropy(kFive, with_ell(1));
  EXPECT_NEAR(est.value, 1.0784767751174208, 1e-12);
  EXPECT_EQ(est.skipped_rows, 0u);
  EXPECT_EQ(est.sample_size, 5u);
}

TEST(Entropy, Divisors) {
  const Dataset data{{0}, {0.1}, {0.2}, {0.3}, {10}};
  PssConfig cfg = with_ell(2);
  const auto all = pss::entropy(data, cfg);
  cfg.divisor = pss::EntropyDivisor::kContributingRows;
  const auto contributing = pss::entropy(data, cfg);
  EXPECT_EQ(all.skipped_rows, 1u);
  EXPECT_NEAR(all.value * 5.0, contributing.value * 4.0, 1e-12);
}

TEST(Entropy, AllSkippedIsDegenerate) {
  const Dataset data{{0}, {10}};
  try {
    pss::entropy(data, with_ell(2));
    FAIL();
  } catch (const pss::Error& e) {
    EXPECT_EQ(e.kind(), pss::ErrorKind::kDegenerate);
  }
}

TEST(Entropy, MatchesLogDensitySum) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 50 + rng() % 800;
    const std::size_t d = 1 + rng() % 4;
    const auto data = normal_sample(n, d, 0.3, rng());
    const auto cfg = with_ell(1 + rng() % 5);
    const auto model = pss::PssModel::fit(data, cfg);
    double sum = 0.0;
    std::size_t skipped = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const auto ld = model.log_density(data.row(r));
      ASSERT_NE(ld.status(), pss::LogDensity::Status::kOutOfRange);
      if (ld.is_defined()) {
        sum += ld.value();
      } else {
        ++skipped;
      }
    }
    const auto est = pss::entropy(data, cfg);
    EXPECT_EQ(est.value, -sum / static_cast<double>(n));
    EXPECT_EQ(est.skipped_rows, skipped);
  }
}

TEST(Entropy, StandardNormalPair) {
  const auto data = normal_sample(20000, 2, 0.0, 17);
  double best = 1e9;
  for (std::size_t ell = 1; ell <= 12; ++ell) {
    best = std::min(best, std::abs(pss::entropy(data, with_ell(ell)).value - 2 * kHalfLog2PiE));
  }
  EXPECT_LE(best, 0.05);
}

TEST(Entropy, UnitSquare) {
  std::mt19937_64 rng(4);
  const auto data = uniform_sample(rng, 20000, 2);
  for (std::size_t ell : {1u, 2u}) {
    EXPECT_LE(std::abs(pss::entropy(data, with_ell(ell)).value), 0.05) << ell;
  }
}

// Rows in skipped cells add 0 to the sum while the divisor stays n, so under
// the default divisor the shift is scaled by the contributing fraction.
TEST(Entropy, AffineEquivariance) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> log_scale(-4, 4), shift(-50, 50);
  int with_skips = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 20 + rng() % 1500;
    const std::size_t d = 1 + rng() % 4;
    const auto data = normal_sample(n, d, 0.5, rng());
    auto cfg = with_ell(1 + rng() % 6);
    Dataset moved = data;
    double sum_log = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double a = std::exp(log_scale(rng));
      const double b = shift(rng);
      sum_log += std::log(a);
      for (std::size_t r = 0; r < n; ++r) moved(r, j) = a * data(r, j) + b;
    }
    const auto before = pss::entropy(data, cfg);
    const auto after = pss::entropy(moved, cfg);
    ASSERT_EQ(before.skipped_rows, after.skipped_rows);
    const double contributing = static_cast<double>(n - before.skipped_rows) / static_cast<double>(n);
    EXPECT_NEAR(after.value - before.value, contributing * sum_log, 1e-9);
    if (before.skipped_rows > 0) ++with_skips;

    cfg.divisor = pss::EntropyDivisor::kContributingRows;
    EXPECT_NEAR(pss::entropy(moved, cfg).value - pss::entropy(data, cfg).value, sum_log, 1e-9);
  }
  EXPECT_GT(with_skips, 0);
}

TEST(Entropy, ColumnPermutation) {
  std::mt19937_64 rng(51);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 2 + rng() % 3;
    const auto data = normal_sample(400 + rng() % 600, d, 0.4, rng());
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto cfg = with_ell(1 + rng() % 5);
    EXPECT_NEAR(pss::entropy(data.select_columns(perm), cfg).value, pss::entropy(data, cfg).value,
                1e-12);
  }
}

TEST(Entropy, Deterministic) {
  const auto data = normal_sample(3000, 3, 0.2, 5);
  const auto a = pss::entropy(data, with_ell(4));
  const auto b = pss::entropy(data, with_ell(4));
  EXPECT_EQ(a.value, b.value);
}

// RMSE over seeded trials at the best ell of a small grid.
double tuned_rmse(std::size_t n, std::size_t d) {
  const double oracle = d * kHalfLog2PiE;
  double best = 1e9;
  std::vector<Dataset> trials;
  for (std::uint64_t t = 0; t < 30; ++t) trials.push_back(normal_sample(n, d, 0.0, 606, t));
  for (std::size_t ell = 1; ell <= 8; ++ell) {
    double sq = 0.0;
    for (const auto& data : trials) {
      const double e = pss::entropy(data, with_ell(ell)).value - oracle;
      sq += e * e;
    }
    best = std::min(best, std::sqrt(sq / 30.0));
  }
  return best;
}

TEST(Entropy, RmseShrinksWithSampleSize) {
  for (std::size_t d : {1u, 2u, 5u}) {
    const double r500 = tuned_rmse(500, d);
    const double r2000 = tuned_rmse(2000, d);
    const double r8000 = tuned_rmse(8000, d);
    EXPECT_LT(r2000, r500) << d;
    EXPECT_LT(r8000, r2000) << d;
  }
}

TEST(DensityMass, SingleCell) {
  const auto mass = pss::density_mass(pss::PssModel::fit(kFive, with_ell(1)));
  EXPECT_NEAR(mass.closed_form, 0.8, 1e-15);
  EXPECT_NEAR(mass.interior, 0.8, 1e-12);
}

TEST(DensityMass, IdentityWithoutSkips) {
  std::mt19937_64 rng(61);
  int checked = 0;
  while (checked < 30) {
    const std::size_t d = 1 + rng() % 4;
    const std::size_t n = 10 + rng() % 1500;
    const auto data = normal_sample(n, d, 0.3, rng());
    const auto model = pss::PssModel::fit(data, with_ell(1 + rng() % 5));
    if (!model.skipped_cells().empty()) continue;
    const auto mass = pss::density_mass(model);
    EXPECT_NEAR(mass.interior, mass.closed_form, 1e-9);
    ++checked;
  }
}

TEST(DensityMass, SkippedMassExcluded) {
  const Dataset data{{0}, {0.1}, {0.2}, {0.3}, {0.35}, {10}};
  const auto model = pss::PssModel::fit(data, with_ell(3));
  ASSERT_EQ(model.skipped_cells().size(), 1u);
  EXPECT_LE(pss::density_mass(model).closed_form, 1.0 - 1.0 / 6.0);
}

TEST(MutualInformation, IndependentPair) {
  const auto data = normal_sample(20000, 2, 0.0, 71);
  const std::vector<std::size_t> x{0}, y{1};
  for (std::size_t ell : {1u, 2u, 4u, 6u}) {
    const double mi = pss::mutual_information(data.select_columns(x), data.select_columns(y), with_ell(ell));
    EXPECT_LE(std::abs(mi), 0.05) << ell;
  }
}

TEST(MutualInformation, CorrelatedPair) {
  const auto data = normal_sample(20000, 2, 0.8, 72);
  const std::vector<std::size_t> x{0}, y{1};
  const double mi = pss::mutual_information(data.select_columns(x), data.select_columns(y), with_ell(6));
  EXPECT_NEAR(mi, 0.5108256237659907, 0.07);
}

TEST(MutualInformation, SymmetricBitwise) {
  const auto data = normal_sample(2000, 3, 0.3, 73);
  const std::vector<std::size_t> a{0}, b{1, 2};
  const auto x = data.select_columns(a);
  const auto y = data.select_columns(b);
  for (std::size_t ell : {1u, 3u, 5u}) {
    EXPECT_EQ(pss::mutual_information(x, y, with_ell(ell)), pss::mutual_information(y, x, with_ell(ell)));
  }
  const auto single = data.select_columns(a);
  const double self = pss::mutual_information(single, single, with_ell(4));
  EXPECT_GT(self, 0.5);
}

TEST(TotalCorrelation, IndependentTriple) {
  const auto data = normal_sample(20000, 3, 0.0, 81);
  for (std::size_t ell : {1u, 2u, 3u}) {
    EXPECT_LE(std::abs(pss::total_correlation(data, with_ell(ell))), 0.1) << ell;
  }
}

TEST(TotalCorrelation, CorrelatedPair) {
  const auto data = normal_sample(20000, 2, 0.8, 82);
  EXPECT_NEAR(pss::total_correlation(data, with_ell(6)), 0.5108256237659907, 0.08);
}

TEST(TotalCorrelation, ColumnShuffledCopy) {
  Dataset data = normal_sample(20000, 2, 0.8, 83);
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(84);
  std::shuffle(order.begin(), order.end(), rng);
  Dataset shuffled = data;
  for (std::size_t r = 0; r < data.rows(); ++r) shuffled(r, 1) = data(order[r], 1);
  for (std::size_t ell : {1u, 2u, 3u, 4u}) {
    EXPECT_LE(std::abs(pss::total_correlation(shuffled, with_ell(ell))), 0.1) << ell;
  }
}

TEST(TotalCorrelation, NeedsTwoColumns) {
  EXPECT_THROW(pss::total_correlation(kFive, with_ell(1)), pss::Error);
}

}  // namespace
