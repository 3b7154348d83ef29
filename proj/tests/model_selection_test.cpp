#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "pss/error.hpp"
#include "pss/estimator.hpp"
#include "pss/model_selection.hpp"
#include "pss/synthetic.hpp"

namespace {

using pss::CvOptions;
using pss::Dataset;
using pss::DiscreteLabels;

Dataset normal_sample(std::size_t n, std::size_t d, double rho, std::uint64_t seed) {
  return pss::sample(pss::DistributionSpec::normal(pss::equicorrelation(d, rho)), n, pss::Seed{seed, 0});
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out(hi - lo + 1);
  std::iota(out.begin(), out.end(), lo);
  return out;
}

// Features X0..X7 with Y = 1{X0 + X1 + X2 + noise > 0}.
struct SelectionTask {
  Dataset features;
  DiscreteLabels labels;
};

SelectionTask selection_task(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Dataset x(n, 8);
  std::vector<long> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < 8; ++j) x(r, j) = z(rng);
    y[r] = x(r, 0) + x(r, 1) + x(r, 2) + 0.5 * z(rng) > 0 ? 1 : 0;
  }
  return {std::move(x), DiscreteLabels(std::move(y))};
}

TEST(DefaultCandidates, Grid) {
  EXPECT_EQ(pss::default_ell_candidates(5000, 2), range(1, 30));
  EXPECT_EQ(pss::default_ell_candidates(100, 2), range(1, 10));
  EXPECT_EQ(pss::default_ell_candidates(1000, 3), range(1, 10));
  EXPECT_EQ(pss::default_ell_candidates(10, 5), range(1, 2));
}

TEST(Cv, SingleCandidate) {
  const auto data = normal_sample(300, 2, 0.0, 1);
  const std::vector<std::size_t> only{3};
  EXPECT_EQ(pss::cv_select_ell(data, only, CvOptions{}).ell_star, 3u);
}

TEST(Cv, Errors) {
  const auto data = normal_sample(10, 1, 0.0, 2);
  const std::vector<std::size_t> cands{1, 2};
  CvOptions opts;
  opts.folds = 1;
  EXPECT_THROW(pss::cv_select_ell(data, cands, opts), pss::Error);
  opts.folds = 6;
  EXPECT_THROW(pss::cv_select_ell(data, cands, opts), pss::Error);
  opts.folds = 3;
  EXPECT_THROW(pss::cv_select_ell(data, std::vector<std::size_t>{}, opts), pss::Error);
  EXPECT_THROW(pss::cv_select_ell(data, std::vector<std::size_t>{0}, opts), pss::Error);
}

TEST(Cv, AllInfeasibleIsDegenerate) {
  const auto data = normal_sample(12, 3, 0.0, 3);
  const std::vector<std::size_t> cands{8, 9};
  try {
    pss::cv_select_ell(data, cands, CvOptions{});
    FAIL();
  } catch (const pss::Error& e) {
    EXPECT_EQ(e.kind(), pss::ErrorKind::kDegenerate);
  }
}

// Re-evaluates the criterion from scratch: the same seeded shuffle and
// contiguous blocks, then the held-out mean of -log f over defined points.
TEST(Cv, MatchesExhaustiveEvaluation) {
  const auto data = normal_sample(5000, 2, 0.0, 4);
  const auto cands = range(1, 12);
  CvOptions opts;
  opts.seed = 99;
  const auto result = pss::cv_select_ell(data, cands, opts);

  std::vector<std::size_t> perm(data.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(opts.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  double best = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  for (std::size_t ell : cands) {
    double total = 0.0;
    std::size_t undefined = 0;
    for (std::size_t f = 0; f < 3; ++f) {
      const std::size_t lo = f * data.rows() / 3, hi = (f + 1) * data.rows() / 3;
      std::vector<std::size_t> in(perm.begin() + lo, perm.begin() + hi);
      std::vector<std::size_t> out(perm.begin(), perm.begin() + lo);
      out.insert(out.end(), perm.begin() + hi, perm.end());
      std::sort(in.begin(), in.end());
      std::sort(out.begin(), out.end());
      pss::PssConfig cfg;
      cfg.ell = ell;
      const auto model = pss::PssModel::fit(data.select_rows(out), cfg);
      double s = 0.0;
      std::size_t defined = 0;
      for (auto r : in) {
        const auto ld = model.log_density(data.row(r));
        if (ld.is_defined()) {
          s -= ld.value();
          ++defined;
        } else {
          ++undefined;
        }
      }
      total += s / static_cast<double>(defined);
    }
    if (static_cast<double>(undefined) > 0.2 * static_cast<double>(data.rows())) continue;
    const double loss = total / 3.0;
    EXPECT_NEAR(result.losses.at(ell), loss, 1e-12) << ell;
    if (loss < best) {
      best = loss;
      argmin = ell;
    }
  }
  EXPECT_EQ(result.ell_star, argmin);
  EXPECT_EQ(result.candidates.size(), cands.size());
}

TEST(Cv, Deterministic) {
  const auto data = normal_sample(1500, 2, 0.5, 5);
  const auto cands = range(1, 8);
  CvOptions opts;
  opts.seed = 7;
  const auto a = pss::cv_select_ell(data, cands, opts);
  const auto b = pss::cv_select_ell(data, cands, opts);
  EXPECT_EQ(a.ell_star, b.ell_star);
  EXPECT_EQ(a.losses, b.losses);
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    EXPECT_EQ(a.candidates[i].undefined_per_fold, b.candidates[i].undefined_per_fold);
  }
}

// Power-of-two scales keep every cell and sub-grid comparison exact.
TEST(Cv, ScalingShiftsLossesOnly) {
  const auto data = normal_sample(2000, 2, 0.6, 6);
  const auto cands = range(1, 10);
  Dataset scaled = data;
  const double a0 = 8.0, a1 = 0.125 / 4;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    scaled(r, 0) *= a0;
    scaled(r, 1) *= a1;
  }
  const auto before = pss::cv_select_ell(data, cands, CvOptions{});
  const auto after = pss::cv_select_ell(scaled, cands, CvOptions{});
  EXPECT_EQ(before.ell_star, after.ell_star);
  ASSERT_EQ(before.losses.size(), after.losses.size());
  for (const auto& [ell, loss] : before.losses) {
    EXPECT_NEAR(after.losses.at(ell), loss + std::log(a0) + std::log(a1), 1e-12) << ell;
  }
}

TEST(Cv, TrainingEqualsValidationIsEntropy) {
  const auto data = normal_sample(3000, 3, 0.3, 7);
  for (std::size_t ell : {1u, 2u, 4u, 7u}) {
    pss::PssConfig cfg;
    cfg.ell = ell;
    const auto ll = pss::holdout_log_likelihood(data, data, cfg);
    const auto h = pss::entropy(data, cfg);
    EXPECT_EQ(-ll.sum / static_cast<double>(data.rows()), h.value) << ell;
    EXPECT_EQ(ll.undefined, h.skipped_rows);
  }
}

TEST(Labels, Counts) {
  const std::vector<double> col{1.0, 0.0, 1.2, 2.6, -0.4};
  const auto labels = DiscreteLabels::from_column(col);
  EXPECT_EQ(labels.counts().size(), 3u);
  EXPECT_EQ(labels.counts().at(0), 2u);
  EXPECT_EQ(labels.counts().at(1), 2u);
  EXPECT_EQ(labels.counts().at(3), 1u);
  EXPECT_EQ(labels.rows_of(1), (std::vector<std::size_t>{0, 2}));
}

TEST(ClassMi, SingleClassIsZero) {
  const auto data = normal_sample(500, 2, 0.3, 8);
  EXPECT_EQ(pss::class_conditional_mi(data, DiscreteLabels(std::vector<long>(500, 4)), 3), 0.0);
}

TEST(ClassMi, IndependentLabels) {
  const auto data = normal_sample(20000, 1, 0.0, 9);
  std::vector<long> y(20000);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 2;
  std::mt19937_64 rng(10);
  std::shuffle(y.begin(), y.end(), rng);
  for (std::size_t ell : {1u, 3u}) {
    EXPECT_LE(std::abs(pss::class_conditional_mi(data, DiscreteLabels(y), ell)), 0.05) << ell;
  }
}

TEST(ClassMi, SignOfNormal) {
  const auto data = normal_sample(20000, 1, 0.0, 11);
  std::vector<long> y(20000);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = data(i, 0) > 0 ? 1 : -1;
  for (std::size_t ell : {1u, 2u, 4u}) {
    EXPECT_NEAR(pss::class_conditional_mi(data, DiscreteLabels(y), ell), std::log(2.0), 0.05) << ell;
  }
}

TEST(ClassMi, RelabelingInvariant) {
  const auto task = selection_task(3000, 12);
  std::vector<long> relabeled(task.labels.labels().begin(), task.labels.labels().end());
  for (auto& c : relabeled) c = c == 0 ? 17 : -3;
  const std::vector<std::size_t> cols{0, 3};
  const auto s = task.features.select_columns(cols);
  EXPECT_NEAR(pss::class_conditional_mi(s, task.labels, 2), pss::class_conditional_mi(s, DiscreteLabels(relabeled), 2),
              1e-12);
}

TEST(ClassMi, DegenerateClasses) {
  const auto data = normal_sample(100, 1, 0.0, 13);
  std::vector<long> y(100, 0);
  y[5] = 1;
  EXPECT_THROW(pss::class_conditional_mi(data, DiscreteLabels(y), 1), pss::Error);
  y[6] = 2;
  y[7] = 2;
  y[8] = 2;
  y[9] = 2;
  const auto est = pss::class_conditional_mi_detail(data, DiscreteLabels(y), 1);
  EXPECT_EQ(est.degenerate_classes, 1u);
  EXPECT_THROW(pss::class_conditional_mi(Dataset{{1.0}, {2.0}}, DiscreteLabels({0, 1}), 1), pss::Error);
}

TEST(Greedy, ZeroSteps) {
  const auto task = selection_task(200, 14);
  const auto trace = pss::greedy_forward_select(task.features, task.labels, 1, 0);
  EXPECT_TRUE(trace.features.empty());
  EXPECT_TRUE(trace.mi.empty());
  EXPECT_THROW(pss::greedy_forward_select(task.features, task.labels, 1, 9), pss::Error);
}

TEST(Greedy, PicksDrivingFeature) {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> z;
  Dataset x(10000, 2);
  std::vector<long> y(10000);
  for (std::size_t r = 0; r < 10000; ++r) {
    x(r, 0) = z(rng);
    x(r, 1) = z(rng);
    y[r] = x(r, 0) + 0.3 * z(rng) > 0 ? 1 : -1;
  }
  const DiscreteLabels labels(y);
  const std::vector<std::size_t> c0{0}, c1{1};
  EXPECT_GT(pss::class_conditional_mi(x.select_columns(c0), labels, 2),
            pss::class_conditional_mi(x.select_columns(c1), labels, 2));
  const auto trace = pss::greedy_forward_select(x, labels, 2, 1);
  ASSERT_EQ(trace.features.size(), 1u);
  EXPECT_EQ(trace.features[0], 0u);
}

TEST(Greedy, EightFeatureTrace) {
  const auto task = selection_task(5000, 16);
  const auto cands = pss::default_ell_candidates(5000, 8);
  const std::size_t ell = pss::cv_select_ell(task.features, cands, CvOptions{}).ell_star;
  const auto trace = pss::greedy_forward_select(task.features, task.labels, ell, 8);
  ASSERT_EQ(trace.features.size(), 8u);
  EXPECT_EQ(std::set<std::size_t>(trace.features.begin(), trace.features.end()).size(), 8u);
  EXPECT_EQ(std::set<std::size_t>(trace.features.begin(), trace.features.begin() + 3),
            (std::set<std::size_t>{0, 1, 2}));
  for (std::size_t s = 1; s < 8; ++s) EXPECT_GE(trace.mi[s], trace.mi[s - 1] - 0.02) << s;
}

}  // namespace
