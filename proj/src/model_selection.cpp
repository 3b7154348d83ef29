#include "pss/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "pss/error.hpp"

namespace pss {

std::size_t CvCandidate::undefined_total() const noexcept {
  return std::accumulate(undefined_per_fold.begin(), undefined_per_fold.end(), std::size_t{0});
}

LogLikelihood holdout_log_likelihood(const Dataset& training, const Dataset& validation,
                                     const PssConfig& cfg) {
  return log_likelihood(PssModel::fit(training, cfg), validation);
}

std::vector<std::size_t> default_ell_candidates(std::size_t n, std::size_t d) {
  if (d == 0) throw_invalid("dimension must be >= 1");
  const double root = std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d));
  // Guard against pow landing just below an exact integer root.
  auto top = static_cast<std::size_t>(std::floor(root + 1e-9));
  top = std::min<std::size_t>(std::max<std::size_t>(2, top), 30);
  std::vector<std::size_t> out(top);
  std::iota(out.begin(), out.end(), std::size_t{1});
  return out;
}

CvResult cv_select_ell(const Dataset& data, std::span<const std::size_t> candidates,
                       const CvOptions& options) {
  const std::size_t n = data.rows();
  const std::size_t k = options.folds;
  if (k < 2) throw_invalid("cross-validation needs at least 2 folds");
  if (n < 2 * k) throw_invalid("cross-validation needs n >= 2K rows");
  if (candidates.empty()) throw_invalid("no candidate ell values");
  for (auto ell : candidates) {
    if (ell < 1) throw_invalid("candidate ell must be >= 1");
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(options.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  // Contiguous blocks of the shuffled order; block sizes differ by at most 1.
  std::vector<Dataset> train(k);
  std::vector<Dataset> valid(k);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t begin = f * n / k;
    const std::size_t end = (f + 1) * n / k;
    std::vector<std::size_t> in_fold(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                                     perm.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<std::size_t> rest;
    rest.reserve(n - in_fold.size());
    rest.insert(rest.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(begin));
    rest.insert(rest.end(), perm.begin() + static_cast<std::ptrdiff_t>(end), perm.end());
    std::sort(in_fold.begin(), in_fold.end());
    std::sort(rest.begin(), rest.end());
    valid[f] = data.select_rows(in_fold);
    train[f] = data.select_rows(rest);
  }

  CvResult result;
  bool any = false;
  double best = std::numeric_limits<double>::infinity();
  for (const std::size_t ell : candidates) {
    CvCandidate cand;
    cand.ell = ell;
    PssConfig cfg;
    cfg.ell = ell;
    cfg.min_cell_count = options.min_cell_count;

    double loss_sum = 0.0;
    std::size_t informative_folds = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const LogLikelihood ll = holdout_log_likelihood(train[f], valid[f], cfg);
      cand.undefined_per_fold.push_back(ll.undefined + ll.out_of_range);
      cand.validation_points += ll.total();
      if (ll.defined > 0) {
        loss_sum += ll.mean_negative();
        ++informative_folds;
      }
    }
    const double undefined_fraction =
        static_cast<double>(cand.undefined_total()) / static_cast<double>(cand.validation_points);
    cand.feasible = informative_folds == k && undefined_fraction <= options.max_undefined_fraction;
    cand.loss = cand.feasible ? loss_sum / static_cast<double>(k)
                              : std::numeric_limits<double>::quiet_NaN();
    if (cand.feasible) {
      result.losses[ell] = cand.loss;
      if (!any || cand.loss < best || (cand.loss == best && ell < result.ell_star)) {
        best = cand.loss;
        result.ell_star = ell;
        any = true;
      }
    }
    result.candidates.push_back(std::move(cand));
  }
  if (!any) throw_degenerate("every candidate ell left the held-out density undefined");
  return result;
}

DiscreteLabels::DiscreteLabels(std::vector<long> labels) : labels_(std::move(labels)) {
  for (long c : labels_) ++counts_[c];
}

DiscreteLabels DiscreteLabels::from_column(std::span<const double> column) {
  std::vector<long> labels(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!std::isfinite(column[i])) throw_invalid("label column holds a non-finite value");
    labels[i] = std::lround(column[i]);
  }
  return DiscreteLabels(std::move(labels));
}

std::vector<std::size_t> DiscreteLabels::rows_of(long label) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) rows.push_back(i);
  }
  return rows;
}

ClassMiEstimate class_conditional_mi_detail(const Dataset& features, const DiscreteLabels& labels,
                                            std::size_t ell, std::size_t min_cell_count) {
  const std::size_t n = features.rows();
  if (labels.size() != n) throw_invalid("label count does not match feature rows");
  if (n < 4) throw_invalid("class-conditional MI needs at least 4 rows");

  ClassMiEstimate est;
  if (labels.counts().size() == 1) return est;

  std::size_t usable = 0;
  for (const auto& [label, count] : labels.counts()) {
    if (count >= min_cell_count) ++usable;
  }
  if (usable < 2) throw_invalid("fewer than 2 classes have enough rows for an entropy estimate");

  PssConfig cfg;
  cfg.ell = ell;
  cfg.min_cell_count = min_cell_count;
  const double total = entropy(features, cfg).value;
  double conditional = 0.0;
  for (const auto& [label, count] : labels.counts()) {
    if (count < min_cell_count) {
      ++est.degenerate_classes;
      continue;
    }
    const Dataset subset = features.select_rows(labels.rows_of(label));
    const double weight = static_cast<double>(count) / static_cast<double>(n);
    conditional += weight * entropy(subset, cfg).value;
  }
  est.value = total - conditional;
  return est;
}

double class_conditional_mi(const Dataset& features, const DiscreteLabels& labels, std::size_t ell) {
  return class_conditional_mi_detail(features, labels, ell).value;
}

SelectionTrace greedy_forward_select(const Dataset& features, const DiscreteLabels& labels,
                                     std::size_t ell, std::size_t steps) {
  if (steps > features.cols()) {
    throw_invalid("cannot select " + std::to_string(steps) + " of " +
                  std::to_string(features.cols()) + " features");
  }
  SelectionTrace trace;
  std::vector<bool> used(features.cols(), false);
  for (std::size_t step = 0; step < steps; ++step) {
    std::size_t best_feature = features.cols();
    double best_mi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < features.cols(); ++j) {
      if (used[j]) continue;
      std::vector<std::size_t> subset = trace.features;
      subset.push_back(j);
      const double mi = class_conditional_mi(features.select_columns(subset), labels, ell);
      if (mi > best_mi) {
        best_mi = mi;
        best_feature = j;
      }
    }
    used[best_feature] = true;
    trace.features.push_back(best_feature);
    trace.mi.push_back(best_mi);
  }
  return trace;
}

}  // namespace pss
