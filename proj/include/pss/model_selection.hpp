#pragma once

// Choosing ell by K-fold held-out likelihood, and greedy forward feature
// selection by PSS mutual information with a discrete target.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pss/dataset.hpp"
#include "pss/estimator.hpp"

namespace pss {

struct CvOptions {
  std::size_t folds = 3;
  std::uint64_t seed = 0;
  std::size_t min_cell_count = 2;
  // Candidates whose held-out points are undefined more often than this are
  // treated as infeasible.
  double max_undefined_fraction = 0.2;
};

struct CvCandidate {
  std::size_t ell = 1;
  double loss = 0.0;  // mean over folds of mean held-out -log f; NaN if infeasible
  bool feasible = false;
  std::vector<std::size_t> undefined_per_fold;
  std::size_t validation_points = 0;

  std::size_t undefined_total() const noexcept;
};

struct CvResult {
  std::size_t ell_star = 1;
  std::map<std::size_t, double> losses;  // feasible candidates only
  std::vector<CvCandidate> candidates;   // in the order given
};

// Held-out mean negative log-density of `validation` under a PSS model fitted
// on `training`; undefined points are excluded and counted.
LogLikelihood holdout_log_likelihood(const Dataset& training, const Dataset& validation,
                                     const PssConfig& cfg);

// {1, ..., max(2, floor(n^{1/d}))}, capped at 30.
std::vector<std::size_t> default_ell_candidates(std::size_t n, std::size_t d);

// Throws kInvalidInput for K < 2, n < 2K, an empty or zero candidate list, and
// kDegenerate when every candidate is infeasible. Ties go to the smaller ell.
CvResult cv_select_ell(const Dataset& data, std::span<const std::size_t> candidates,
                       const CvOptions& options);

class DiscreteLabels {
 public:
  explicit DiscreteLabels(std::vector<long> labels);
  // Rounds each value of a numeric column to the nearest integer class id.
  static DiscreteLabels from_column(std::span<const double> column);

  std::size_t size() const noexcept { return labels_.size(); }
  std::span<const long> labels() const noexcept { return labels_; }
  // Class id -> count, ascending by id.
  const std::map<long, std::size_t>& counts() const noexcept { return counts_; }
  std::vector<std::size_t> rows_of(long label) const;

 private:
  std::vector<long> labels_;
  std::map<long, std::size_t> counts_;
};

struct ClassMiEstimate {
  double value = 0.0;
  std::size_t degenerate_classes = 0;
};

// H(S) - sum_c (n_c / n) H(S | Y = c), every entropy by PSS at the same ell.
// Classes smaller than min_cell_count contribute 0 and are counted as
// degenerate. A single class gives exactly 0. With two or more classes but
// fewer than two usable ones, throws kInvalidInput.
ClassMiEstimate class_conditional_mi_detail(const Dataset& features, const DiscreteLabels& labels,
                                            std::size_t ell, std::size_t min_cell_count = 2);

double class_conditional_mi(const Dataset& features, const DiscreteLabels& labels, std::size_t ell);

struct SelectionTrace {
  std::vector<std::size_t> features;  // in selection order
  std::vector<double> mi;             // estimate after each addition
};

// Adds, one at a time, the unselected feature maximizing the class-conditional
// MI of the augmented set; ties go to the lowest feature index.
SelectionTrace greedy_forward_select(const Dataset& features, const DiscreteLabels& labels,
                                     std::size_t ell, std::size_t steps);

}  // namespace pss
