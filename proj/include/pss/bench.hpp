#pragma once

// Seeded RMSE/runtime sweeps of the PSS, KL and KSG entropy estimators against
// the synthetic families' closed-form entropies, and the total-correlation
// report used on real tables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pss/dataset.hpp"
#include "pss/knn.hpp"
#include "pss/model_selection.hpp"
#include "pss/synthetic.hpp"

namespace pss {

enum class Estimator { kPss, kKl, kKsg };
enum class TuningPolicy { kOracle, kFixed, kCrossValidated };

std::string to_string(Estimator e);
std::string to_string(TuningPolicy p);
std::string to_string(Family f);
// Throw kConfig on unknown names.
Estimator parse_estimator(const std::string& name);
Family parse_family(const std::string& name);

struct BenchConfig {
  Family family = Family::kNormal;
  double shape = 0.4;
  double scale = 0.3;
  std::vector<std::size_t> ns;
  std::vector<std::size_t> dims;
  std::vector<double> rhos{0.0};
  std::vector<Estimator> estimators{Estimator::kPss};

  TuningPolicy policy = TuningPolicy::kOracle;
  std::vector<std::size_t> ell_grid;  // oracle grid or CV candidates; empty -> defaults
  std::vector<std::size_t> k_grid;    // oracle policy; empty -> {1,2,3,4,5,6,8,10}
  std::size_t fixed_ell = 1;
  std::size_t fixed_k = 1;
  std::size_t cv_folds = 3;

  NeighborSearch search = NeighborSearch::kKdTree;
  KsgWidth ksg_width = KsgWidth::kRectangleSide;

  std::size_t trials = 1;
  std::uint64_t seed = 0;
  // Trials run on this many threads; runtimes are only comparable with 1.
  std::size_t workers = 1;
};

// Throws kConfig for empty sweep axes, trials < 1 or CV tuning of kNN.
void validate(const BenchConfig& cfg);

struct BenchRow {
  Estimator estimator = Estimator::kPss;
  Family family = Family::kNormal;
  std::size_t n = 0;
  std::size_t d = 0;
  double rho = 0.0;
  std::string hyper_name;  // "ell" or "k"
  std::size_t hyper = 0;   // CV policy: the most frequently selected ell
  double oracle = 0.0;
  double rmse = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mean_runtime = 0.0;    // seconds
  double median_runtime = 0.0;  // seconds
  std::size_t trials = 0;       // successful trials entering the statistics
  std::size_t failed_trials = 0;
  std::vector<double> estimates;  // per trial; NaN marks a failed trial
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRow> rows;
};

BenchReport run_benchmark(const BenchConfig& cfg);

// Default oracle grid for a dimension: 1..30 restricted to ell^d < 2^64.
std::vector<std::size_t> default_ell_grid(std::size_t d);

nlohmann::json to_json(const BenchConfig& cfg);
nlohmann::json to_json(const BenchReport& report);
void write_csv(std::ostream& out, const BenchReport& report);

struct TcOptions {
  bool cross_validate = false;
  std::size_t ell = 1;  // used when cross_validate is false
  std::size_t folds = 3;
  std::uint64_t seed = 0;
  bool whiten = false;
  bool knn_baselines = false;
  std::size_t k = 1;
};

struct TcReport {
  std::size_t n = 0;
  std::size_t d = 0;
  bool whitened = false;
  std::string policy;
  std::size_t ell = 1;
  std::optional<CvResult> cv;
  std::vector<double> marginal_entropies;
  double joint_entropy = 0.0;
  std::size_t joint_skipped_rows = 0;
  double tc = 0.0;
  bool nonnegative = true;
  double seconds = 0.0;
  std::optional<double> tc_kl;
  std::optional<double> tc_ksg;
};

TcReport tc_report(const Dataset& data, const TcOptions& options);
nlohmann::json to_json(const TcReport& report);

}  // namespace pss
