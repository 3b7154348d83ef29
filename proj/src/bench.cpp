#include "pss/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "pss/error.hpp"
#include "pss/estimator.hpp"
#include "pss/preprocess.hpp"

namespace pss {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

// Outcome of one estimator over one trial, for every hyperparameter tried.
struct TrialResult {
  std::vector<double> estimates;  // NaN on failure
  std::vector<double> runtimes;
  std::size_t selected = 0;  // CV: the ell chosen on this trial
};

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

template <typename Fn>
void for_each_trial(std::size_t trials, std::size_t workers, Fn&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, trials);
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < trials; t = next++) fn(t);
    });
  }
}

TrialResult run_pss(const BenchConfig& cfg, const Dataset& data,
                    const std::vector<std::size_t>& grid, std::uint64_t trial_seed) {
  TrialResult out;
  if (cfg.policy == TuningPolicy::kCrossValidated) {
    const auto start = Clock::now();
    try {
      CvOptions options;
      options.folds = cfg.cv_folds;
      options.seed = trial_seed;
      const auto candidates =
          cfg.ell_grid.empty() ? default_ell_candidates(data.rows(), data.cols()) : cfg.ell_grid;
      const CvResult cv = cv_select_ell(data, candidates, options);
      PssConfig pc;
      pc.ell = cv.ell_star;
      out.estimates.push_back(entropy(data, pc).value);
      out.selected = cv.ell_star;
    } catch (const Error&) {
      out.estimates.push_back(kNaN);
    }
    out.runtimes.push_back(seconds_since(start));
    return out;
  }
  for (std::size_t ell : grid) {
    PssConfig pc;
    pc.ell = ell;
    const auto start = Clock::now();
    double value = kNaN;
    try {
      value = entropy(data, pc).value;
    } catch (const Error&) {
    }
    out.runtimes.push_back(seconds_since(start));
    out.estimates.push_back(value);
  }
  return out;
}

TrialResult run_knn(const BenchConfig& cfg, Estimator which, const Dataset& data,
                    const std::vector<std::size_t>& grid, std::uint64_t trial_seed) {
  TrialResult out;
  const std::size_t k_max = *std::max_element(grid.begin(), grid.end());
  const auto start = Clock::now();
  std::optional<Dataset> points;
  std::optional<NeighborTable> table;
  try {
    points = jitter_duplicates(data, trial_seed);
    table = neighbor_table(*points, k_max, which == Estimator::kKl ? Norm::kEuclidean : Norm::kMax,
                           cfg.search);
  } catch (const Error&) {
  }
  const double search_time = seconds_since(start);
  for (std::size_t k : grid) {
    const auto eval_start = Clock::now();
    double value = kNaN;
    if (table) {
      try {
        value = which == Estimator::kKl ? kl_entropy_from(*points, *table, k)
                                        : ksg_entropy_from(*points, *table, k, cfg.ksg_width);
      } catch (const Error&) {
      }
    }
    out.runtimes.push_back(search_time + seconds_since(eval_start));
    out.estimates.push_back(value);
  }
  return out;
}

BenchRow summarize(Estimator est, const BenchConfig& cfg, std::size_t n, std::size_t d, double rho,
                   double oracle, const std::vector<std::size_t>& grid,
                   const std::vector<TrialResult>& trials) {
  BenchRow row;
  row.estimator = est;
  row.family = cfg.family;
  row.n = n;
  row.d = d;
  row.rho = rho;
  row.oracle = oracle;
  row.hyper_name = est == Estimator::kPss ? "ell" : "k";

  const std::size_t choices = trials.front().estimates.size();
  // Pick the grid entry with the smallest empirical MSE over its successful
  // trials; for fixed and CV policies there is a single entry.
  std::size_t best = 0;
  double best_mse = std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < choices; ++h) {
    double sq = 0.0;
    std::size_t ok = 0;
    for (const auto& tr : trials) {
      if (std::isnan(tr.estimates[h])) continue;
      sq += (tr.estimates[h] - oracle) * (tr.estimates[h] - oracle);
      ++ok;
    }
    if (ok == 0) continue;
    const double mse = sq / static_cast<double>(ok);
    if (mse < best_mse) {
      best_mse = mse;
      best = h;
    }
  }

  std::vector<double> errors;
  std::vector<double> runtimes;
  for (const auto& tr : trials) {
    row.estimates.push_back(tr.estimates[best]);
    runtimes.push_back(tr.runtimes[best]);
    if (std::isnan(tr.estimates[best])) {
      ++row.failed_trials;
    } else {
      errors.push_back(tr.estimates[best] - oracle);
    }
  }
  row.trials = errors.size();

  if (cfg.policy == TuningPolicy::kCrossValidated && est == Estimator::kPss) {
    std::map<std::size_t, std::size_t> votes;
    for (const auto& tr : trials) {
      if (tr.selected > 0) ++votes[tr.selected];
    }
    std::size_t top = 0;
    for (const auto& [ell, count] : votes) {
      if (count > top) {
        top = count;
        row.hyper = ell;
      }
    }
  } else {
    row.hyper = grid[best];
  }

  if (errors.empty()) {
    row.rmse = row.bias = row.variance = kNaN;
  } else {
    const double m = static_cast<double>(errors.size());
    row.bias = std::accumulate(errors.begin(), errors.end(), 0.0) / m;
    double sq = 0.0;
    double centered = 0.0;
    for (double e : errors) {
      sq += e * e;
      centered += (e - row.bias) * (e - row.bias);
    }
    row.rmse = std::sqrt(sq / m);
    row.variance = centered / m;
  }
  row.mean_runtime = std::accumulate(runtimes.begin(), runtimes.end(), 0.0) /
                     static_cast<double>(runtimes.size());
  row.median_runtime = median(runtimes);
  return row;
}

}  // namespace

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::kPss: return "pss";
    case Estimator::kKl: return "kl";
    case Estimator::kKsg: return "ksg";
  }
  return "?";
}

std::string to_string(TuningPolicy p) {
  switch (p) {
    case TuningPolicy::kOracle: return "oracle";
    case TuningPolicy::kFixed: return "fixed";
    case TuningPolicy::kCrossValidated: return "cv";
  }
  return "?";
}

std::string to_string(Family f) { return f == Family::kNormal ? "normal" : "gamma"; }

Estimator parse_estimator(const std::string& name) {
  if (name == "pss") return Estimator::kPss;
  if (name == "kl") return Estimator::kKl;
  if (name == "ksg") return Estimator::kKsg;
  throw_config("unknown estimator '" + name + "' (expected pss, kl or ksg)");
}

Family parse_family(const std::string& name) {
  if (name == "normal") return Family::kNormal;
  if (name == "gamma") return Family::kGammaCopula;
  throw_config("unknown family '" + name + "' (expected normal or gamma)");
}

std::vector<std::size_t> default_ell_grid(std::size_t d) {
  std::vector<std::size_t> grid;
  for (std::size_t ell = 1; ell <= 30; ++ell) {
    const double bits = static_cast<double>(d) * std::log2(static_cast<double>(ell));
    if (bits >= 63.0) break;
    grid.push_back(ell);
  }
  return grid;
}

void validate(const BenchConfig& cfg) {
  if (cfg.ns.empty() || cfg.dims.empty() || cfg.rhos.empty() || cfg.estimators.empty()) {
    throw_config("benchmark sweep axes and estimator list must be nonempty");
  }
  if (cfg.trials < 1) throw_config("benchmark needs at least one trial");
  for (auto n : cfg.ns) {
    if (n < 4) throw_config("benchmark sample sizes must be >= 4");
  }
  for (auto d : cfg.dims) {
    if (d < 1) throw_config("benchmark dimensions must be >= 1");
  }
  if (cfg.policy == TuningPolicy::kCrossValidated) {
    for (auto e : cfg.estimators) {
      if (e != Estimator::kPss) throw_config("cross-validated tuning is only available for pss");
    }
  }
  if (cfg.family == Family::kGammaCopula && (!(cfg.shape > 0.0) || !(cfg.scale > 0.0))) {
    throw_config("Gamma shape and scale must be positive");
  }
  for (auto k : cfg.k_grid) {
    if (k < 1) throw_config("k grid values must be >= 1");
  }
  for (auto ell : cfg.ell_grid) {
    if (ell < 1) throw_config("ell grid values must be >= 1");
  }
}

BenchReport run_benchmark(const BenchConfig& cfg) {
  validate(cfg);
  BenchReport report;
  report.config = cfg;

  for (std::size_t d : cfg.dims) {
    for (double rho : cfg.rhos) {
      CorrelationMatrix corr = [&] {
        try {
          return equicorrelation(d, rho);
        } catch (const Error& e) {
          throw_config(e.what());
        }
      }();
      const DistributionSpec spec = cfg.family == Family::kNormal
                                        ? DistributionSpec::normal(corr)
                                        : DistributionSpec::gamma_copula(corr, cfg.shape, cfg.scale);
      const double oracle = oracle_entropy(spec);

      for (std::size_t n : cfg.ns) {
        std::uint64_t point_seed = mix(mix(mix(cfg.seed, n), d), std::bit_cast<std::uint64_t>(rho));

        std::vector<std::size_t> pss_grid =
            cfg.policy == TuningPolicy::kFixed ? std::vector<std::size_t>{cfg.fixed_ell}
            : cfg.ell_grid.empty()             ? default_ell_grid(d)
                                               : cfg.ell_grid;
        std::vector<std::size_t> k_grid =
            cfg.policy == TuningPolicy::kFixed ? std::vector<std::size_t>{cfg.fixed_k}
            : cfg.k_grid.empty() ? std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 8, 10}
                                 : cfg.k_grid;
        std::erase_if(k_grid, [n](std::size_t k) { return k + 1 > n; });
        if (k_grid.empty()) throw_config("no k in the grid is below n");
        if (cfg.policy == TuningPolicy::kCrossValidated) pss_grid = {0};

        std::vector<std::vector<TrialResult>> results(cfg.estimators.size(),
                                                      std::vector<TrialResult>(cfg.trials));
        for_each_trial(cfg.trials, cfg.workers, [&](std::size_t t) {
          const Seed seed{point_seed, t};
          const Dataset data = sample(spec, n, seed);
          for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
            const Estimator est = cfg.estimators[e];
            results[e][t] = est == Estimator::kPss
                                ? run_pss(cfg, data, pss_grid, seed.stream())
                                : run_knn(cfg, est, data, k_grid, seed.stream());
          }
        });
        for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
          const Estimator est = cfg.estimators[e];
          report.rows.push_back(summarize(est, cfg, n, d, rho, oracle,
                                          est == Estimator::kPss ? pss_grid : k_grid, results[e]));
        }
      }
    }
  }
  return report;
}

nlohmann::json to_json(const BenchConfig& cfg) {
  nlohmann::json j;
  j["family"] = to_string(cfg.family);
  if (cfg.family == Family::kGammaCopula) {
    j["shape"] = cfg.shape;
    j["scale"] = cfg.scale;
  }
  j["ns"] = cfg.ns;
  j["dims"] = cfg.dims;
  j["rhos"] = cfg.rhos;
  std::vector<std::string> names;
  for (auto e : cfg.estimators) names.push_back(to_string(e));
  j["estimators"] = names;
  j["policy"] = to_string(cfg.policy);
  j["ell_grid"] = cfg.ell_grid;
  j["k_grid"] = cfg.k_grid;
  j["fixed_ell"] = cfg.fixed_ell;
  j["fixed_k"] = cfg.fixed_k;
  j["cv_folds"] = cfg.cv_folds;
  j["search"] = cfg.search == NeighborSearch::kKdTree ? "kdtree" : "brute";
  j["ksg_width"] = cfg.ksg_width == KsgWidth::kRectangleSide ? "rectangle" : "offset";
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  return j;
}

nlohmann::json to_json(const BenchReport& report) {
  // Nested by sweep axes: d -> rho -> n -> estimator.
  nlohmann::json sweep = nlohmann::json::object();
  for (const auto& row : report.rows) {
    nlohmann::json r;
    r[row.hyper_name] = row.hyper;
    r["oracle"] = row.oracle;
    r["rmse"] = row.rmse;
    r["bias"] = row.bias;
    r["variance"] = row.variance;
    r["mean_runtime_s"] = row.mean_runtime;
    r["median_runtime_s"] = row.median_runtime;
    r["trials"] = row.trials;
    r["failed_trials"] = row.failed_trials;
    std::ostringstream rho;
    rho.precision(17);
    rho << row.rho;
    sweep["d=" + std::to_string(row.d)]["rho=" + rho.str()]["n=" + std::to_string(row.n)]
         [to_string(row.estimator)] = r;
  }
  return {{"config", to_json(report.config)}, {"results", sweep}};
}

void write_csv(std::ostream& out, const BenchReport& report) {
  const auto old_precision = out.precision(17);
  const std::string provenance = to_json(report.config).dump();
  out << "# config: " << provenance << '\n';
  out << "estimator,family,n,d,rho,hyper_name,hyper,oracle,rmse,bias,variance,"
         "mean_runtime_s,median_runtime_s,trials,failed_trials,seed\n";
  for (const auto& row : report.rows) {
    out << to_string(row.estimator) << ',' << to_string(row.family) << ',' << row.n << ','
        << row.d << ',' << row.rho << ',' << row.hyper_name << ',' << row.hyper << ','
        << row.oracle << ',' << row.rmse << ',' << row.bias << ',' << row.variance << ','
        << row.mean_runtime << ',' << row.median_runtime << ',' << row.trials << ','
        << row.failed_trials << ',' << report.config.seed << '\n';
  }
  out.precision(old_precision);
}

TcReport tc_report(const Dataset& input, const TcOptions& options) {
  if (input.rows() < 2 || input.cols() < 2) throw_invalid("total correlation needs n >= 2 and d >= 2");
  const auto start = Clock::now();
  TcReport report;
  report.n = input.rows();
  report.d = input.cols();
  report.whitened = options.whiten;
  const Dataset data = options.whiten ? whiten(input) : input;

  if (options.cross_validate) {
    CvOptions cv;
    cv.folds = options.folds;
    cv.seed = options.seed;
    const auto candidates = default_ell_candidates(data.rows(), data.cols());
    report.cv = cv_select_ell(data, candidates, cv);
    report.ell = report.cv->ell_star;
    report.policy = "cv";
  } else {
    report.ell = options.ell;
    report.policy = "fixed";
  }

  PssConfig cfg;
  cfg.ell = report.ell;
  double marginal_sum = 0.0;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    const double h = entropy(Dataset::from_column(data.column(j)), cfg).value;
    report.marginal_entropies.push_back(h);
    marginal_sum += h;
  }
  const EntropyEstimate joint = entropy(data, cfg);
  report.joint_entropy = joint.value;
  report.joint_skipped_rows = joint.skipped_rows;
  report.tc = marginal_sum - joint.value;
  report.nonnegative = report.tc >= 0.0;
  report.seconds = seconds_since(start);

  if (options.knn_baselines) {
    KnnConfig kc;
    kc.k = options.k;
    kc.ksg_width = KsgWidth::kRectangleSide;
    double kl_marginals = 0.0;
    double ksg_marginals = 0.0;
    for (std::size_t j = 0; j < data.cols(); ++j) {
      const Dataset col = Dataset::from_column(data.column(j));
      kl_marginals += kl_entropy(col, kc);
      ksg_marginals += ksg_entropy(col, kc);
    }
    report.tc_kl = kl_marginals - kl_entropy(data, kc);
    report.tc_ksg = ksg_marginals - ksg_entropy(data, kc);
  }
  return report;
}

nlohmann::json to_json(const TcReport& report) {
  nlohmann::json j;
  j["n"] = report.n;
  j["d"] = report.d;
  j["whitened"] = report.whitened;
  j["policy"] = report.policy;
  j["ell"] = report.ell;
  if (report.cv) {
    nlohmann::json losses = nlohmann::json::object();
    for (const auto& [ell, loss] : report.cv->losses) losses[std::to_string(ell)] = loss;
    j["cv_losses"] = losses;
  }
  j["marginal_entropies"] = report.marginal_entropies;
  j["joint_entropy"] = report.joint_entropy;
  j["joint_skipped_rows"] = report.joint_skipped_rows;
  j["tc"] = report.tc;
  j["nonnegative"] = report.nonnegative;
  j["seconds"] = report.seconds;
  if (report.tc_kl) j["tc_kl"] = *report.tc_kl;
  if (report.tc_ksg) j["tc_ksg"] = *report.tc_ksg;
  return j;
}

}  // namespace pss
