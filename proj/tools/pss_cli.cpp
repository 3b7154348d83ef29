// Command-line front end: entropy, mi, tc, cv, select, bench and density.
//
// Exit codes: 0 success, 2 input/parse error, 3 degenerate data, 4 config error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pss/bench.hpp"
#include "pss/error.hpp"
#include "pss/estimator.hpp"
#include "pss/model_selection.hpp"
#include "pss/table.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitConfig = 4;

int exit_code(pss::ErrorKind kind) {
  switch (kind) {
    case pss::ErrorKind::kInvalidInput:
    case pss::ErrorKind::kParse:
      return kExitInput;
    case pss::ErrorKind::kDegenerate:
      return kExitDegenerate;
    case pss::ErrorKind::kConfig:
      return kExitConfig;
  }
  return 1;
}

std::size_t parse_index(const std::string& text) {
  std::size_t pos = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) pss::throw_config("bad column index '" + text + "'");
  return value;
}

// "a..b" (inclusive), "a,b,c" or a single index; zero-based.
std::vector<std::size_t> parse_columns(const std::string& spec) {
  std::vector<std::size_t> cols;
  if (const auto dots = spec.find(".."); dots != std::string::npos) {
    const std::size_t lo = parse_index(spec.substr(0, dots));
    const std::size_t hi = parse_index(spec.substr(dots + 2));
    if (hi < lo) pss::throw_config("empty column range '" + spec + "'");
    for (std::size_t c = lo; c <= hi; ++c) cols.push_back(c);
    return cols;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) cols.push_back(parse_index(item));
  if (cols.empty()) pss::throw_config("empty column list");
  return cols;
}

void check_columns(const std::vector<std::size_t>& cols, std::size_t available) {
  for (auto c : cols) {
    if (c >= available) {
      pss::throw_config("column " + std::to_string(c) + " out of range; table has " +
                        std::to_string(available) + " columns");
    }
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T value{};
    if (!(is >> value) || !is.eof()) pss::throw_config("bad list entry '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) pss::throw_config("empty list '" + text + "'");
  return out;
}

struct InputOptions {
  std::string path;
  bool header = false;
};

void add_input(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.path, "Comma-delimited numeric table")->required();
  cmd->add_flag("--header", in.header, "First row holds column names");
}

pss::Dataset read_input(const InputOptions& in) {
  return pss::load_table(in.path, in.header).to_dataset();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioned sample-spacing entropy, mutual information and total correlation"};
  app.require_subcommand(1);
  std::cout.precision(17);

  // entropy
  InputOptions entropy_in;
  std::size_t entropy_ell = 1;
  bool entropy_contributing = false;
  auto* entropy_cmd = app.add_subcommand("entropy", "Joint entropy of all columns (nats)");
  add_input(entropy_cmd, entropy_in);
  entropy_cmd->add_option("--ell", entropy_ell, "Partitions per axis")->required();
  entropy_cmd->add_flag("--contributing-divisor", entropy_contributing,
                        "Average over rows with a defined density instead of all rows");

  // mi
  InputOptions mi_in;
  std::string mi_x;
  std::string mi_y;
  std::size_t mi_ell = 1;
  auto* mi_cmd = app.add_subcommand("mi", "Mutual information between two column groups (nats)");
  add_input(mi_cmd, mi_in);
  mi_cmd->add_option("--x-cols", mi_x, "Columns of X: a..b, a,b,c or a (zero-based)")->required();
  mi_cmd->add_option("--y-cols", mi_y, "Columns of Y")->required();
  mi_cmd->add_option("--ell", mi_ell, "Partitions per axis")->required();

  // tc
  InputOptions tc_in;
  pss::TcOptions tc_opts;
  std::size_t tc_ell = 0;
  auto* tc_cmd = app.add_subcommand("tc", "Total correlation report (JSON)");
  add_input(tc_cmd, tc_in);
  tc_cmd->add_flag("--whiten", tc_opts.whiten, "Whiten the table before estimating");
  auto* tc_ell_opt = tc_cmd->add_option("--ell", tc_ell, "Fixed partitions per axis");
  auto* tc_cv_opt = tc_cmd->add_flag("--cv", tc_opts.cross_validate, "Select ell by cross-validation");
  tc_ell_opt->excludes(tc_cv_opt);
  tc_cmd->add_option("--folds", tc_opts.folds, "Cross-validation folds");
  tc_cmd->add_option("--seed", tc_opts.seed, "Fold-assignment seed");
  tc_cmd->add_flag("--knn", tc_opts.knn_baselines, "Also report KL and KSG total correlation");
  tc_cmd->add_option("--k", tc_opts.k, "Neighbour order for --knn");

  // cv
  InputOptions cv_in;
  std::size_t cv_min = 1;
  std::size_t cv_max = 12;
  pss::CvOptions cv_opts;
  auto* cv_cmd = app.add_subcommand("cv", "Held-out likelihood loss per ell and the selected ell");
  add_input(cv_cmd, cv_in);
  cv_cmd->add_option("--ell-min", cv_min, "Smallest candidate ell");
  cv_cmd->add_option("--ell-max", cv_max, "Largest candidate ell");
  cv_cmd->add_option("--folds", cv_opts.folds, "Number of folds");
  cv_cmd->add_option("--seed", cv_opts.seed, "Fold-assignment seed");
  cv_cmd->add_option("--max-undefined", cv_opts.max_undefined_fraction,
                     "Largest tolerated fraction of undefined held-out points");

  // select
  InputOptions sel_in;
  std::size_t sel_label = 0;
  std::size_t sel_steps = 1;
  std::size_t sel_ell = 1;
  auto* sel_cmd = app.add_subcommand("select", "Greedy forward feature selection against a label column");
  add_input(sel_cmd, sel_in);
  sel_cmd->add_option("--label-col", sel_label, "Zero-based label column")->required();
  sel_cmd->add_option("--steps", sel_steps, "Features to select")->required();
  sel_cmd->add_option("--ell", sel_ell, "Partitions per axis")->required();

  // bench
  pss::BenchConfig bench;
  std::string bench_family = "normal";
  std::string bench_dims;
  std::string bench_ns;
  std::string bench_rhos = "0";
  std::string bench_estimators = "pss";
  std::string bench_policy = "oracle";
  std::string bench_ell_grid;
  std::string bench_k_grid;
  std::string bench_format = "csv";
  std::string bench_out;
  std::string bench_search = "kdtree";
  auto* bench_cmd = app.add_subcommand("bench", "RMSE/runtime sweep against closed-form entropies");
  bench_cmd->add_option("--family", bench_family, "normal or gamma");
  bench_cmd->add_option("--dims", bench_dims, "Comma-separated dimensions")->required();
  bench_cmd->add_option("--ns", bench_ns, "Comma-separated sample sizes")->required();
  bench_cmd->add_option("--rhos", bench_rhos, "Comma-separated equicorrelations");
  bench_cmd->add_option("--shape", bench.shape, "Gamma shape");
  bench_cmd->add_option("--scale", bench.scale, "Gamma scale");
  bench_cmd->add_option("--estimators", bench_estimators, "Subset of pss,kl,ksg");
  bench_cmd->add_option("--policy", bench_policy, "oracle, fixed or cv");
  bench_cmd->add_option("--ell-grid", bench_ell_grid, "Oracle grid for ell");
  bench_cmd->add_option("--k-grid", bench_k_grid, "Oracle grid for k");
  bench_cmd->add_option("--ell", bench.fixed_ell, "ell for the fixed policy");
  bench_cmd->add_option("--k", bench.fixed_k, "k for the fixed policy");
  bench_cmd->add_option("--folds", bench.cv_folds, "Folds for the cv policy");
  bench_cmd->add_option("--search", bench_search, "kdtree or brute");
  bench_cmd->add_option("--trials", bench.trials, "Seeded trials per sweep point");
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--workers", bench.workers, "Threads running trials");
  bench_cmd->add_option("--format", bench_format, "csv or json");
  bench_cmd->add_option("--out", bench_out, "Output path (default stdout)");

  // density
  InputOptions dens_in;
  std::size_t dens_ell = 1;
  std::string dens_points;
  bool dens_points_header = false;
  auto* dens_cmd = app.add_subcommand("density", "Log-density of query points under a fitted model");
  add_input(dens_cmd, dens_in);
  dens_cmd->add_option("--ell", dens_ell, "Partitions per axis")->required();
  dens_cmd->add_option("--points", dens_points, "Query points table")->required();
  dens_cmd->add_flag("--points-header", dens_points_header, "Query table has a header row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*entropy_cmd) {
      pss::PssConfig cfg;
      cfg.ell = entropy_ell;
      if (entropy_contributing) cfg.divisor = pss::EntropyDivisor::kContributingRows;
      const auto est = pss::entropy(read_input(entropy_in), cfg);
      std::cout << "entropy " << est.value << "\nskipped_rows " << est.skipped_rows << '\n';
    } else if (*mi_cmd) {
      const pss::Dataset data = read_input(mi_in);
      const auto xs = parse_columns(mi_x);
      const auto ys = parse_columns(mi_y);
      check_columns(xs, data.cols());
      check_columns(ys, data.cols());
      pss::PssConfig cfg;
      cfg.ell = mi_ell;
      std::cout << "mi " << pss::mutual_information(data.select_columns(xs), data.select_columns(ys), cfg)
                << '\n';
    } else if (*tc_cmd) {
      if (!tc_opts.cross_validate && tc_ell == 0) pss::throw_config("tc needs --ell <L> or --cv");
      tc_opts.ell = tc_ell;
      const auto report = pss::tc_report(read_input(tc_in), tc_opts);
      std::cout << pss::to_json(report).dump(2) << '\n';
    } else if (*cv_cmd) {
      if (cv_min < 1 || cv_max < cv_min) pss::throw_config("need 1 <= --ell-min <= --ell-max");
      std::vector<std::size_t> candidates;
      for (std::size_t ell = cv_min; ell <= cv_max; ++ell) candidates.push_back(ell);
      const auto result = pss::cv_select_ell(read_input(cv_in), candidates, cv_opts);
      std::cout << "ell,loss,undefined,validation_points,feasible\n";
      for (const auto& c : result.candidates) {
        std::cout << c.ell << ',' << c.loss << ',' << c.undefined_total() << ','
                  << c.validation_points << ',' << (c.feasible ? "true" : "false") << '\n';
      }
      std::cout << "ell_star " << result.ell_star << '\n';
    } else if (*sel_cmd) {
      const pss::Dataset data = read_input(sel_in);
      check_columns({sel_label}, data.cols());
      std::vector<std::size_t> feature_cols;
      for (std::size_t j = 0; j < data.cols(); ++j) {
        if (j != sel_label) feature_cols.push_back(j);
      }
      const auto labels = pss::DiscreteLabels::from_column(data.column(sel_label));
      const auto trace =
          pss::greedy_forward_select(data.select_columns(feature_cols), labels, sel_ell, sel_steps);
      std::cout << "step,column,mi\n";
      for (std::size_t s = 0; s < trace.features.size(); ++s) {
        std::cout << s + 1 << ',' << feature_cols[trace.features[s]] << ',' << trace.mi[s] << '\n';
      }
    } else if (*bench_cmd) {
      bench.family = pss::parse_family(bench_family);
      bench.dims = parse_list<std::size_t>(bench_dims);
      bench.ns = parse_list<std::size_t>(bench_ns);
      bench.rhos = parse_list<double>(bench_rhos);
      bench.estimators.clear();
      std::stringstream ss(bench_estimators);
      for (std::string name; std::getline(ss, name, ',');) bench.estimators.push_back(pss::parse_estimator(name));
      if (bench_policy == "oracle") {
        bench.policy = pss::TuningPolicy::kOracle;
      } else if (bench_policy == "fixed") {
        bench.policy = pss::TuningPolicy::kFixed;
      } else if (bench_policy == "cv") {
        bench.policy = pss::TuningPolicy::kCrossValidated;
      } else {
        pss::throw_config("unknown policy '" + bench_policy + "'");
      }
      if (!bench_ell_grid.empty()) bench.ell_grid = parse_list<std::size_t>(bench_ell_grid);
      if (!bench_k_grid.empty()) bench.k_grid = parse_list<std::size_t>(bench_k_grid);
      if (bench_search == "kdtree") {
        bench.search = pss::NeighborSearch::kKdTree;
      } else if (bench_search == "brute") {
        bench.search = pss::NeighborSearch::kBruteForce;
      } else {
        pss::throw_config("unknown search '" + bench_search + "'");
      }
      if (bench_format != "csv" && bench_format != "json") pss::throw_config("format must be csv or json");

      const auto report = pss::run_benchmark(bench);
      std::ofstream file;
      if (!bench_out.empty()) {
        file.open(bench_out);
        if (!file) pss::throw_config("cannot write " + bench_out);
      }
      std::ostream& out = bench_out.empty() ? std::cout : file;
      if (bench_format == "csv") {
        pss::write_csv(out, report);
      } else {
        out << pss::to_json(report).dump(2) << '\n';
      }
    } else if (*dens_cmd) {
      const pss::Dataset data = read_input(dens_in);
      const pss::Dataset points = pss::load_table(dens_points, dens_points_header).to_dataset();
      if (points.cols() != data.cols()) {
        pss::throw_invalid("query points have " + std::to_string(points.cols()) +
                           " columns, training table has " + std::to_string(data.cols()));
      }
      pss::PssConfig cfg;
      cfg.ell = dens_ell;
      const auto model = pss::PssModel::fit(data, cfg);
      for (std::size_t r = 0; r < points.rows(); ++r) {
        const auto ld = model.log_density(points.row(r));
        switch (ld.status()) {
          case pss::LogDensity::Status::kDefined: std::cout << ld.value() << '\n'; break;
          case pss::LogDensity::Status::kUndefined: std::cout << "undefined\n"; break;
          case pss::LogDensity::Status::kOutOfRange: std::cout << "out-of-range\n"; break;
        }
      }
    }
  } catch (const pss::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}
