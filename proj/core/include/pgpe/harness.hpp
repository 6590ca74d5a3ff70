#pragma once

// Seeded multi-run experiments, aggregation onto a shared evaluation axis,
// and step-size grid search.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgpe/baseline.hpp"
#include "pgpe/objectives.hpp"
#include "pgpe/update_rules.hpp"

namespace pgpe {

struct RunConfig {
  std::string label;
  ObjectiveKind objective = ObjectiveKind::sphere;
  std::size_t dim = 2;
  MetaParams meta{};
  BaselineConfig baseline{};
  double mu0_range = 1.0;  ///< initial mu ~ U(-mu0_range, mu0_range)^d
  double sigma0 = 1.0;
  std::uint64_t max_evaluations = 10000;
  double target_reward = -1.0;
  std::uint64_t base_seed = 1;
  std::size_t run_count = 1;
  std::size_t grid_points = 100;  ///< resolution of the aggregate curves

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;

  /// Default initial distribution for an objective: U(-1, 1), sigma 1 for
  /// sphere; U(-3.2, 3.2), sigma 2 for Rastrigin.
  [[nodiscard]] static RunConfig defaults_for(ObjectiveKind objective, std::size_t dim);

  bool operator==(const RunConfig&) const = default;
};

struct Checkpoint {
  std::uint64_t evaluations;
  double best_reward;
  double update_reward_mean;
  double mean_sigma;
};

struct ConvergenceRecord {
  std::size_t run_id = 0;
  std::vector<Checkpoint> trace;  ///< one entry per update
  std::optional<std::uint64_t> evaluations_to_target;
  std::uint64_t evaluations = 0;
  double final_best_reward = 0.0;
  /// Per-branch step counts (single, sys, supsys); only SupIf fills them.
  std::array<std::uint64_t, 3> branch_counts{};
};

/// Executes one seeded run. The random stream is seeded with
/// derive_stream_seed(base_seed, run_index). A step is only started when its
/// worst-case evaluation cost fits in what is left of max_evaluations.
/// With keep_trace = false only the summary fields are filled.
[[nodiscard]] ConvergenceRecord run_single(const RunConfig& config, std::size_t run_index,
                                           bool keep_trace = true);

struct AggregateStats {
  std::vector<std::uint64_t> evaluation_grid;
  std::vector<double> mean_best;
  std::vector<double> std_best;  ///< population standard deviation
  std::vector<double> success_rate;

  std::vector<std::uint64_t> update_grid;
  std::vector<double> update_mean_best;
  std::vector<double> update_std_best;

  std::size_t run_count = 0;
  double final_success_rate = 0.0;
  /// Unset when fewer than half of the runs reached the target.
  std::optional<double> median_evals_to_target;
  double mean_final_best = 0.0;
};

/// Aggregates records onto a common evaluation grid with step-function
/// (last checkpoint at or before the grid point) interpolation. Grid points are
/// multiples of max(4, ceil(max_evaluations / grid_points)). The result does not
/// depend on the order of `records`.
[[nodiscard]] AggregateStats aggregate(std::span<const ConvergenceRecord> records,
                                       std::uint64_t max_evaluations, std::size_t grid_points);

/// Median evaluations-to-target, counting unreached runs as infinitely late.
[[nodiscard]] std::optional<double> median_evals_to_target(
    std::span<const ConvergenceRecord> records);

struct BatchResult {
  std::vector<ConvergenceRecord> records;  ///< indexed by run id
  AggregateStats stats;
};

/// `threads` = 0 selects std::thread::hardware_concurrency().
[[nodiscard]] BatchResult run_batch(const RunConfig& config, std::size_t threads = 0);

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Grid search

enum class SelectionMetric { median_evals_to_target, mean_final_reward };

[[nodiscard]] std::string_view to_string(SelectionMetric metric) noexcept;
[[nodiscard]] SelectionMetric parse_selection_metric(std::string_view name);

struct GridSpec {
  std::vector<double> alpha_mu;
  std::vector<double> alpha_sigma;
  SelectionMetric metric = SelectionMetric::median_evals_to_target;
  std::size_t runs_per_cell = 20;

  /// Non-empty, positive, strictly increasing candidate lists; runs_per_cell >= 1.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// lo * 10^(k / per_decade) for k = 0, 1, ... while the value stays <= hi
/// (with a relative slack of 1e-9 so that hi itself is included).
[[nodiscard]] std::vector<double> geometric_grid(double lo, double hi, int per_decade);

struct CellScore {
  double alpha_mu = 0.0;
  double alpha_sigma = 0.0;
  std::optional<double> median_evals_to_target;
  double success_rate = 0.0;
  double mean_final_reward = 0.0;
};

struct GridResult {
  double best_alpha_mu = 0.0;
  double best_alpha_sigma = 0.0;
  SelectionMetric metric_used = SelectionMetric::median_evals_to_target;
  bool fell_back = false;  ///< no cell reached the target; ranked by final reward instead
  std::vector<CellScore> table;  ///< alpha_mu-major order
};

using CellEvaluator = std::function<CellScore(double alpha_mu, double alpha_sigma)>;

/// Scores every cell and picks the best. Lower median evaluations or higher
/// mean final reward wins; ties go to the lexicographically smaller
/// (alpha_mu, alpha_sigma). The evaluator is called from `threads` workers.
[[nodiscard]] GridResult grid_search(const GridSpec& grid, const CellEvaluator& evaluate,
                                     std::size_t threads = 1);

/// Grid search where each cell is a run_batch of `grid.runs_per_cell` runs of
/// `base` with the cell's step sizes.
[[nodiscard]] GridResult grid_search(const GridSpec& grid, const RunConfig& base,
                                     std::size_t threads = 0);

/// Picks the best cell of an already scored table (same rules as grid_search).
[[nodiscard]] GridResult select_best(std::vector<CellScore> table, SelectionMetric metric);

struct ScalingRow {
  std::size_t dim;
  double alpha_mu;
  double alpha_sigma;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  std::optional<double> slope_alpha_mu;     ///< least-squares slope of log alpha vs log dim
  std::optional<double> slope_alpha_sigma;
};

/// Runs `search(dim)` for every dimension and fits log(alpha) against log(dim).
/// Slopes are unset when fewer than two distinct dimensions are given.
[[nodiscard]] ScalingTable scaling_study(std::span<const std::size_t> dims,
                                         const std::function<GridResult(std::size_t)>& search);

/// Least-squares slope of y against x; unset when x has no spread.
[[nodiscard]] std::optional<double> least_squares_slope(std::span<const double> x,
                                                        std::span<const double> y);

// ---------------------------------------------------------------------------
// CSV output

/// `evaluations,mean_best_reward,std_best_reward,success_rate`
void write_aggregate_csv(std::ostream& out, const AggregateStats& stats);
/// `updates,mean_best_reward,std_best_reward`
void write_update_aggregate_csv(std::ostream& out, const AggregateStats& stats);
/// `run_id,evaluations,best_reward,update_reward,mean_sigma`
void write_runs_csv(std::ostream& out, std::span<const ConvergenceRecord> records);
/// `alpha_mu,alpha_sigma,median_evals_to_target,success_rate,mean_final_reward`
void write_grid_csv(std::ostream& out, const GridResult& result);

}  // namespace pgpe
