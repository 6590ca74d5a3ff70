#include "pgpe/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "pgpe/csv.hpp"

namespace pgpe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (const double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Population mean and standard deviation, two-pass.
std::pair<double, double> mean_std(std::span<const double> xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(xs.size()))};
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

double best_at(const ConvergenceRecord& rec, std::uint64_t evaluations) {
  const auto it = std::upper_bound(
      rec.trace.begin(), rec.trace.end(), evaluations,
      [](std::uint64_t e, const Checkpoint& c) { return e < c.evaluations; });
  if (it == rec.trace.begin()) return -kInf;
  return std::prev(it)->best_reward;
}

std::vector<const ConvergenceRecord*> sorted_by_run_id(std::span<const ConvergenceRecord> records) {
  std::vector<const ConvergenceRecord*> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto* a, const auto* b) { return a->run_id < b->run_id; });
  return out;
}

// NaN ranks as the worst possible final reward.
double rankable(double x) { return std::isnan(x) ? -kInf : x; }

}  // namespace

void RunConfig::validate() const {
  meta.validate();
  baseline.validate();
  if (dim == 0) throw std::invalid_argument("dim must be at least 1");
  if (!(mu0_range >= 0.0) || !std::isfinite(mu0_range)) {
    throw std::invalid_argument("mu0_range must be finite and non-negative");
  }
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw std::invalid_argument("sigma0 must be finite and positive");
  }
  if (max_evaluations < 4) throw std::invalid_argument("max_evaluations must be at least 4");
  if (run_count == 0) throw std::invalid_argument("run_count must be at least 1");
  if (grid_points == 0) throw std::invalid_argument("grid_points must be at least 1");
  if (std::isnan(target_reward)) throw std::invalid_argument("target_reward must be a number");
}

RunConfig RunConfig::defaults_for(ObjectiveKind objective, std::size_t dim) {
  RunConfig c;
  c.objective = objective;
  c.dim = dim;
  if (objective == ObjectiveKind::rastrigin) {
    c.mu0_range = 3.2;
    c.sigma0 = 2.0;
  } else {
    c.mu0_range = 1.0;
    c.sigma0 = 1.0;
  }
  return c;
}

ConvergenceRecord run_single(const RunConfig& config, std::size_t run_index, bool keep_trace) {
  config.validate();
  Rng rng(derive_stream_seed(config.base_seed, run_index));

  Vector mu0(config.dim);
  for (auto& m : mu0) m = rng.uniform(-config.mu0_range, config.mu0_range);
  Hypothesis hyp = Hypothesis::isotropic(std::move(mu0), config.sigma0);

  Objective objective(config.objective, config.dim);
  BaselineState baseline(config.baseline);

  ConvergenceRecord rec;
  rec.run_id = run_index;
  double best = -kInf;
  const RewardFn reward = [&](std::span<const double> theta) {
    const double r = objective.reward(theta);
    if (r > best) best = r;
    if (!rec.evaluations_to_target && best >= config.target_reward) {
      rec.evaluations_to_target = objective.evaluations();
    }
    return r;
  };

  const auto step_cost = static_cast<std::uint64_t>(max_evaluations_per_step(config.meta.variant));
  if (keep_trace) rec.trace.reserve(config.max_evaluations / 2 + 1);
  std::uint64_t used = 0;
  while (objective.evaluations() + step_cost <= config.max_evaluations) {
    const UpdateReport rep = variant_step(hyp, rng, reward, baseline, config.meta);
    hyp = apply_update(hyp, rep, config.meta);
    used += static_cast<std::uint64_t>(rep.evaluations_used);
    if (rep.branch) ++rec.branch_counts[static_cast<std::size_t>(*rep.branch)];
    if (keep_trace) {
      rec.trace.push_back({objective.evaluations(), best, mean_of(rep.rewards_seen),
                           mean_of(hyp.sigma)});
    }
  }
  if (used != objective.evaluations()) {
    throw std::logic_error("evaluation accounting drifted from the objective counter");
  }
  rec.evaluations = objective.evaluations();
  rec.final_best_reward = best;
  return rec;
}

std::optional<double> median_evals_to_target(std::span<const ConvergenceRecord> records) {
  if (records.empty()) return std::nullopt;
  std::vector<double> hits;
  hits.reserve(records.size());
  for (const auto& r : records) {
    hits.push_back(r.evaluations_to_target ? static_cast<double>(*r.evaluations_to_target) : kInf);
  }
  std::sort(hits.begin(), hits.end());
  const std::size_t n = hits.size();
  const double med = n % 2 == 1 ? hits[n / 2] : 0.5 * (hits[n / 2 - 1] + hits[n / 2]);
  if (!std::isfinite(med)) return std::nullopt;
  return med;
}

AggregateStats aggregate(std::span<const ConvergenceRecord> records,
                         std::uint64_t max_evaluations, std::size_t grid_points) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  if (grid_points == 0) throw std::invalid_argument("aggregate: grid_points must be positive");
  const auto runs = sorted_by_run_id(records);
  const std::size_t n = runs.size();

  AggregateStats st;
  st.run_count = n;

  const std::uint64_t spacing = std::max<std::uint64_t>(4, ceil_div(max_evaluations, grid_points));
  std::vector<double> column(n);
  for (std::uint64_t g = spacing; g <= max_evaluations; g += spacing) {
    std::size_t hit = 0;
    for (std::size_t k = 0; k < n; ++k) {
      column[k] = best_at(*runs[k], g);
      if (runs[k]->evaluations_to_target && *runs[k]->evaluations_to_target <= g) ++hit;
    }
    const auto [m, s] = mean_std(column);
    st.evaluation_grid.push_back(g);
    st.mean_best.push_back(m);
    st.std_best.push_back(s);
    st.success_rate.push_back(static_cast<double>(hit) / static_cast<double>(n));
  }

  std::size_t max_updates = 0;
  for (const auto* r : runs) max_updates = std::max(max_updates, r->trace.size());
  if (max_updates > 0) {
    const std::uint64_t u_spacing = std::max<std::uint64_t>(1, ceil_div(max_updates, grid_points));
    for (std::uint64_t u = u_spacing; u <= max_updates; u += u_spacing) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto& tr = runs[k]->trace;
        column[k] = tr.empty() ? -kInf : tr[std::min<std::size_t>(u, tr.size()) - 1].best_reward;
      }
      const auto [m, s] = mean_std(column);
      st.update_grid.push_back(u);
      st.update_mean_best.push_back(m);
      st.update_std_best.push_back(s);
    }
  }

  std::size_t hit = 0;
  for (std::size_t k = 0; k < n; ++k) {
    column[k] = runs[k]->final_best_reward;
    if (runs[k]->evaluations_to_target) ++hit;
  }
  st.mean_final_best = mean_of(column);
  st.final_success_rate = static_cast<double>(hit) / static_cast<double>(n);
  st.median_evals_to_target = median_evals_to_target(records);
  return st;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

BatchResult run_batch(const RunConfig& config, std::size_t threads) {
  config.validate();
  BatchResult out;
  out.records.resize(config.run_count);
  parallel_for(config.run_count, threads,
               [&](std::size_t i) { out.records[i] = run_single(config, i); });
  out.stats = aggregate(out.records, config.max_evaluations, config.grid_points);
  return out;
}

std::string_view to_string(SelectionMetric metric) noexcept {
  return metric == SelectionMetric::median_evals_to_target ? "median_evals_to_target"
                                                           : "mean_final_reward";
}

SelectionMetric parse_selection_metric(std::string_view name) {
  if (name == "median_evals_to_target") return SelectionMetric::median_evals_to_target;
  if (name == "mean_final_reward") return SelectionMetric::mean_final_reward;
  throw std::invalid_argument("unknown selection metric '" + std::string(name) + "'");
}

void GridSpec::validate() const {
  const auto check = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw std::invalid_argument(std::string(name) + " candidates are empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
        throw std::invalid_argument(std::string(name) + " candidates must be positive");
      }
      if (i > 0 && !(v[i] > v[i - 1])) {
        throw std::invalid_argument(std::string(name) + " candidates must be strictly increasing");
      }
    }
  };
  check(alpha_mu, "alpha_mu");
  check(alpha_sigma, "alpha_sigma");
  if (runs_per_cell == 0) throw std::invalid_argument("runs_per_cell must be at least 1");
}

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1) {
    throw std::invalid_argument("geometric_grid needs 0 < lo <= hi and per_decade >= 1");
  }
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = lo * std::pow(10.0, static_cast<double>(k) / per_decade);
    if (v > hi * (1.0 + 1e-9)) break;
    out.push_back(v);
  }
  return out;
}

GridResult select_best(std::vector<CellScore> table, SelectionMetric metric) {
  if (table.empty()) throw std::invalid_argument("select_best: empty score table");
  std::stable_sort(table.begin(), table.end(), [](const CellScore& a, const CellScore& b) {
    return a.alpha_mu != b.alpha_mu ? a.alpha_mu < b.alpha_mu : a.alpha_sigma < b.alpha_sigma;
  });

  GridResult res;
  res.metric_used = metric;
  if (metric == SelectionMetric::median_evals_to_target &&
      std::none_of(table.begin(), table.end(),
                   [](const CellScore& c) { return c.median_evals_to_target.has_value(); })) {
    res.metric_used = SelectionMetric::mean_final_reward;
    res.fell_back = true;
  }

  const auto better = [&](const CellScore& a, const CellScore& b) {
    if (res.metric_used == SelectionMetric::median_evals_to_target) {
      const double ma = a.median_evals_to_target.value_or(kInf);
      const double mb = b.median_evals_to_target.value_or(kInf);
      return ma < mb;
    }
    return rankable(a.mean_final_reward) > rankable(b.mean_final_reward);
  };

  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (better(table[i], table[best])) best = i;
  }
  res.best_alpha_mu = table[best].alpha_mu;
  res.best_alpha_sigma = table[best].alpha_sigma;
  res.table = std::move(table);
  return res;
}

GridResult grid_search(const GridSpec& grid, const CellEvaluator& evaluate, std::size_t threads) {
  grid.validate();
  std::vector<CellScore> table(grid.alpha_mu.size() * grid.alpha_sigma.size());
  parallel_for(table.size(), threads, [&](std::size_t idx) {
    const double am = grid.alpha_mu[idx / grid.alpha_sigma.size()];
    const double as = grid.alpha_sigma[idx % grid.alpha_sigma.size()];
    table[idx] = evaluate(am, as);
    table[idx].alpha_mu = am;
    table[idx].alpha_sigma = as;
  });
  return select_best(std::move(table), grid.metric);
}

GridResult grid_search(const GridSpec& grid, const RunConfig& base, std::size_t threads) {
  const auto evaluate = [&](double am, double as) {
    RunConfig cfg = base;
    cfg.meta.alpha_mu = am;
    cfg.meta.alpha_sigma = as;
    cfg.run_count = grid.runs_per_cell;
    std::vector<ConvergenceRecord> records(cfg.run_count);
    for (std::size_t i = 0; i < cfg.run_count; ++i) records[i] = run_single(cfg, i, false);

    CellScore score;
    score.median_evals_to_target = median_evals_to_target(records);
    double hit = 0.0;
    double final_sum = 0.0;
    for (const auto& r : records) {
      if (r.evaluations_to_target) hit += 1.0;
      final_sum += r.final_best_reward;
    }
    score.success_rate = hit / static_cast<double>(records.size());
    score.mean_final_reward = final_sum / static_cast<double>(records.size());
    return score;
  };
  return grid_search(grid, evaluate, threads);
}

std::optional<double> least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ScalingTable scaling_study(std::span<const std::size_t> dims,
                           const std::function<GridResult(std::size_t)>& search) {
  ScalingTable table;
  std::vector<double> log_dim;
  std::vector<double> log_mu;
  std::vector<double> log_sigma;
  for (const std::size_t d : dims) {
    const GridResult r = search(d);
    table.rows.push_back({d, r.best_alpha_mu, r.best_alpha_sigma});
    log_dim.push_back(std::log(static_cast<double>(d)));
    log_mu.push_back(std::log(r.best_alpha_mu));
    log_sigma.push_back(std::log(r.best_alpha_sigma));
  }
  table.slope_alpha_mu = least_squares_slope(log_dim, log_mu);
  table.slope_alpha_sigma = least_squares_slope(log_dim, log_sigma);
  return table;
}

void write_aggregate_csv(std::ostream& out, const AggregateStats& stats) {
  out << "evaluations,mean_best_reward,std_best_reward,success_rate\n";
  for (std::size_t i = 0; i < stats.evaluation_grid.size(); ++i) {
    out << stats.evaluation_grid[i] << ',' << csv::num(stats.mean_best[i]) << ','
        << csv::num(stats.std_best[i]) << ',' << csv::num(stats.success_rate[i]) << '\n';
  }
}

void write_update_aggregate_csv(std::ostream& out, const AggregateStats& stats) {
  out << "updates,mean_best_reward,std_best_reward\n";
  for (std::size_t i = 0; i < stats.update_grid.size(); ++i) {
    out << stats.update_grid[i] << ',' << csv::num(stats.update_mean_best[i]) << ','
        << csv::num(stats.update_std_best[i]) << '\n';
  }
}

void write_runs_csv(std::ostream& out, std::span<const ConvergenceRecord> records) {
  out << "run_id,evaluations,best_reward,update_reward,mean_sigma\n";
  for (const auto* rec : sorted_by_run_id(records)) {
    for (const auto& c : rec->trace) {
      out << rec->run_id << ',' << c.evaluations << ',' << csv::num(c.best_reward) << ','
          << csv::num(c.update_reward_mean) << ',' << csv::num(c.mean_sigma) << '\n';
    }
  }
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
  out << "alpha_mu,alpha_sigma,median_evals_to_target,success_rate,mean_final_reward\n";
  for (const auto& c : result.table) {
    out << csv::num(c.alpha_mu) << ',' << csv::num(c.alpha_sigma) << ','
        << (c.median_evals_to_target ? csv::num(*c.median_evals_to_target) : std::string{}) << ','
        << csv::num(c.success_rate) << ',' << csv::num(c.mean_final_reward) << '\n';
  }
}

}  // namespace pgpe
