#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "pgpe/csv.hpp"
#include "pgpe/harness.hpp"

using namespace pgpe;

namespace {

RunConfig sphere_config(Variant v, std::uint64_t budget) {
  RunConfig c = RunConfig::defaults_for(ObjectiveKind::sphere, 2);
  c.meta.variant = v;
  c.meta.alpha_mu = 0.1;
  c.meta.alpha_sigma = 0.01;
  c.max_evaluations = budget;
  c.target_reward = -1e-2;
  return c;
}

// A run whose best reward stays at `value`, checkpointed every `step` evaluations.
ConvergenceRecord flat_record(std::size_t id, double value, std::uint64_t budget,
                              std::uint64_t step = 2) {
  ConvergenceRecord r;
  r.run_id = id;
  for (std::uint64_t e = step; e <= budget; e += step) r.trace.push_back({e, value, value, 1.0});
  r.evaluations = r.trace.back().evaluations;
  r.final_best_reward = value;
  return r;
}

std::string aggregate_text(const AggregateStats& st) {
  std::ostringstream out;
  write_aggregate_csv(out, st);
  write_update_aggregate_csv(out, st);
  return out.str();
}

}  // namespace

TEST_CASE("a run is a pure function of seed and index") {
  for (const Variant v : {Variant::pgpe, Variant::sys, Variant::supsys, Variant::pgpe4smp,
                          Variant::supif}) {
    CAPTURE(to_string(v));
    const RunConfig c = sphere_config(v, 400);
    const ConvergenceRecord a = run_single(c, 3);
    const ConvergenceRecord b = run_single(c, 3);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].evaluations == b.trace[i].evaluations);
      CHECK(a.trace[i].best_reward == b.trace[i].best_reward);
      CHECK(a.trace[i].mean_sigma == b.trace[i].mean_sigma);
    }
    CHECK(a.final_best_reward == b.final_best_reward);
    CHECK(run_single(c, 4).final_best_reward != a.final_best_reward);
  }
}

TEST_CASE("untraced runs keep the same summary") {
  const RunConfig c = sphere_config(Variant::supsys, 400);
  const ConvergenceRecord full = run_single(c, 1, true);
  const ConvergenceRecord bare = run_single(c, 1, false);
  CHECK(bare.trace.empty());
  CHECK(bare.final_best_reward == full.final_best_reward);
  CHECK(bare.evaluations == full.evaluations);
  CHECK(bare.evaluations_to_target == full.evaluations_to_target);
}

TEST_CASE("step counts under a fixed budget") {
  SUBCASE("SyS, 100 evaluations -> 50 updates") {
    const ConvergenceRecord r = run_single(sphere_config(Variant::sys, 100), 0);
    CHECK(r.trace.size() == 50);
    CHECK(r.evaluations == 100);
  }
  SUBCASE("PGPE spends one evaluation per step") {
    const ConvergenceRecord r = run_single(sphere_config(Variant::pgpe, 100), 0);
    CHECK(r.trace.size() == 100);
    CHECK(r.evaluations == 100);
  }
  SUBCASE("four-sample variants stop before overrunning") {
    for (const Variant v : {Variant::supsys, Variant::pgpe4smp}) {
      const ConvergenceRecord r = run_single(sphere_config(v, 103), 0);
      CHECK(r.trace.size() == 25);
      CHECK(r.evaluations == 100);
    }
  }
  SUBCASE("SupIf ends at most three evaluations short") {
    for (std::size_t i = 0; i < 20; ++i) {
      const ConvergenceRecord r = run_single(sphere_config(Variant::supif, 257), i);
      CHECK(r.evaluations <= 257);
      CHECK(r.evaluations + 3 >= 257);
    }
  }
}

TEST_CASE("budget exactness and monotone best reward") {
  for (const Variant v : {Variant::pgpe, Variant::sys, Variant::supsys, Variant::pgpe4smp,
                          Variant::supif}) {
    CAPTURE(to_string(v));
    RunConfig c = RunConfig::defaults_for(ObjectiveKind::rastrigin, 5);
    c.meta.variant = v;
    c.meta.alpha_mu = 0.01;
    c.meta.alpha_sigma = 0.005;
    c.max_evaluations = 2000;
    for (std::size_t run = 0; run < 10; ++run) {
      const ConvergenceRecord r = run_single(c, run);
      REQUIRE(!r.trace.empty());
      std::uint64_t prev_e = 0;
      double prev_best = -std::numeric_limits<double>::infinity();
      const std::uint64_t cost = static_cast<std::uint64_t>(max_evaluations_per_step(v));
      for (const auto& cp : r.trace) {
        const std::uint64_t used = cp.evaluations - prev_e;
        if (v == Variant::supif) {
          CHECK((used == 1 || used == 2 || used == 4));
        } else {
          CHECK(used == cost);
        }
        CHECK(cp.best_reward >= prev_best);
        CHECK(cp.mean_sigma >= c.meta.sigma_floor);
        prev_e = cp.evaluations;
        prev_best = cp.best_reward;
      }
      CHECK(r.trace.back().evaluations == r.evaluations);
      CHECK(r.final_best_reward == r.trace.back().best_reward);
    }
  }
}

TEST_CASE("evaluations to target is recorded at the hitting evaluation") {
  RunConfig c = sphere_config(Variant::supsys, 2000);
  c.target_reward = -0.5;
  const ConvergenceRecord r = run_single(c, 0);
  REQUIRE(r.evaluations_to_target.has_value());
  const std::uint64_t hit = *r.evaluations_to_target;
  // The first checkpoint whose best reaches the target brackets the hit.
  const auto it = std::find_if(r.trace.begin(), r.trace.end(),
                               [&](const Checkpoint& cp) { return cp.best_reward >= -0.5; });
  REQUIRE(it != r.trace.end());
  CHECK(hit <= it->evaluations);
  CHECK(hit + 4 > it->evaluations);
}

TEST_CASE("SyS solves the 2-d sphere") {
  RunConfig c = sphere_config(Variant::sys, 2000);
  c.run_count = 100;
  const BatchResult b = run_batch(c, 1);
  const auto solved = std::count_if(b.records.begin(), b.records.end(), [](const auto& r) {
    return r.final_best_reward > -1e-2;
  });
  CHECK(solved >= 90);
}

TEST_CASE("aggregation against hand arithmetic") {
  SUBCASE("two constant curves") {
    const std::vector<ConvergenceRecord> recs{flat_record(0, 1.0, 100), flat_record(1, 3.0, 100)};
    const AggregateStats st = aggregate(recs, 100, 25);
    REQUIRE(st.evaluation_grid.size() == 25);
    CHECK(st.evaluation_grid.front() == 4);
    CHECK(st.evaluation_grid.back() == 100);
    for (std::size_t i = 0; i < st.evaluation_grid.size(); ++i) {
      CHECK(st.mean_best[i] == 2.0);
      CHECK(st.std_best[i] == 1.0);
    }
    CHECK(st.mean_final_best == 2.0);
    CHECK(st.update_mean_best.front() == 2.0);
  }
  SUBCASE("single run has zero spread") {
    const std::vector<ConvergenceRecord> recs{flat_record(0, -4.5, 40)};
    const AggregateStats st = aggregate(recs, 40, 10);
    for (const double s : st.std_best) CHECK(s == 0.0);
    for (const double s : st.update_std_best) CHECK(s == 0.0);
  }
  SUBCASE("grid spacing is never below four evaluations") {
    const std::vector<ConvergenceRecord> recs{flat_record(0, 0.0, 40)};
    CHECK(aggregate(recs, 40, 100).evaluation_grid.size() == 10);
    CHECK(aggregate(recs, 40, 3).evaluation_grid.front() == 14);
  }
  SUBCASE("step interpolation holds the last value") {
    ConvergenceRecord r;
    r.run_id = 0;
    r.trace = {{4, -10.0, 0, 1}, {8, -2.0, 0, 1}, {40, -1.0, 0, 1}};
    r.evaluations = 40;
    r.final_best_reward = -1.0;
    const std::vector<ConvergenceRecord> recs{r};
    const AggregateStats st = aggregate(recs, 40, 10);
    CHECK(st.mean_best[0] == -10.0);  // 4
    CHECK(st.mean_best[1] == -2.0);   // 8
    CHECK(st.mean_best[8] == -2.0);   // 36
    CHECK(st.mean_best[9] == -1.0);   // 40
  }
  SUBCASE("success rate and median") {
    std::vector<ConvergenceRecord> recs;
    for (std::size_t i = 0; i < 4; ++i) recs.push_back(flat_record(i, 0.0, 40));
    recs[0].evaluations_to_target = 8;
    recs[1].evaluations_to_target = 12;
    recs[2].evaluations_to_target = 20;
    const AggregateStats st = aggregate(recs, 40, 10);
    CHECK(st.success_rate[0] == 0.0);
    CHECK(st.success_rate[1] == 0.25);
    CHECK(st.success_rate[2] == 0.5);
    CHECK(st.success_rate[9] == 0.75);
    CHECK(st.final_success_rate == 0.75);
    REQUIRE(st.median_evals_to_target.has_value());
    CHECK(*st.median_evals_to_target == 16.0);
    recs[2].evaluations_to_target.reset();
    CHECK_FALSE(median_evals_to_target(recs).has_value());
  }
}

TEST_CASE("aggregation ignores record order") {
  RunConfig c = sphere_config(Variant::supif, 600);
  c.run_count = 9;
  const BatchResult b = run_batch(c, 1);
  std::vector<ConvergenceRecord> shuffled = b.records;
  std::mt19937 g(7);
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  CHECK(aggregate_text(aggregate(shuffled, 600, 100)) == aggregate_text(b.stats));
}

TEST_CASE("batch results do not depend on the thread count") {
  RunConfig c = sphere_config(Variant::pgpe4smp, 800);
  c.run_count = 12;
  const std::string one = aggregate_text(run_batch(c, 1).stats);
  CHECK(aggregate_text(run_batch(c, 4).stats) == one);
  CHECK(aggregate_text(run_batch(c, 4).stats) == one);
}

TEST_CASE("parallel_for forwards exceptions") {
  CHECK_THROWS_AS(parallel_for(8, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("geometric grids") {
  const auto g = geometric_grid(1e-4, 1.0, 2);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == 1e-4);
  CHECK(g.back() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(std::sqrt(10.0) * 1e-4).epsilon(1e-12));
  CHECK(geometric_grid(0.5, 0.5, 3).size() == 1);
  CHECK_THROWS_AS((void)geometric_grid(0.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)geometric_grid(1.0, 0.1, 2), std::invalid_argument);
}

TEST_CASE("grid search selection") {
  GridSpec grid;
  grid.alpha_mu = {0.01, 0.1, 1.0};
  grid.alpha_sigma = {0.02, 0.2};

  SUBCASE("table is alpha_mu-major") {
    const GridResult r = grid_search(grid, [](double, double) { return CellScore{}; });
    REQUIRE(r.table.size() == 6);
    CHECK(r.table[1].alpha_mu == 0.01);
    CHECK(r.table[1].alpha_sigma == 0.2);
    CHECK(r.table[2].alpha_mu == 0.1);
  }
  SUBCASE("planted optimum wins") {
    const GridResult r = grid_search(
        grid,
        [](double am, double as) {
          CellScore s;
          s.median_evals_to_target = (am == 0.1 && as == 0.2) ? 10.0 : 100.0;
          return s;
        },
        3);
    CHECK(r.best_alpha_mu == 0.1);
    CHECK(r.best_alpha_sigma == 0.2);
    CHECK_FALSE(r.fell_back);
  }
  SUBCASE("ties go to the smaller cell") {
    const GridResult r = grid_search(grid, [](double am, double) {
      CellScore s;
      s.median_evals_to_target = am >= 0.1 ? 50.0 : 80.0;
      return s;
    });
    CHECK(r.best_alpha_mu == 0.1);
    CHECK(r.best_alpha_sigma == 0.02);
  }
  SUBCASE("unreached cells rank last") {
    const GridResult r = grid_search(grid, [](double am, double as) {
      CellScore s;
      if (am == 1.0 && as == 0.2) s.median_evals_to_target = 1e6;
      return s;
    });
    CHECK(r.best_alpha_mu == 1.0);
    CHECK(r.best_alpha_sigma == 0.2);
  }
  SUBCASE("no cell reaches the target -> final reward with a flag") {
    const GridResult r = grid_search(grid, [](double am, double as) {
      CellScore s;
      s.mean_final_reward = -std::abs(std::log10(am) + 1.0) - std::abs(std::log10(as));
      return s;
    });
    CHECK(r.fell_back);
    CHECK(r.metric_used == SelectionMetric::mean_final_reward);
    CHECK(r.best_alpha_mu == 0.1);
    CHECK(r.best_alpha_sigma == 0.2);
  }
  SUBCASE("NaN final reward never wins") {
    grid.metric = SelectionMetric::mean_final_reward;
    const GridResult r = grid_search(grid, [](double am, double) {
      CellScore s;
      s.mean_final_reward = am == 0.01 ? std::nan("") : -am;
      return s;
    });
    CHECK(r.best_alpha_mu == 0.1);
  }
  SUBCASE("single cell") {
    GridSpec one;
    one.alpha_mu = {0.3};
    one.alpha_sigma = {0.7};
    const GridResult r = grid_search(one, [](double, double) { return CellScore{}; });
    CHECK(r.best_alpha_mu == 0.3);
    CHECK(r.best_alpha_sigma == 0.7);
  }
  SUBCASE("invalid grids") {
    GridSpec bad = grid;
    bad.alpha_mu.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = grid;
    bad.alpha_sigma = {0.2, 0.1};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = grid;
    bad.runs_per_cell = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("grid search over real runs is reproducible") {
  RunConfig c = sphere_config(Variant::sys, 300);
  GridSpec grid;
  grid.alpha_mu = {0.01, 0.1};
  grid.alpha_sigma = {0.01, 0.1};
  grid.runs_per_cell = 5;
  const GridResult a = grid_search(grid, c, 1);
  const GridResult b = grid_search(grid, c, 3);
  std::ostringstream sa;
  std::ostringstream sb;
  write_grid_csv(sa, a);
  write_grid_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("alpha_mu,alpha_sigma,median_evals_to_target,success_rate,"
                       "mean_final_reward\n",
                       0) == 0);
}

TEST_CASE("scaling study") {
  SUBCASE("planted 1/dim optimum has slope -1") {
    const std::vector<std::size_t> dims{2, 5, 10, 40};
    const ScalingTable t = scaling_study(dims, [](std::size_t d) {
      GridResult r;
      r.best_alpha_mu = 1.0 / static_cast<double>(d);
      r.best_alpha_sigma = 3.0 / static_cast<double>(d);
      return r;
    });
    REQUIRE(t.rows.size() == 4);
    REQUIRE(t.slope_alpha_mu.has_value());
    CHECK(*t.slope_alpha_mu == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(*t.slope_alpha_sigma == doctest::Approx(-1.0).epsilon(1e-6));
  }
  SUBCASE("one dimension has no slope") {
    const std::vector<std::size_t> dims{7};
    const ScalingTable t = scaling_study(dims, [](std::size_t) {
      GridResult r;
      r.best_alpha_mu = 0.1;
      r.best_alpha_sigma = 0.1;
      return r;
    });
    CHECK(t.rows.size() == 1);
    CHECK_FALSE(t.slope_alpha_mu.has_value());
    CHECK_FALSE(t.slope_alpha_sigma.has_value());
  }
}

TEST_CASE("run config validation") {
  RunConfig c = sphere_config(Variant::sys, 100);
  CHECK_NOTHROW(c.validate());
  c.max_evaluations = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = sphere_config(Variant::sys, 100);
  c.sigma0 = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = sphere_config(Variant::sys, 100);
  c.run_count = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  const RunConfig r = RunConfig::defaults_for(ObjectiveKind::rastrigin, 10);
  CHECK(r.mu0_range == 3.2);
  CHECK(r.sigma0 == 2.0);
}

TEST_CASE("CSV writers") {
  const std::vector<ConvergenceRecord> recs{flat_record(1, -0.25, 8, 4), flat_record(0, 0.5, 8, 4)};
  std::ostringstream runs;
  write_runs_csv(runs, recs);
  CHECK(runs.str() ==
        "run_id,evaluations,best_reward,update_reward,mean_sigma\n"
        "0,4,0.5,0.5,1\n0,8,0.5,0.5,1\n1,4,-0.25,-0.25,1\n1,8,-0.25,-0.25,1\n");
  std::ostringstream agg;
  // 17 significant digits where the value is not short.
  CHECK(csv::num(0.1) == "0.10000000000000001");
  write_aggregate_csv(agg, aggregate(recs, 8, 2));
  CHECK(agg.str() ==
        "evaluations,mean_best_reward,std_best_reward,success_rate\n"
        "4,0.125,0.375,0\n8,0.125,0.375,0\n");
}
