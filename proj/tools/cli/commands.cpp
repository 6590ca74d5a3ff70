#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "experiment_file.hpp"
#include "json.hpp"
#include "pgpe/csv.hpp"
#include "pgpe/harness.hpp"
#include "pgpe/objectives.hpp"

namespace pgpe::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path prepare_out_dir(const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + out_dir + "'" +
                  (ec ? ": " + ec.message() : std::string{}));
  }
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ExperimentFile load(const std::string& path, const Overrides& opts) {
  ExperimentFile f;
  try {
    f = load_experiment(path);
  } catch (const std::ios_base::failure& e) {
    throw IoError(e.what());
  }
  if (opts.seed) f.run.base_seed = *opts.seed;
  return f;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: config " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& opts,
            std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentFile file = load(config_path, opts);
    const fs::path dir = prepare_out_dir(out_dir);
    const BatchResult batch = run_batch(file.run, opts.threads);

    std::ostringstream agg;
    write_aggregate_csv(agg, batch.stats);
    std::ostringstream upd;
    write_update_aggregate_csv(upd, batch.stats);
    std::ostringstream runs;
    write_runs_csv(runs, batch.records);

    std::array<std::uint64_t, 3> branches{};
    for (const auto& r : batch.records) {
      for (std::size_t i = 0; i < 3; ++i) branches[i] += r.branch_counts[i];
    }
    ordered_json summary;
    summary["label"] = file.run.label;
    summary["variant"] = std::string(to_string(file.run.meta.variant));
    summary["run_count"] = batch.stats.run_count;
    summary["median_evals_to_target"] = optional_number(batch.stats.median_evals_to_target);
    summary["success_rate"] = batch.stats.final_success_rate;
    summary["mean_final_best_reward"] = batch.stats.mean_final_best;
    if (file.run.meta.variant == Variant::supif) {
      summary["branch_counts"] = {
          {"single", branches[0]}, {"sys", branches[1]}, {"supsys", branches[2]}};
    }
    summary["config"] = ordered_json::parse(emit_experiment(file));

    write_file(dir / "aggregate.csv", agg.str());
    write_file(dir / "aggregate_updates.csv", upd.str());
    write_file(dir / "runs.csv", runs.str());
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    log << file.run.label << ": " << batch.stats.run_count << " runs, median evaluations to target "
        << (batch.stats.median_evals_to_target ? csv::num(*batch.stats.median_evals_to_target)
                                               : std::string("n/a"))
        << ", success rate " << csv::num(batch.stats.final_success_rate) << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_dir,
                const Overrides& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (config_paths.empty()) throw std::invalid_argument("compare needs at least one --config");
    std::vector<ExperimentFile> files;
    for (const auto& p : config_paths) files.push_back(load(p, opts));
    for (const auto& f : files) {
      if (f.run.objective != files.front().run.objective || f.run.dim != files.front().run.dim) {
        throw ConfigError("objective", "compared configs must share objective name and dim");
      }
    }
    const fs::path dir = prepare_out_dir(out_dir);

    std::uint64_t max_evals = 0;
    std::size_t grid_points = 0;
    for (const auto& f : files) {
      max_evals = std::max(max_evals, f.run.max_evaluations);
      grid_points = std::max(grid_points, f.run.grid_points);
    }

    std::ostringstream curves;
    std::ostringstream updates;
    std::ostringstream summary;
    curves << "label,variant,evaluations,mean_best_reward,std_best_reward,success_rate\n";
    updates << "label,variant,updates,mean_best_reward,std_best_reward\n";
    summary << "label,variant,median_evals_to_target,success_rate,mean_final_best_reward\n";
    for (const auto& f : files) {
      const BatchResult batch = run_batch(f.run, opts.threads);
      const AggregateStats st = aggregate(batch.records, max_evals, grid_points);
      const std::string prefix = f.run.label + "," + std::string(to_string(f.run.meta.variant));
      for (std::size_t i = 0; i < st.evaluation_grid.size(); ++i) {
        curves << prefix << ',' << st.evaluation_grid[i] << ',' << csv::num(st.mean_best[i]) << ','
               << csv::num(st.std_best[i]) << ',' << csv::num(st.success_rate[i]) << '\n';
      }
      for (std::size_t i = 0; i < st.update_grid.size(); ++i) {
        updates << prefix << ',' << st.update_grid[i] << ',' << csv::num(st.update_mean_best[i])
                << ',' << csv::num(st.update_std_best[i]) << '\n';
      }
      const std::string median =
          st.median_evals_to_target ? csv::num(*st.median_evals_to_target) : std::string{};
      summary << prefix << ',' << median << ',' << csv::num(st.final_success_rate) << ','
              << csv::num(st.mean_final_best) << '\n';
      log << f.run.label << ": median evaluations to target "
          << (median.empty() ? std::string("n/a") : median) << '\n';
    }
    write_file(dir / "comparison.csv", curves.str());
    write_file(dir / "comparison_updates.csv", updates.str());
    write_file(dir / "comparison_summary.csv", summary.str());
    return static_cast<int>(kOk);
  });
}

int cmd_gridsearch(const std::string& config_path, const std::string& out_dir,
                   const Overrides& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentFile file = load(config_path, opts);
    if (!file.grid) throw ConfigError("grid", "required key is missing for gridsearch");
    const fs::path dir = prepare_out_dir(out_dir);
    const GridResult result = grid_search(*file.grid, file.run, opts.threads);

    std::ostringstream scores;
    write_grid_csv(scores, result);
    ordered_json best;
    best["label"] = file.run.label;
    best["variant"] = std::string(to_string(file.run.meta.variant));
    best["best_alpha_mu"] = result.best_alpha_mu;
    best["best_alpha_sigma"] = result.best_alpha_sigma;
    best["metric_used"] = std::string(to_string(result.metric_used));
    best["fell_back"] = result.fell_back;
    write_file(dir / "grid_scores.csv", scores.str());
    write_file(dir / "grid_best.json", best.dump(2) + "\n");

    log << "best cell: alpha_mu=" << csv::num(result.best_alpha_mu)
        << " alpha_sigma=" << csv::num(result.best_alpha_sigma) << " ("
        << to_string(result.metric_used) << (result.fell_back ? ", fallback" : "") << ")\n";
    return static_cast<int>(kOk);
  });
}

int cmd_surface(const std::string& objective, std::size_t dim, double range,
                std::size_t resolution, const std::string& out_dir, std::ostream& log,
                std::ostream& err) {
  return guarded(err, [&] {
    const ObjectiveKind kind = parse_objective_kind(objective);
    const auto grid = emit_surface_grid(kind, dim, range, resolution);
    const fs::path dir = prepare_out_dir(out_dir);
    std::ostringstream csv_out;
    write_surface_csv(csv_out, grid);
    write_file(dir / "surface.csv", csv_out.str());
    log << "wrote " << grid.size() << " grid nodes to " << (dir / "surface.csv").string() << '\n';
    return static_cast<int>(kOk);
  });
}

}  // namespace pgpe::cli
