#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pgpe::cli {

/// Process exit codes shared by every command.
enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed;  ///< replaces base_seed
  std::size_t threads = 0;            ///< 0: all available cores
};

/// Writes aggregate.csv, aggregate_updates.csv, runs.csv and summary.json to `out_dir`.
int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& opts,
            std::ostream& log, std::ostream& err);

/// Writes comparison.csv, comparison_updates.csv and comparison_summary.csv to `out_dir`.
int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_dir,
                const Overrides& opts, std::ostream& log, std::ostream& err);

/// Writes grid_scores.csv and grid_best.json to `out_dir`.
int cmd_gridsearch(const std::string& config_path, const std::string& out_dir,
                   const Overrides& opts, std::ostream& log, std::ostream& err);

/// Writes surface.csv to `out_dir`.
int cmd_surface(const std::string& objective, std::size_t dim, double range,
                std::size_t resolution, const std::string& out_dir, std::ostream& log,
                std::ostream& err);

}  // namespace pgpe::cli
