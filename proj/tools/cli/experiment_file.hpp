#pragma once

// JSON experiment documents for the pgpe command-line tool.
//
// {
//   "label": "supsys-r10",                        optional, default: variant name
//   "variant": "SupSyS",                          PGPE | SyS | SupSyS | PGPE4smp | SupIf
//   "objective": {"name": "rastrigin", "dim": 10},
//   "meta": {"alpha_mu": 0.003, "alpha_sigma": 0.003,
//            "sigma_floor": 1e-10,                optional
//            "supsys_sigma": "original"},         optional: original | symmetrized
//   "baseline": {"kind": "decaying", "gamma": 0.1, "window": 10},   optional
//   "mu0_range": 3.2, "sigma0": 2.0,              optional, per-objective defaults
//   "max_evaluations": 10000,
//   "target_reward": -10,
//   "base_seed": 1,
//   "run_count": 50,
//   "grid_points": 100,                           optional
//   "grid": {                                     only read by `gridsearch`
//     "alpha_mu": [0.001, 0.01] | {"from": 1e-4, "to": 1, "per_decade": 2},
//     "alpha_sigma": ...,
//     "metric": "median_evals_to_target",         optional
//     "runs_per_cell": 20                         optional
//   }
// }

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pgpe/harness.hpp"

namespace pgpe::cli {

/// A malformed document. `key()` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct ExperimentFile {
  RunConfig run;
  std::optional<GridSpec> grid;

  bool operator==(const ExperimentFile&) const = default;
};

/// Parses and validates a document. Unknown keys, missing required keys and
/// ill-typed values raise ConfigError.
[[nodiscard]] ExperimentFile parse_experiment(std::string_view text);

/// Reads and parses a file. Unreadable files raise std::ios_base::failure.
[[nodiscard]] ExperimentFile load_experiment(const std::string& path);

/// Serializes every field explicitly, so parse_experiment(emit_experiment(x)) == x.
[[nodiscard]] std::string emit_experiment(const ExperimentFile& file);

}  // namespace pgpe::cli
