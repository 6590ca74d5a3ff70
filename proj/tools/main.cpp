#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"

namespace {

struct CommonFlags {
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--out", out, "output directory (created if missing)");
    cmd->add_option("--seed", seed, "overrides base_seed from the config");
    cmd->add_option("--threads", threads, "worker cap, 0 uses all cores");
  }

  [[nodiscard]] pgpe::cli::Overrides overrides() const { return {seed, threads}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-exploring policy gradient experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string run_config;
  auto* run = app.add_subcommand("run", "run a batch and write aggregate curves");
  run->add_option("--config", run_config, "experiment JSON")->required();
  run_flags.attach(run);

  CommonFlags cmp_flags;
  std::vector<std::string> cmp_configs;
  auto* compare = app.add_subcommand("compare", "run several configs on a shared grid");
  compare->add_option("--config", cmp_configs, "experiment JSON, repeatable");
  cmp_flags.attach(compare);

  CommonFlags grid_flags;
  std::string grid_config;
  auto* grid = app.add_subcommand("gridsearch", "search step sizes over the config's grid");
  grid->add_option("--config", grid_config, "experiment JSON with a grid section")->required();
  grid_flags.attach(grid);

  std::string surf_out = ".";
  std::string surf_objective = "rastrigin";
  std::size_t surf_dim = 2;
  double surf_range = 5.12;
  std::size_t surf_resolution = 256;
  auto* surface = app.add_subcommand("surface", "tabulate a 2-D objective on a square grid");
  surface->add_option("--objective", surf_objective, "sphere or rastrigin");
  surface->add_option("--dim", surf_dim, "must be 2");
  surface->add_option("--range", surf_range, "half-width of the square");
  surface->add_option("--resolution", surf_resolution, "nodes per axis");
  surface->add_option("--out", surf_out, "output directory (created if missing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pgpe::cli::kUsage;
  }

  if (*run) {
    return pgpe::cli::cmd_run(run_config, run_flags.out, run_flags.overrides(), std::cout,
                              std::cerr);
  }
  if (*compare) {
    return pgpe::cli::cmd_compare(cmp_configs, cmp_flags.out, cmp_flags.overrides(), std::cout,
                                  std::cerr);
  }
  if (*grid) {
    return pgpe::cli::cmd_gridsearch(grid_config, grid_flags.out, grid_flags.overrides(),
                                     std::cout, std::cerr);
  }
  return pgpe::cli::cmd_surface(surf_objective, surf_dim, surf_range, surf_resolution, surf_out,
                                std::cout, std::cerr);
}
