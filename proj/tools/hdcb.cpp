// hdcb — contextual-bandit experiment runner.
//
//   hdcb run       --config exp.config --out out/
//   hdcb sweep     --config exp.config --out out/
//   hdcb bench     --config exp.config --out out/
//   hdcb plot      <csv> --out chart.svg --kind reward|regret|convergence|scaling
//   hdcb movielens --config exp.config --out out/ [--data DIR] [--movies N] [--dim D]

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hdcb/cli.hpp"
#include "hdcb/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hdcb: hyperdimensional contextual bandits"};
  app.set_version_flag("--version", std::string(hdcb::kVersion));
  app.require_subcommand(1);

  hdcb::cli::CommonOptions common;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int workers_override = 0;
  bool workers_set = false;

  const auto add_common = [&](CLI::App* cmd, bool needs_out = true) {
    cmd->add_option("--config", common.config_path, "experiment config file")->required();
    auto* out = cmd->add_option("--out", common.out_dir, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--seed", seed_override, "override the configured seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--workers", workers_override, "cap harness parallelism")
        ->each([&](const std::string&) { workers_set = true; });
  };

  auto* run = app.add_subcommand("run", "execute an online experiment");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "grid-search the [sweep] lattice");
  add_common(sweep);
  auto* bench = app.add_subcommand("bench", "measure per-step latency sweeps");
  add_common(bench);

  auto* plot = app.add_subcommand("plot", "render a CSV as an SVG line chart");
  std::string csv_path;
  std::string svg_path;
  std::string kind = "reward";
  plot->add_option("csv", csv_path, "input CSV")->required();
  plot->add_option("--out", svg_path, "output SVG path")->required();
  plot->add_option("--kind", kind, "reward | regret | convergence | scaling");

  auto* movielens = app.add_subcommand("movielens", "replay experiment on MovieLens-100k");
  hdcb::cli::MovielensOptions ml;
  add_common(movielens);
  movielens->add_option("--data", ml.data_dir, "dataset directory (default $HDCB_MOVIELENS_DIR)");
  movielens->add_option("--movies", ml.n_movies, "number of most-rated movies to keep");
  movielens->add_option("--dim", ml.context_dim, "user feature dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  if (seed_set) common.seed = seed_override;
  if (workers_set) common.workers = workers_override;

  if (run->parsed()) return hdcb::cli::cmd_run(common);
  if (sweep->parsed()) return hdcb::cli::cmd_sweep(common);
  if (bench->parsed()) return hdcb::cli::cmd_bench(common);
  if (plot->parsed()) return hdcb::cli::cmd_plot(csv_path, svg_path, kind);
  if (movielens->parsed()) {
    ml.common = common;
    return hdcb::cli::cmd_movielens(ml);
  }
  std::cerr << "hdcb: no command\n";
  return 2;
}
