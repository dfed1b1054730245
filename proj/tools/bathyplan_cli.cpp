#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "bathyplan/error.hpp"
#include "bathyplan/pipeline.hpp"
#include "bathyplan/render.hpp"
#include "bathyplan/terrain.hpp"

using namespace bathyplan;

namespace {

void add_run_options(CLI::App* cmd, RunConfig& c) {
  auto* src = cmd->add_option_group("source");
  src->add_option("--input", c.input, "ESRI ASCII grid");
  src->add_option("--synthetic", c.synthetic, "terrain spec (YAML or JSON)");
  src->require_option(1);
  cmd->add_option("--terrain-seed", c.terrain_seed, "override the terrain spec's seed");
  cmd->add_option("--features", c.features, "precomputed feature table");

  cmd->add_option("--encoder", c.encoder, "feature encoder")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, EncoderKind>{{"linear", EncoderKind::linear}, {"geometric", EncoderKind::geometric}},
          CLI::ignore_case));
  cmd->add_option("--latent-dim", c.latent_dim, "linear encoder dimension")->capture_default_str();
  cmd->add_option("--patch", c.patch, "patch size in cells (odd)")->capture_default_str();
  cmd->add_option("--stride", c.stride, "feature lattice stride in cells")->capture_default_str();
  cmd->add_option("--encoder-samples", c.encoder_samples, "patches used to fit the encoder")->capture_default_str();

  cmd->add_option("--k", c.k, "GMM components")->capture_default_str();
  cmd->add_flag("--bic", c.bic, "pick K in 2..12 by BIC");
  cmd->add_option("--gmm-restarts", c.gmm_restarts)->capture_default_str();
  cmd->add_option("--min-area", c.min_area, "smallest routed component, in sites")->capture_default_str();
  cmd->add_option("--per-component", c.per_component, "TSP nodes per component")->capture_default_str();

  cmd->add_option("--planner", c.planner, "tsp or inforrt")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, PlannerKind>{{"tsp", PlannerKind::tsp}, {"inforrt", PlannerKind::inforrt}},
          CLI::ignore_case));
  cmd->add_option("--budget", c.budget, "path length budget in meters")->capture_default_str();
  cmd->add_option("--seed", c.seed)->capture_default_str();
  cmd->add_option("--sweeps", c.tsp_sweeps, "annealing sweeps")->capture_default_str();

  auto& p = c.inforrt;
  cmd->add_option("--starts", p.n_starts, "InfoRRT start positions")->capture_default_str();
  cmd->add_option("--iterations", p.iterations, "InfoRRT iterations per start")->capture_default_str();
  cmd->add_option("--goal-bias", p.goal_bias, "probability of an informed aim")->capture_default_str();
  cmd->add_option("--step", p.step, "steer step in meters (default 5 cells)");
  cmd->add_option("--k-nearest", p.k_nearest)->capture_default_str();
  cmd->add_option("--aim-samples", p.aim_samples)->capture_default_str();
  cmd->add_option("--start-samples", p.start_samples)->capture_default_str();
  cmd->add_option("--start-mode", p.start_mode)
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, StartMode>{{"informative", StartMode::informative}, {"random", StartMode::random}},
          CLI::ignore_case));
  cmd->add_option("--criterion", p.criterion, "path selection score")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, PathCriterion>{{"mpd", PathCriterion::mpd}, {"neg-msd", PathCriterion::neg_msd}},
          CLI::ignore_case));

  cmd->add_option("--depth-min", c.depth_min, "shallowest operable depth bound (most negative allowed)");
  cmd->add_option("--depth-max", c.depth_max, "upper operable depth bound");
  cmd->add_option("--eval-seed", c.eval_seed, "seed for environment samples and transects")->capture_default_str();
  cmd->add_option("--env-samples", c.env_samples, "environment samples for M_SD")->capture_default_str();
  cmd->add_option("--n", c.transects, "benchmark transects")->capture_default_str();
  cmd->add_option("--sample-spacing", c.sample_spacing, "feature sampling spacing in meters (default 2 cells)");
  cmd->add_option("--time-budget", c.time_budget_s, "wall-clock cap per planner run, seconds (nondeterministic)");
  cmd->add_option("--jobs", c.jobs, "worker threads (0 = all)")->capture_default_str();
  cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
}

int cmd_plan(RunConfig c) {
  const Scene scene = prepare_scene(c);
  const PlanOutcome outcome = plan_on_scene(scene, c);
  const BenchmarkResult bench = benchmark_on_scene(scene, c);
  write_artifacts(plan_artifacts(scene, outcome, bench, c), c.out_dir);
  std::cout << "path length " << outcome.report.d_m << " m, mpd " << outcome.report.mpd << ", msd "
            << outcome.report.msd << ", mc " << outcome.report.mc << " -> " << c.out_dir << "\n";
  return 0;
}

int cmd_benchmark(RunConfig c) {
  const Scene scene = prepare_scene(c);
  const BenchmarkResult bench = benchmark_on_scene(scene, c);
  write_artifacts(benchmark_artifacts(bench, c), c.out_dir);
  std::cout << bench.transects.size() << " transects, mean mpd " << bench.mean_mpd << ", mean msd "
            << bench.mean_msd << " -> " << c.out_dir << "\n";
  return 0;
}

int cmd_render(const std::string& run_dir, const std::string& out_dir) {
  const BathyGrid grid = load_ascii_grid(run_dir + "/grid.asc");
  const BathyGrid clusters = load_ascii_grid(run_dir + "/clusters.asc");
  std::ifstream pin(run_dir + "/path.csv");
  if (!pin) throw DataError("cannot open '" + run_dir + "/path.csv'");
  Path path;
  try {
    path = read_path_csv(pin);
  } catch (const ParseError& e) {
    throw DataError(run_dir + "/path.csv: " + e.what());
  }

  Image depth = render_depth(grid);
  overlay_path(depth, grid, path);
  Image labels = render_labels(grid.ncols(), grid.nrows(), resample_labels(grid, clusters));
  overlay_path(labels, grid, path, {255, 255, 255});
  Artifacts a;
  std::ostringstream d, l;
  write_ppm(d, depth);
  write_ppm(l, labels);
  a.files.emplace_back("depth.ppm", d.str());
  a.files.emplace_back("clusters.ppm", l.str());
  write_artifacts(a, out_dir);
  std::cout << "wrote depth.ppm, clusters.ppm (" << grid.ncols() << "x" << grid.nrows() << ") -> " << out_dir << "\n";
  return 0;
}

int cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  const TerrainSpec spec = load_terrain_spec(spec_path);
  const SyntheticTerrain t = synth_terrain(spec, seed.value_or(spec.seed));
  Artifacts a;
  a.files.emplace_back("grid.asc", serialize_ascii_grid(t.grid));
  std::ostringstream l;
  write_ascii_int_grid(l, t.grid.ncols(), t.grid.nrows(), t.grid.xllcorner(), t.grid.yllcorner(), t.grid.cellsize(),
                       -9999, t.labels.labels);
  a.files.emplace_back("labels.asc", l.str());
  write_artifacts(a, out_dir);
  std::cout << "wrote grid.asc, labels.asc -> " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted AUV survey planning over gridded bathymetry"};
  app.require_subcommand(1);

  RunConfig plan_cfg, bench_cfg;
  std::optional<std::uint64_t> synth_seed;
  auto* plan = app.add_subcommand("plan", "plan a survey path and write its artifacts");
  add_run_options(plan, plan_cfg);
  auto* bench = app.add_subcommand("benchmark", "evaluate random straight transects");
  add_run_options(bench, bench_cfg);

  std::string run_dir, render_out;
  auto* render = app.add_subcommand("render", "draw depth and cluster images for a finished run");
  render->add_option("--run", run_dir, "directory written by plan")->required();
  render->add_option("--out", render_out, "image directory (default: the run directory)");

  std::string synth_spec, synth_out = "terrain";
  auto* synth = app.add_subcommand("synth", "write a synthetic terrain and its labels");
  synth->add_option("--spec", synth_spec, "terrain spec")->required();
  synth->add_option("--seed", synth_seed);
  synth->add_option("--out", synth_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*plan) return cmd_plan(plan_cfg);
    if (*bench) return cmd_benchmark(bench_cfg);
    if (*render) return cmd_render(run_dir, render_out.empty() ? run_dir : render_out);
    if (*synth) return cmd_synth(synth_spec, synth_seed, synth_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "bathyplan: config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "bathyplan: data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "bathyplan: planner error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
