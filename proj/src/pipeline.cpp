#include "bathyplan/pipeline.hpp"

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bathyplan/error.hpp"
#include "bathyplan/render.hpp"
#include "bathyplan/terrain.hpp"

namespace bathyplan {

namespace {

nlohmann::json bound_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

const char* planner_name(PlannerKind k) { return k == PlannerKind::tsp ? "tsp" : "inforrt"; }

void validate(const RunConfig& c) {
  if (c.input.empty() == c.synthetic.empty()) throw ConfigError("exactly one of --input or --synthetic is required");
  if (c.patch < 3 || c.patch % 2 == 0) throw ConfigError("patch size must be odd and >= 3");
  if (c.stride < 1) throw ConfigError("stride must be >= 1");
  if (c.encoder == EncoderKind::linear && c.latent_dim < 1) throw ConfigError("latent dim must be >= 1");
  if (c.k < 1) throw ConfigError("k must be >= 1");
  if (c.gmm_restarts < 1) throw ConfigError("GMM restarts must be >= 1");
  if (c.per_component < 1) throw ConfigError("per_component must be >= 1");
  if (!(c.budget > 0.0)) throw ConfigError("budget must be > 0");
  if (c.tsp_sweeps < 0) throw ConfigError("sweeps must be >= 0");
  if (c.env_samples < 1) throw ConfigError("environment sample count must be >= 1");
  if (std::isnan(c.depth_min) || std::isnan(c.depth_max) || c.depth_min > c.depth_max)
    throw ConfigError("depth bounds are inverted");
  if (c.time_budget_s && !(*c.time_budget_s > 0.0)) throw ConfigError("time budget must be > 0");
  if (c.jobs < 0) throw ConfigError("jobs must be >= 0");
}

std::string with_digest_comment(const std::string& digest, const std::string& body) {
  return "# config_digest " + digest + "\n" + body;
}

template <typename F>
std::string render_to_string(F&& f) {
  std::ostringstream ss;
  f(ss);
  return ss.str();
}

}  // namespace

nlohmann::json config_json(const RunConfig& c) {
  const auto& p = c.inforrt;
  nlohmann::json j = {
      {"input", c.input},
      {"synthetic", c.synthetic},
      {"terrain_seed", c.terrain_seed ? nlohmann::json(*c.terrain_seed) : nlohmann::json(nullptr)},
      {"features", c.features},
      {"encoder", c.encoder == EncoderKind::linear ? "linear" : "geometric"},
      {"latent_dim", c.encoder == EncoderKind::linear ? c.latent_dim : 4},
      {"patch", c.patch},
      {"stride", c.stride},
      {"encoder_samples", c.encoder_samples},
      {"k", c.k},
      {"bic", c.bic},
      {"gmm_restarts", c.gmm_restarts},
      {"min_area", c.min_area},
      {"per_component", c.per_component},
      {"planner", planner_name(c.planner)},
      {"budget", c.budget},
      {"seed", c.seed},
      {"depth_min", bound_json(c.depth_min)},
      {"depth_max", bound_json(c.depth_max)},
      {"eval_seed", c.eval_seed},
      {"env_samples", c.env_samples},
      {"transects", c.transects},
      {"sample_spacing", c.sample_spacing},
      {"time_budget_s", c.time_budget_s ? nlohmann::json(*c.time_budget_s) : nlohmann::json(nullptr)},
  };
  if (c.planner == PlannerKind::tsp) {
    j["tsp_sweeps"] = c.tsp_sweeps;
  } else {
    j["inforrt"] = {
        {"step", p.step},
        {"k_nearest", p.k_nearest},
        {"iterations", p.iterations},
        {"starts", p.n_starts},
        {"goal_bias", p.goal_bias},
        {"aim_samples", p.aim_samples},
        {"start_samples", p.start_samples},
        {"start_mode", p.start_mode == StartMode::informative ? "informative" : "random"},
        {"criterion", p.criterion == PathCriterion::mpd ? "mpd" : "neg_msd"},
    };
  }
  return j;
}

std::string config_digest(const RunConfig& config) {
  const std::string text = config_json(config).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EvalContext Scene::eval_context(std::size_t env_samples, std::uint64_t eval_seed) const {
  EvalContext ctx;
  ctx.env = env.get();
  ctx.clusters = &clusters;
  ctx.active_labels = polygons.active_labels();
  ctx.env_samples = environment_samples(*env, env_samples, mix_seed(eval_seed, 0));
  ctx.sample_spacing = sample_spacing;
  ctx.labels = labels ? &*labels : nullptr;
  return ctx;
}

Scene prepare_scene(const RunConfig& c) {
  validate(c);
  if (c.jobs > 0) omp_set_num_threads(c.jobs);

  Scene scene;
  BathyGrid grid;
  if (!c.synthetic.empty()) {
    const TerrainSpec spec = load_terrain_spec(c.synthetic);
    SyntheticTerrain terrain = synth_terrain(spec, c.terrain_seed.value_or(spec.seed));
    grid = std::move(terrain.grid);
    scene.labels = std::move(terrain.labels);
  } else {
    grid = load_ascii_grid(c.input);
  }

  FeatureField field;
  if (!c.features.empty()) {
    std::ifstream in(c.features);
    if (!in) throw DataError("cannot open feature table '" + c.features + "'");
    field = read_feature_field(in, grid);
  } else {
    Encoder encoder = Encoder::geometric(c.patch, grid.cellsize());
    if (c.encoder == EncoderKind::linear) {
      const auto samples = sample_patches(grid, c.patch, c.encoder_samples, mix_seed(c.seed, 1));
      encoder = fit_linear_encoder(samples, c.latent_dim);
    }
    field = build_feature_field(grid, encoder, c.stride);
  }
  if (field.size() <= static_cast<std::size_t>(field.dim()) + 1)
    throw DataError("only " + std::to_string(field.size()) + " feature sites; the grid is too small for the patch size");

  ObstacleMask mask = operability_mask(grid, c.depth_min, c.depth_max);
  MahalanobisModel model = fit_mahalanobis(field.features);

  GmmOptions opt;
  opt.k = c.k;
  opt.seed = mix_seed(c.seed, 2);
  opt.n_init = c.gmm_restarts;
  scene.gmm = c.bic ? fit_gmm_bic(field.features, opt) : fit_gmm(field.features, opt);
  scene.clusters = assign_clusters(scene.gmm, field.features);
  scene.polygons = polygonize(field, scene.clusters, c.min_area);
  scene.sample_spacing = c.sample_spacing > 0.0 ? c.sample_spacing : 2.0 * grid.cellsize();
  scene.env = std::make_unique<Environment>(std::move(grid), std::move(mask), std::move(field), std::move(model));
  return scene;
}

PlanOutcome plan_on_scene(const Scene& scene, const RunConfig& c) {
  const EvalContext ctx = scene.eval_context(c.env_samples, c.eval_seed);
  const auto& field = scene.env->field();
  PlanOutcome out;
  if (c.planner == PlannerKind::tsp) {
    const RepresentativeSet reps = representative_points(scene.polygons, field, c.per_component, mix_seed(c.seed, 3));
    const SetTspInstance inst = make_set_tsp_instance(reps);
    if (inst.nodes.empty()) throw PlannerError("no cluster component is large enough to route through");
    AnnealOptions opt;
    opt.seed = mix_seed(c.seed, 4);
    opt.sweeps = c.tsp_sweeps;
    opt.time_budget_s = c.time_budget_s;
    TspSolution sol = solve_set_tsp(inst, opt);
    const double annealed = sol.length;
    sol = enforce_budget(inst, std::move(sol), c.budget);
    out.path = sol.path;
    out.planner_info = {
        {"nodes", inst.nodes.size()},
        {"groups", inst.group_ids().size()},
        {"initial_length", sol.initial_length},
        {"annealed_length", annealed},
        {"dropped_groups", sol.dropped_groups},
        {"omitted_clusters", reps.omitted_clusters},
    };
    out.tsp = std::move(sol);
  } else {
    PlannerConfig pc = c.inforrt;
    pc.budget = c.budget;
    pc.seed = mix_seed(c.seed, 5);
    pc.sample_spacing = scene.sample_spacing;
    pc.time_budget_s = c.time_budget_s;
    InfoRrtResult res = plan_inforrt(*scene.env, pc, &ctx.env_samples);
    nlohmann::json cands = nlohmann::json::array();
    for (std::size_t s = 0; s < res.trees.size(); ++s) {
      const auto& root = res.trees[s].node(0).position;
      cands.push_back({{"start", s},
                       {"root", {root.easting, root.northing}},
                       {"tree_nodes", res.trees[s].size()},
                       {"length", res.candidates[s].length()},
                       {"score", res.scores[s]}});
    }
    out.planner_info = {{"candidates", cands}, {"selected", res.selected}};
    out.path = res.path;
    out.inforrt = std::move(res);
  }
  out.report = evaluate_path(out.path, ctx);
  return out;
}

BenchmarkResult benchmark_on_scene(const Scene& scene, const RunConfig& c) {
  if (c.transects < 1) throw ConfigError("transect count must be >= 1");
  const EvalContext ctx = scene.eval_context(c.env_samples, c.eval_seed);
  return benchmark_transects(ctx, c.budget, c.transects, mix_seed(c.eval_seed, 1));
}

nlohmann::json report_json(const PlanReport& r) {
  nlohmann::json j = {{"mpd", r.mpd}, {"msd", r.msd}, {"mc", r.mc}, {"d_m", r.d_m}, {"habitat_visits", nullptr}};
  if (r.habitat_visits) {
    nlohmann::json hv = nlohmann::json::object();
    for (const auto& [label, count] : *r.habitat_visits) hv[std::to_string(label)] = count;
    j["habitat_visits"] = hv;
  }
  return j;
}

nlohmann::json benchmark_json(const BenchmarkResult& b, bool with_transects) {
  nlohmann::json j = {
      {"n_requested", b.n_requested},
      {"n", b.transects.size()},
      {"seed", b.seed},
      {"mean_mpd", b.mean_mpd},
      {"mean_msd", b.mean_msd},
      {"mean_mc", b.mean_mc},
      {"mean_d_m", b.mean_d_m},
  };
  if (with_transects) {
    nlohmann::json ts = nlohmann::json::array();
    for (const auto& t : b.transects) {
      nlohmann::json tj = report_json(t.report);
      tj["start"] = {t.start.easting, t.start.northing};
      tj["end"] = {t.end.easting, t.end.northing};
      ts.push_back(std::move(tj));
    }
    j["transects"] = std::move(ts);
  }
  return j;
}

namespace {

void add_manifest(Artifacts& a, const std::string& digest) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : a.files) files.push_back(f.first);
  a.files.emplace_back("manifest.json", nlohmann::json{{"config_digest", digest}, {"files", files}}.dump(2) + "\n");
}

}  // namespace

Artifacts plan_artifacts(const Scene& scene, const PlanOutcome& outcome, const BenchmarkResult& benchmark,
                         const RunConfig& c) {
  const std::string digest = config_digest(c);
  const Environment& env = *scene.env;
  const BathyGrid& grid = env.grid();
  Artifacts a;

  a.files.emplace_back("path.csv", with_digest_comment(digest, render_to_string([&](std::ostream& o) {
                                                          write_path_csv(o, outcome.path);
                                                        })));
  a.files.emplace_back("path.geojson", render_to_string([&](std::ostream& o) {
                         write_path_geojson(o, outcome.path, "input grid frame (not reprojected)", digest);
                       }));

  nlohmann::json metrics = report_json(outcome.report);
  metrics["config_digest"] = digest;
  metrics["planner"] = planner_name(c.planner);
  metrics["seed"] = c.seed;
  metrics["budget"] = c.budget;
  metrics["benchmark"] = benchmark_json(benchmark, false);
  metrics["active_labels"] = scene.polygons.active_labels();
  metrics["clusters"] = scene.gmm.k;
  metrics["planner_info"] = outcome.planner_info;
  metrics["config"] = config_json(c);
  a.files.emplace_back("metrics.json", metrics.dump(2) + "\n");

  a.files.emplace_back("clusters.asc", render_to_string([&](std::ostream& o) {
                         write_cluster_raster(o, grid, env.field(), scene.clusters);
                       }));
  a.files.emplace_back("grid.asc", serialize_ascii_grid(grid));
  if (scene.labels)
    a.files.emplace_back("labels.asc", render_to_string([&](std::ostream& o) {
                           write_ascii_int_grid(o, grid.ncols(), grid.nrows(), grid.xllcorner(), grid.yllcorner(),
                                                grid.cellsize(), -9999, scene.labels->labels);
                         }));
  if (outcome.inforrt)
    for (std::size_t s = 0; s < outcome.inforrt->trees.size(); ++s)
      a.files.emplace_back("tree_" + std::to_string(s) + ".csv",
                           with_digest_comment(digest, render_to_string([&](std::ostream& o) {
                                                 write_tree_csv(o, outcome.inforrt->trees[s]);
                                               })));

  Image depth = render_depth(grid);
  overlay_path(depth, grid, outcome.path);
  std::vector<int> cell_labels(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    cell_labels[i] = scene.clusters.labels[env.site_at(grid.cell_center(grid.cell_at(i)))];
  Image clusters = render_labels(grid.ncols(), grid.nrows(), cell_labels);
  overlay_path(clusters, grid, outcome.path, {255, 255, 255});
  a.files.emplace_back("preview_depth.ppm", render_to_string([&](std::ostream& o) {
                         write_ppm(o, depth, "config_digest " + digest);
                       }));
  a.files.emplace_back("preview_clusters.ppm", render_to_string([&](std::ostream& o) {
                         write_ppm(o, clusters, "config_digest " + digest);
                       }));
  add_manifest(a, digest);
  return a;
}

Artifacts benchmark_artifacts(const BenchmarkResult& benchmark, const RunConfig& c) {
  const std::string digest = config_digest(c);
  nlohmann::json j = benchmark_json(benchmark, true);
  j["config_digest"] = digest;
  j["budget"] = c.budget;
  j["eval_seed"] = c.eval_seed;
  Artifacts a;
  a.files.emplace_back("benchmark.json", j.dump(2) + "\n");
  add_manifest(a, digest);
  return a;
}

void write_artifacts(const Artifacts& artifacts, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());
  for (const auto& [name, body] : artifacts.files) {
    const fs::path p = fs::path(out_dir) / name;
    std::ofstream out(p, std::ios::binary);
    out << body;
    if (!out) throw DataError("cannot write '" + p.string() + "'");
  }
}

}  // namespace bathyplan
