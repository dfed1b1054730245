#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bathyplan/clustering.hpp"
#include "bathyplan/environment.hpp"
#include "bathyplan/evaluation.hpp"
#include "bathyplan/inforrt.hpp"
#include "bathyplan/tsp.hpp"

#include <json.hpp>

namespace bathyplan {

enum class PlannerKind { tsp, inforrt };

struct RunConfig {
  // Exactly one of these is set.
  std::string input;      // ESRI ASCII grid
  std::string synthetic;  // terrain spec (YAML or JSON)
  std::optional<std::uint64_t> terrain_seed;  // defaults to the spec's seed
  std::string features;   // optional external feature table

  EncoderKind encoder = EncoderKind::linear;
  int latent_dim = 8;
  int patch = 9;
  int stride = 3;
  std::size_t encoder_samples = 4000;

  int k = 8;
  bool bic = false;
  int gmm_restarts = 5;
  std::size_t min_area = 4;
  int per_component = 1;

  PlannerKind planner = PlannerKind::tsp;
  double budget = 2200.0;
  std::uint64_t seed = 0;
  int tsp_sweeps = 2000;
  PlannerConfig inforrt;  // budget and seed are filled from the fields above

  double depth_min = -std::numeric_limits<double>::infinity();
  double depth_max = std::numeric_limits<double>::infinity();

  /// Seeds environment samples and transects; shared across runs so M_SD is comparable.
  std::uint64_t eval_seed = 0;
  std::size_t env_samples = 1000;
  std::size_t transects = 100;
  double sample_spacing = 0.0;  // 0 = 2 * cellsize

  std::optional<double> time_budget_s;
  int jobs = 0;  // 0 = OpenMP default
  std::string out_dir = "out";
};

/// Canonical JSON of everything that affects results. Excludes jobs and out_dir.
nlohmann::json config_json(const RunConfig& config);
/// 16 hex digits of FNV-1a 64 over the canonical JSON.
std::string config_digest(const RunConfig& config);

/// Grid, features, metric and clusters shared by both planners and the benchmark.
struct Scene {
  std::optional<LabelMap> labels;  // ground truth for synthetic terrain
  std::unique_ptr<Environment> env;
  GmmModel gmm;
  ClusterMap clusters;
  ClusterPolygons polygons;
  double sample_spacing = 0.0;

  EvalContext eval_context(std::size_t env_samples, std::uint64_t eval_seed) const;
};

/// Loads or synthesizes the terrain and builds features and clusters.
/// Throws ConfigError, DataError, or PlannerError.
Scene prepare_scene(const RunConfig& config);

struct PlanOutcome {
  Path path;
  PlanReport report;
  nlohmann::json planner_info;
  std::optional<TspSolution> tsp;
  std::optional<InfoRrtResult> inforrt;
};

PlanOutcome plan_on_scene(const Scene& scene, const RunConfig& config);
BenchmarkResult benchmark_on_scene(const Scene& scene, const RunConfig& config);

nlohmann::json report_json(const PlanReport& report);
nlohmann::json benchmark_json(const BenchmarkResult& result, bool with_transects);

/// Everything `plan` writes, rendered in memory before touching the disk.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

Artifacts plan_artifacts(const Scene& scene, const PlanOutcome& outcome, const BenchmarkResult& benchmark,
                         const RunConfig& config);
Artifacts benchmark_artifacts(const BenchmarkResult& benchmark, const RunConfig& config);

/// Creates the directory and writes every file. Throws DataError on I/O failure.
void write_artifacts(const Artifacts& artifacts, const std::string& out_dir);

}  // namespace bathyplan
