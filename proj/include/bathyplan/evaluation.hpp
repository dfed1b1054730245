#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bathyplan/clustering.hpp"
#include "bathyplan/environment.hpp"
#include "bathyplan/path.hpp"

namespace bathyplan {

/// Mean pairwise Mahalanobis distance, (1/N^2) sum_i sum_j D(x_i, x_j).
/// The zero diagonal is part of the average. Throws for an empty list.
double mpd(std::span<const FeatureVector> path_features, const MahalanobisModel& model);

/// Mean over environment samples of the distance to the closest path feature.
double msd(std::span<const FeatureVector> path_features, std::span<const FeatureVector> env_samples,
           const MahalanobisModel& model);

/// Fraction of active cluster labels seen at the sites nearest the path's waypoints.
double mc(const Path& densified, const Environment& env, const ClusterMap& clusters,
          const std::vector<int>& active_labels);

/// Number of densified waypoints falling on each ground-truth label.
std::map<int, std::size_t> habitat_visits(const Path& path, const BathyGrid& grid, const LabelMap& labels,
                                          double sample_spacing);

/// Whitened features of the sites nearest each waypoint.
PointSet path_features(const Environment& env, const Path& densified);

/// `count` whitened site features drawn uniformly (with replacement) from operable sites.
PointSet environment_samples(const Environment& env, std::size_t count, std::uint64_t seed);

struct EvalContext {
  const Environment* env = nullptr;
  const ClusterMap* clusters = nullptr;
  std::vector<int> active_labels;
  PointSet env_samples;
  double sample_spacing = 1.0;
  const LabelMap* labels = nullptr;  // synthetic ground truth, optional
};

struct PlanReport {
  double mpd = 0.0;
  double msd = 0.0;
  double mc = 0.0;
  double d_m = 0.0;
  std::optional<std::map<int, std::size_t>> habitat_visits;
};

PlanReport evaluate_path(const Path& path, const EvalContext& ctx);

struct TransectRecord {
  Position start;
  Position end;
  PlanReport report;
};

struct BenchmarkResult {
  std::vector<TransectRecord> transects;
  double mean_mpd = 0.0;
  double mean_msd = 0.0;
  double mean_mc = 0.0;
  double mean_d_m = 0.0;
  std::size_t n_requested = 0;
  std::uint64_t seed = 0;
};

/// Straight random transects of length `budget` clipped to the grid extent.
/// Each start is drawn uniformly over the extent and redrawn (up to 50 times)
/// while it falls on a blocked cell; transects that never find a start are
/// dropped. Throws PlannerError when no transect could be placed.
BenchmarkResult benchmark_transects(const EvalContext& ctx, double budget, std::size_t n, std::uint64_t seed);

/// Clips the segment start + t * heading, t in [0, length], to the grid extent.
Position clip_to_extent(const BathyGrid& grid, const Position& start, double heading, double length);

}  // namespace bathyplan
