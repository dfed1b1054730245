#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "bathyplan/environment.hpp"
#include "bathyplan/path.hpp"

namespace bathyplan {

enum class StartMode { informative, random };
enum class PathCriterion { mpd, neg_msd };

struct PlannerConfig {
  double budget = 0.0;         // meters
  double step = 0.0;           // meters; 0 = 5 * cellsize
  int k_nearest = 5;
  int iterations = 400;        // per start
  int n_starts = 4;
  double goal_bias = 0.5;      // probability of an informed aim
  int aim_samples = 100;
  int start_samples = 100;
  double sample_spacing = 0.0; // meters; 0 = 2 * cellsize
  std::uint64_t seed = 0;
  StartMode start_mode = StartMode::informative;
  PathCriterion criterion = PathCriterion::mpd;
  /// Replaces `iterations` with a wall-clock cap per start when set.
  std::optional<double> time_budget_s;

  /// Fills the cellsize-relative defaults and validates. Throws ConfigError.
  PlannerConfig resolved(double cellsize) const;
};

struct TreeNode {
  int id = 0;
  Position position;
  int parent = -1;
  double cost = 0.0;  // path length from the root
  std::size_t site = 0;  // feature site at `position`
  /// Feature sites sampled every sample_spacing of arc length on the edge
  /// from the parent (the root holds its own site).
  std::vector<std::size_t> edge_samples;
};

/// Growing information tree for one start.
class InfoTree {
public:
  InfoTree(const Environment& env, Position root, double sample_spacing);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }
  /// Whitened features of all node positions.
  const PointSet& features() const { return features_; }

  /// Appends a child of `parent` at `position`; returns its id.
  int grow(int parent, const Position& position);

  /// Min distance from a whitened feature to the root->node path samples.
  double min_distance_to_path(const double* feature, int node) const;

  Path path_to(int node) const;
  std::vector<int> leaves() const;

private:
  const Environment* env_;
  double spacing_;
  std::vector<TreeNode> nodes_;
  std::vector<int> child_count_;
  PointSet features_;
};

/// Samples `n` operable positions and returns the one whose feature has the
/// largest summed distance to the others (first sample wins ties).
Position find_start(const Environment& env, int n, std::mt19937_64& rng, StartMode mode = StartMode::informative);

/// Uniform operable position with probability 1 - goal_bias; otherwise the best
/// of `aim_samples` operable positions by min-distance reward against the tree.
Position aim(const InfoTree& tree, const Environment& env, double goal_bias, int aim_samples, std::mt19937_64& rng);

/// Point at most `step` from `from` toward `target`.
Position step_toward(const Position& from, const Position& target, double step);

/// Among the k spatially nearest nodes with cost + step <= budget, the node
/// whose step toward `target` lands on the most novel feature, measured
/// against its own path samples plus every tree node. Ties go to the lowest id.
std::optional<int> select_node(const InfoTree& tree, const Environment& env, const Position& target, int k_nearest,
                               double step, double budget);

/// Step-limited endpoint, or nullopt when the segment crosses a blocked cell
/// (checked every cellsize / 2).
std::optional<Position> steer(const BathyGrid& grid, const ObstacleMask& mask, const Position& from,
                              const Position& target, double step);

/// Score of one path under the configured criterion; higher is better.
double score_path(const Path& path, const Environment& env, PathCriterion criterion, double sample_spacing,
                  const PointSet* env_samples);

/// Index of the best candidate: highest score, then shortest, then lowest index.
std::size_t evaluate_candidates(std::span<const Path> candidates, const Environment& env, PathCriterion criterion,
                                double sample_spacing, const PointSet* env_samples);

struct InfoRrtResult {
  std::vector<InfoTree> trees;
  std::vector<Path> candidates;  // best root->leaf path per start
  std::vector<double> scores;
  std::size_t selected = 0;
  Path path;
};

/// Runs every start, keeps each tree's best leaf path, then picks the best
/// candidate. `env_samples` is required for the neg_msd criterion.
InfoRrtResult plan_inforrt(const Environment& env, const PlannerConfig& config,
                           const PointSet* env_samples = nullptr);

/// `child_id,parent_id,x,y,cost`; the root has parent_id -1.
void write_tree_csv(std::ostream& out, const InfoTree& tree);

}  // namespace bathyplan
