#include "bathyplan/inforrt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bathyplan/error.hpp"
#include "bathyplan/evaluation.hpp"
#include "bathyplan/kernels.hpp"

namespace bathyplan {

PlannerConfig PlannerConfig::resolved(double cellsize) const {
  PlannerConfig c = *this;
  if (c.step <= 0.0) c.step = 5.0 * cellsize;
  if (c.sample_spacing <= 0.0) c.sample_spacing = 2.0 * cellsize;
  if (!(c.budget > 0.0)) throw ConfigError("budget must be > 0");
  if (c.k_nearest < 1) throw ConfigError("k_nearest must be >= 1");
  if (c.iterations < 0) throw ConfigError("iterations must be >= 0");
  if (c.n_starts < 1) throw ConfigError("n_starts must be >= 1");
  if (!(c.goal_bias >= 0.0 && c.goal_bias <= 1.0)) throw ConfigError("goal_bias must lie in [0, 1]");
  if (c.aim_samples < 1) throw ConfigError("aim_samples must be >= 1");
  if (c.start_samples < 2) throw ConfigError("start_samples must be >= 2");
  if (c.time_budget_s && !(*c.time_budget_s > 0.0)) throw ConfigError("time budget must be > 0");
  return c;
}

InfoTree::InfoTree(const Environment& env, Position root, double sample_spacing)
    : env_(&env), spacing_(sample_spacing), features_(env.whitened().dim()) {
  TreeNode r;
  r.id = 0;
  r.position = root;
  r.site = env.site_at(root);
  r.edge_samples.push_back(r.site);
  nodes_.push_back(std::move(r));
  child_count_.push_back(0);
  features_.push_back(env.whitened().point(nodes_[0].site));
}

int InfoTree::grow(int parent, const Position& position) {
  const TreeNode& p = nodes_[static_cast<std::size_t>(parent)];
  TreeNode n;
  n.id = static_cast<int>(nodes_.size());
  n.position = position;
  n.parent = parent;
  const double len = distance(p.position, position);
  n.cost = p.cost + len;
  n.site = env_->site_at(position);
  // Arc-length samples k * spacing in (parent.cost, cost].
  for (auto k = static_cast<long>(std::floor(p.cost / spacing_)) + 1;; ++k) {
    const double s = static_cast<double>(k) * spacing_;
    if (s > n.cost) break;
    n.edge_samples.push_back(env_->site_at(lerp(p.position, position, (s - p.cost) / len)));
  }
  nodes_.push_back(std::move(n));
  child_count_.push_back(0);
  ++child_count_[static_cast<std::size_t>(parent)];
  features_.push_back(env_->whitened().point(nodes_.back().site));
  return nodes_.back().id;
}

double InfoTree::min_distance_to_path(const double* feature, int node) const {
  const auto& w = env_->whitened();
  double best = std::numeric_limits<double>::infinity();
  for (int cur = node; cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent)
    for (auto site : nodes_[static_cast<std::size_t>(cur)].edge_samples)
      best = std::min(best, squared_distance(feature, w.point(site), w.dim()));
  return std::sqrt(best);
}

Path InfoTree::path_to(int node) const {
  Path p;
  for (int cur = node; cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent)
    p.waypoints.push_back(nodes_[static_cast<std::size_t>(cur)].position);
  std::reverse(p.waypoints.begin(), p.waypoints.end());
  return p;
}

std::vector<int> InfoTree::leaves() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (child_count_[i] == 0) out.push_back(static_cast<int>(i));
  return out;
}

Position find_start(const Environment& env, int n, std::mt19937_64& rng, StartMode mode) {
  if (env.unblocked_cells().empty()) throw PlannerError("no operable cells for a start position");
  if (mode == StartMode::random) return env.sample_unblocked(rng);
  if (n < 2) throw std::invalid_argument("find_start needs at least 2 samples");
  std::vector<Position> samples;
  PointSet feats(env.whitened().dim());
  for (int i = 0; i < n; ++i) {
    samples.push_back(env.sample_unblocked(rng));
    feats.push_back(env.whitened_at(samples.back()));
  }
  const auto sums = distance_sums_serial(feats);
  std::size_t best = 0;
  for (std::size_t i = 1; i < sums.size(); ++i)
    if (sums[i] > sums[best]) best = i;
  return samples[best];
}

Position aim(const InfoTree& tree, const Environment& env, double goal_bias, int aim_samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) >= goal_bias) return env.sample_unblocked(rng);
  Position best_pos{};
  double best = -1.0;
  for (int i = 0; i < aim_samples; ++i) {
    const Position p = env.sample_unblocked(rng);
    const double r = min_distance(env.whitened_at(p), tree.features());
    if (r > best) {
      best = r;
      best_pos = p;
    }
  }
  return best_pos;
}

Position step_toward(const Position& from, const Position& target, double step) {
  const double d = distance(from, target);
  if (d <= step) return target;
  return lerp(from, target, step / d);
}

std::optional<int> select_node(const InfoTree& tree, const Environment& env, const Position& target, int k_nearest,
                               double step, double budget) {
  std::vector<std::pair<double, int>> by_dist;
  by_dist.reserve(tree.size());
  for (const auto& n : tree.nodes()) by_dist.emplace_back(distance(n.position, target), n.id);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(k_nearest), by_dist.size());
  std::partial_sort(by_dist.begin(), by_dist.begin() + static_cast<long>(k), by_dist.end());

  std::optional<int> best;
  double best_reward = -1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const TreeNode& n = tree.node(by_dist[i].second);
    if (n.cost + step > budget) continue;
    const Position landing = step_toward(n.position, target, step);
    const double* f = env.whitened_at(landing);
    const double r = std::min(min_distance(f, tree.features()), tree.min_distance_to_path(f, n.id));
    if (r > best_reward || (r == best_reward && best && n.id < *best)) {
      best_reward = r;
      best = n.id;
    }
  }
  return best;
}

std::optional<Position> steer(const BathyGrid& grid, const ObstacleMask& mask, const Position& from,
                              const Position& target, double step) {
  const Position end = step_toward(from, target, step);
  const double len = distance(from, end);
  const auto pieces = static_cast<int>(std::ceil(len / (0.5 * grid.cellsize())));
  for (int k = 0; k <= pieces; ++k) {
    const Position p = pieces ? lerp(from, end, static_cast<double>(k) / pieces) : end;
    if (mask.is_blocked(grid.cell_of(p))) return std::nullopt;
  }
  return end;
}

double score_path(const Path& path, const Environment& env, PathCriterion criterion, double sample_spacing,
                  const PointSet* env_samples) {
  const PointSet feats = path_features(env, densify(path, sample_spacing));
  if (criterion == PathCriterion::mpd) return pairwise_mean_distance_serial(feats);
  if (!env_samples || env_samples->empty()) throw std::invalid_argument("neg_msd scoring needs environment samples");
  return -mean_min_distance_serial(*env_samples, feats);
}

std::size_t evaluate_candidates(std::span<const Path> candidates, const Environment& env, PathCriterion criterion,
                                double sample_spacing, const PointSet* env_samples) {
  if (candidates.empty()) throw std::invalid_argument("no candidate paths to evaluate");
  std::size_t best = 0;
  double best_score = score_path(candidates[0], env, criterion, sample_spacing, env_samples);
  double best_len = candidates[0].length();
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double s = score_path(candidates[i], env, criterion, sample_spacing, env_samples);
    const double len = candidates[i].length();
    if (s > best_score || (s == best_score && len < best_len)) {
      best = i;
      best_score = s;
      best_len = len;
    }
  }
  return best;
}

namespace {

struct StartOutcome {
  InfoTree tree;
  Path best;
  double score;
};

StartOutcome run_start(const Environment& env, const PlannerConfig& cfg, int start, const PointSet* env_samples) {
  std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(start)));
  InfoTree tree(env, find_start(env, cfg.start_samples, rng, cfg.start_mode), cfg.sample_spacing);

  const auto began = std::chrono::steady_clock::now();
  for (int it = 0;; ++it) {
    if (cfg.time_budget_s) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - began;
      if (el.count() >= *cfg.time_budget_s) break;
    } else if (it >= cfg.iterations) {
      break;
    }
    const Position target = aim(tree, env, cfg.goal_bias, cfg.aim_samples, rng);
    const auto chosen = select_node(tree, env, target, cfg.k_nearest, cfg.step, cfg.budget);
    if (!chosen) continue;
    const Position from = tree.node(*chosen).position;
    const auto end = steer(env.grid(), env.mask(), from, target, cfg.step);
    if (!end || distance(from, *end) < 1e-9) continue;
    tree.grow(*chosen, *end);
  }

  // Best root->leaf path: highest score, then shortest, then lowest id.
  Path best_path;
  double best_score = -std::numeric_limits<double>::infinity();
  double best_len = 0.0;
  for (int leaf : tree.leaves()) {
    Path p = tree.path_to(leaf);
    const double s = score_path(p, env, cfg.criterion, cfg.sample_spacing, env_samples);
    const double len = tree.node(leaf).cost;
    if (s > best_score || (s == best_score && len < best_len)) {
      best_score = s;
      best_len = len;
      best_path = std::move(p);
    }
  }
  return {std::move(tree), std::move(best_path), best_score};
}

}  // namespace

InfoRrtResult plan_inforrt(const Environment& env, const PlannerConfig& config, const PointSet* env_samples) {
  const PlannerConfig cfg = config.resolved(env.grid().cellsize());
  if (cfg.criterion == PathCriterion::neg_msd && (!env_samples || env_samples->empty()))
    throw std::invalid_argument("neg_msd scoring needs environment samples");
  if (env.unblocked_cells().empty()) throw PlannerError("no operable cells for a start position");

  std::vector<std::optional<StartOutcome>> outcomes(static_cast<std::size_t>(cfg.n_starts));
#pragma omp parallel for schedule(dynamic, 1)
  for (int s = 0; s < cfg.n_starts; ++s) outcomes[static_cast<std::size_t>(s)] = run_start(env, cfg, s, env_samples);

  InfoRrtResult result;
  for (auto& o : outcomes) {
    result.trees.push_back(std::move(o->tree));
    result.candidates.push_back(std::move(o->best));
    result.scores.push_back(o->score);
  }
  result.selected = evaluate_candidates(result.candidates, env, cfg.criterion, cfg.sample_spacing, env_samples);
  result.path = result.candidates[result.selected];
  return result;
}

void write_tree_csv(std::ostream& out, const InfoTree& tree) {
  out << "child_id,parent_id,x,y,cost\n";
  for (const auto& n : tree.nodes())
    out << n.id << ',' << n.parent << ',' << format_double(n.position.easting) << ','
        << format_double(n.position.northing) << ',' << format_double(n.cost) << '\n';
}

}  // namespace bathyplan
