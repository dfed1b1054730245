#include "bathyplan/evaluation.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "bathyplan/error.hpp"
#include "bathyplan/kernels.hpp"

namespace bathyplan {

namespace {

PointSet whiten_list(std::span<const FeatureVector> features, const MahalanobisModel& model) {
  PointSet out(model.dim());
  out.reserve(features.size());
  for (const auto& f : features) {
    if (f.size() != model.dim()) throw std::invalid_argument("feature dimension does not match the model");
    const FeatureVector w = model.whiten(f);
    out.push_back(w.data());
  }
  return out;
}

}  // namespace

double mpd(std::span<const FeatureVector> path_features, const MahalanobisModel& model) {
  if (path_features.empty()) throw std::invalid_argument("mpd needs at least one feature");
  return pairwise_mean_distance(whiten_list(path_features, model));
}

double msd(std::span<const FeatureVector> path_features, std::span<const FeatureVector> env_samples,
           const MahalanobisModel& model) {
  if (path_features.empty() || env_samples.empty()) throw std::invalid_argument("msd needs nonempty feature sets");
  return mean_min_distance(whiten_list(env_samples, model), whiten_list(path_features, model));
}

double mc(const Path& densified, const Environment& env, const ClusterMap& clusters,
          const std::vector<int>& active_labels) {
  if (active_labels.empty()) return 0.0;
  const std::set<int> active(active_labels.begin(), active_labels.end());
  std::set<int> visited;
  for (const auto& w : densified.waypoints) {
    const int label = clusters.labels[env.site_at(w)];
    if (active.count(label)) visited.insert(label);
  }
  return static_cast<double>(visited.size()) / static_cast<double>(active.size());
}

std::map<int, std::size_t> habitat_visits(const Path& path, const BathyGrid& grid, const LabelMap& labels,
                                          double sample_spacing) {
  std::map<int, std::size_t> counts;
  for (int l = 0; l < labels.num_labels; ++l) counts[l] = 0;
  for (const auto& w : densify(path, sample_spacing).waypoints) {
    const Cell c = grid.cell_of(w);
    if (!grid.contains(c)) continue;
    const int l = labels.at(c);
    if (l >= 0) ++counts[l];
  }
  return counts;
}

PointSet path_features(const Environment& env, const Path& densified) {
  PointSet out(env.whitened().dim());
  out.reserve(densified.waypoints.size());
  for (const auto& w : densified.waypoints) out.push_back(env.whitened_at(w));
  return out;
}

PointSet environment_samples(const Environment& env, std::size_t count, std::uint64_t seed) {
  const auto& pool = env.unblocked_sites();
  if (pool.empty()) throw PlannerError("no operable feature sites to sample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  PointSet out(env.whitened().dim());
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(env.whitened().point(pool[pick(rng)]));
  return out;
}

PlanReport evaluate_path(const Path& path, const EvalContext& ctx) {
  if (path.empty()) throw std::invalid_argument("cannot evaluate an empty path");
  const Path dense = densify(path, ctx.sample_spacing);
  const PointSet feats = path_features(*ctx.env, dense);
  PlanReport r;
  r.mpd = pairwise_mean_distance(feats);
  r.msd = mean_min_distance(ctx.env_samples, feats);
  r.mc = ctx.clusters ? mc(dense, *ctx.env, *ctx.clusters, ctx.active_labels) : 0.0;
  r.d_m = path.length();
  if (ctx.labels) r.habitat_visits = habitat_visits(path, ctx.env->grid(), *ctx.labels, ctx.sample_spacing);
  return r;
}

Position clip_to_extent(const BathyGrid& grid, const Position& start, double heading, double length) {
  const double dx = std::cos(heading), dy = std::sin(heading);
  double t = length;
  const double x0 = grid.xllcorner(), x1 = grid.xllcorner() + grid.width_m();
  const double y0 = grid.yllcorner(), y1 = grid.yllcorner() + grid.height_m();
  if (dx > 0) t = std::min(t, (x1 - start.easting) / dx);
  if (dx < 0) t = std::min(t, (x0 - start.easting) / dx);
  if (dy > 0) t = std::min(t, (y1 - start.northing) / dy);
  if (dy < 0) t = std::min(t, (y0 - start.northing) / dy);
  t = std::max(t, 0.0);
  return {start.easting + t * dx, start.northing + t * dy};
}

BenchmarkResult benchmark_transects(const EvalContext& ctx, double budget, std::size_t n, std::uint64_t seed) {
  if (!(budget > 0.0)) throw std::invalid_argument("benchmark budget must be > 0");
  const auto& grid = ctx.env->grid();
  std::vector<std::optional<TransectRecord>> slots(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> ux(grid.xllcorner(), grid.xllcorner() + grid.width_m());
    std::uniform_real_distribution<double> uy(grid.yllcorner(), grid.yllcorner() + grid.height_m());
    std::uniform_real_distribution<double> uh(0.0, 2.0 * std::numbers::pi);
    for (int attempt = 0; attempt < 50; ++attempt) {
      const Position start{ux(rng), uy(rng)};
      const double heading = uh(rng);
      if (ctx.env->blocked(start)) continue;
      TransectRecord rec;
      rec.start = start;
      rec.end = clip_to_extent(grid, start, heading, budget);
      rec.report = evaluate_path(Path{{rec.start, rec.end}}, ctx);
      slots[static_cast<std::size_t>(i)] = rec;
      break;
    }
  }

  BenchmarkResult out;
  out.n_requested = n;
  out.seed = seed;
  for (auto& s : slots)
    if (s) out.transects.push_back(*s);
  if (out.transects.empty()) throw PlannerError("could not place any benchmark transect");
  for (const auto& t : out.transects) {
    out.mean_mpd += t.report.mpd;
    out.mean_msd += t.report.msd;
    out.mean_mc += t.report.mc;
    out.mean_d_m += t.report.d_m;
  }
  const auto m = static_cast<double>(out.transects.size());
  out.mean_mpd /= m;
  out.mean_msd /= m;
  out.mean_mc /= m;
  out.mean_d_m /= m;
  return out;
}

}  // namespace bathyplan
