#pragma once

#include <random>
#include <vector>

#include "bathyplan/features.hpp"
#include "bathyplan/grid.hpp"
#include "bathyplan/kernels.hpp"
#include "bathyplan/mahalanobis.hpp"

namespace bathyplan {

/// Everything a planner may query: terrain, operability, features, metric.
///
/// The feature at a world position is the feature of the nearest lattice site.
class Environment {
public:
  /// Throws PlannerError when the mask leaves no operable cell.
  Environment(BathyGrid grid, ObstacleMask mask, FeatureField field, MahalanobisModel model);

  const BathyGrid& grid() const { return grid_; }
  const ObstacleMask& mask() const { return mask_; }
  const FeatureField& field() const { return field_; }
  const MahalanobisModel& model() const { return model_; }
  /// Whitened feature of every site, same order as field().sites.
  const PointSet& whitened() const { return whitened_; }

  std::size_t site_at(const Position& p) const { return field_.nearest_site(grid_, p); }
  const double* whitened_at(const Position& p) const { return whitened_.point(site_at(p)); }
  FeatureVector feature_at(const Position& p) const { return field_.feature(site_at(p)); }

  bool blocked(const Position& p) const { return mask_.is_blocked(grid_.cell_of(p)); }
  const std::vector<std::size_t>& unblocked_cells() const { return unblocked_; }

  /// Center of a uniformly drawn unblocked cell.
  template <typename Rng>
  Position sample_unblocked(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, unblocked_.size() - 1);
    return grid_.cell_center(grid_.cell_at(unblocked_[pick(rng)]));
  }

  /// Sites whose own cell is operable.
  const std::vector<std::size_t>& unblocked_sites() const { return unblocked_sites_; }

private:
  BathyGrid grid_;
  ObstacleMask mask_;
  FeatureField field_;
  MahalanobisModel model_;
  PointSet whitened_;
  std::vector<std::size_t> unblocked_;
  std::vector<std::size_t> unblocked_sites_;
};

}  // namespace bathyplan
