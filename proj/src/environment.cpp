#include "bathyplan/environment.hpp"

#include "bathyplan/error.hpp"

namespace bathyplan {

Environment::Environment(BathyGrid grid, ObstacleMask mask, FeatureField field, MahalanobisModel model)
    : grid_(std::move(grid)), mask_(std::move(mask)), field_(std::move(field)), model_(std::move(model)) {
  if (mask_.ncols != grid_.ncols() || mask_.nrows != grid_.nrows())
    throw std::invalid_argument("obstacle mask does not match the grid");
  if (field_.dim() != model_.dim()) throw std::invalid_argument("feature field does not match the metric model");
  if (field_.size() == 0) throw DataError("empty feature field");
  whitened_ = PointSet::from_columns(model_.whiten_columns(field_.features));
  for (std::size_t i = 0; i < mask_.blocked.size(); ++i)
    if (!mask_.blocked[i]) unblocked_.push_back(i);
  if (unblocked_.empty()) throw PlannerError("no operable cells in the environment");
  for (std::size_t s = 0; s < field_.size(); ++s)
    if (!mask_.is_blocked(field_.sites[s])) unblocked_sites_.push_back(s);
}

}  // namespace bathyplan
