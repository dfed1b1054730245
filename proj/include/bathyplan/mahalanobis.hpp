#pragma once

#include <optional>
#include <span>

#include "bathyplan/features.hpp"

namespace bathyplan {

/// Environment-wide covariance model for feature-space distances.
///
/// Distances use the inverse of (sample covariance + ridge * I). The whitening
/// matrix W satisfies W^T W = inv_cov, so D(u, v) = |W (u - v)|.
class MahalanobisModel {
public:
  MahalanobisModel() = default;
  /// Throws std::invalid_argument unless inv_cov is symmetric positive definite.
  MahalanobisModel(FeatureVector mean, Eigen::MatrixXd inv_cov, double ridge = 0.0);

  int dim() const { return static_cast<int>(mean_.size()); }
  const FeatureVector& mean() const { return mean_; }
  const Eigen::MatrixXd& inv_cov() const { return inv_cov_; }
  const Eigen::MatrixXd& whitening() const { return whitening_; }
  double ridge() const { return ridge_; }

  FeatureVector whiten(const FeatureVector& u) const { return whitening_ * (u - mean_); }
  /// Whitens every column of a dim x n matrix.
  Eigen::MatrixXd whiten_columns(const Eigen::MatrixXd& features) const;

private:
  FeatureVector mean_;
  Eigen::MatrixXd inv_cov_;
  Eigen::MatrixXd whitening_;
  double ridge_ = 0.0;
};

/// Columns of `features` are samples. The ridge defaults to 1e-6 * trace(cov) / d
/// (floored at 1e-12). The covariance uses the n - 1 normalization.
MahalanobisModel fit_mahalanobis(const Eigen::MatrixXd& features, std::optional<double> ridge = std::nullopt);
MahalanobisModel fit_mahalanobis(std::span<const FeatureVector> features, std::optional<double> ridge = std::nullopt);

/// sqrt((u - v)^T V^-1 (u - v)), evaluated as a direct quadratic form.
double mahalanobis(const MahalanobisModel& model, const FeatureVector& u, const FeatureVector& v);

/// Minimum Mahalanobis distance from u to the members of `set`.
/// Throws std::invalid_argument for an empty set.
double reward(const MahalanobisModel& model, const FeatureVector& u, std::span<const FeatureVector> set);

}  // namespace bathyplan
