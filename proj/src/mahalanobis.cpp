#include "bathyplan/mahalanobis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bathyplan {

MahalanobisModel::MahalanobisModel(FeatureVector mean, Eigen::MatrixXd inv_cov, double ridge)
    : mean_(std::move(mean)), inv_cov_(std::move(inv_cov)), ridge_(ridge) {
  const auto d = mean_.size();
  if (inv_cov_.rows() != d || inv_cov_.cols() != d) throw std::invalid_argument("inverse covariance shape mismatch");
  const double scale = std::max(1.0, inv_cov_.cwiseAbs().maxCoeff());
  if ((inv_cov_ - inv_cov_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::invalid_argument("inverse covariance is not symmetric");
  inv_cov_ = 0.5 * (inv_cov_ + inv_cov_.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(inv_cov_);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("inverse covariance is not positive definite");
  // inv_cov = L L^T  =>  |L^T x|^2 = x^T inv_cov x
  whitening_ = llt.matrixL().transpose();
}

Eigen::MatrixXd MahalanobisModel::whiten_columns(const Eigen::MatrixXd& features) const {
  return whitening_ * (features.colwise() - mean_);
}

MahalanobisModel fit_mahalanobis(const Eigen::MatrixXd& features, std::optional<double> ridge) {
  const auto d = features.rows();
  const auto n = features.cols();
  if (d < 1) throw std::invalid_argument("features have dimension 0");
  if (n < d + 1)
    throw std::invalid_argument("need at least d+1 = " + std::to_string(d + 1) + " features, got " +
                                std::to_string(n));
  const FeatureVector mean = features.rowwise().mean();
  const Eigen::MatrixXd centered = features.colwise() - mean;
  Eigen::MatrixXd cov = (centered * centered.transpose()) / static_cast<double>(n - 1);
  const double eps = ridge.value_or(std::max(1e-6 * cov.trace() / static_cast<double>(d), 1e-12));
  if (!(eps >= 0.0)) throw std::invalid_argument("ridge must be >= 0");
  cov.diagonal().array() += eps;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("feature covariance is singular; use a positive ridge");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  inv = 0.5 * (inv + inv.transpose()).eval();
  return MahalanobisModel(mean, inv, eps);
}

MahalanobisModel fit_mahalanobis(std::span<const FeatureVector> features, std::optional<double> ridge) {
  if (features.empty()) throw std::invalid_argument("no features");
  Eigen::MatrixXd m(features.front().size(), static_cast<Eigen::Index>(features.size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != m.rows()) throw std::invalid_argument("feature dimension mismatch");
    m.col(static_cast<Eigen::Index>(i)) = features[i];
  }
  return fit_mahalanobis(m, ridge);
}

double mahalanobis(const MahalanobisModel& model, const FeatureVector& u, const FeatureVector& v) {
  if (u.size() != model.dim() || v.size() != model.dim())
    throw std::invalid_argument("feature dimension does not match the model");
  const FeatureVector diff = u - v;
  const double q = diff.dot(model.inv_cov() * diff);
  return std::sqrt(std::max(0.0, q));
}

double reward(const MahalanobisModel& model, const FeatureVector& u, std::span<const FeatureVector> set) {
  if (set.empty()) throw std::invalid_argument("reward needs a nonempty comparison set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : set) best = std::min(best, mahalanobis(model, u, v));
  return best;
}

}  // namespace bathyplan
