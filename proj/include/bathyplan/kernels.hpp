#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

// Distance kernels over whitened feature points, where Mahalanobis distance
// reduces to Euclidean distance. Each OpenMP kernel has a `_serial` twin kept
// as the reference; both accumulate per-row partials and reduce them in a
// fixed order, so their results are bit-identical for any thread count.

namespace bathyplan {

/// Contiguous set of points of a fixed dimension.
class PointSet {
public:
  explicit PointSet(int dim = 0) : dim_(dim) {}
  static PointSet from_columns(const Eigen::MatrixXd& m);

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ ? data_.size() / static_cast<std::size_t>(dim_) : 0; }
  bool empty() const { return data_.empty(); }
  const double* point(std::size_t i) const { return data_.data() + i * static_cast<std::size_t>(dim_); }
  void push_back(const double* p) { data_.insert(data_.end(), p, p + dim_); }
  void append(const PointSet& other) { data_.insert(data_.end(), other.data_.begin(), other.data_.end()); }
  void reserve(std::size_t n) { data_.reserve(n * static_cast<std::size_t>(dim_)); }

private:
  int dim_;
  std::vector<double> data_;
};

inline double squared_distance(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

/// Minimum distance from `u` to any point of `set`; +inf for an empty set.
double min_distance(const double* u, const PointSet& set);

/// (1/N^2) * sum_i sum_j |x_i - x_j|.
double pairwise_mean_distance(const PointSet& x);
double pairwise_mean_distance_serial(const PointSet& x);

/// (1/K) * sum_j min_i |x_i - y_j| over samples y and collected points x.
double mean_min_distance(const PointSet& samples, const PointSet& collected);
double mean_min_distance_serial(const PointSet& samples, const PointSet& collected);

/// out[i] = sum_j |x_i - x_j|.
std::vector<double> distance_sums(const PointSet& x);
std::vector<double> distance_sums_serial(const PointSet& x);

}  // namespace bathyplan
