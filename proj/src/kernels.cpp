#include "bathyplan/kernels.hpp"

#include <cmath>
#include <limits>

namespace bathyplan {

PointSet PointSet::from_columns(const Eigen::MatrixXd& m) {
  PointSet s(static_cast<int>(m.rows()));
  s.data_.assign(m.data(), m.data() + m.size());
  return s;
}

double min_distance(const double* u, const PointSet& set) {
  double best = std::numeric_limits<double>::infinity();
  const int d = set.dim();
  for (std::size_t i = 0; i < set.size(); ++i) best = std::min(best, squared_distance(u, set.point(i), d));
  return std::sqrt(best);
}

namespace {

// Sum over j > i of |x_i - x_j|.
double upper_row_sum(const PointSet& x, std::size_t i) {
  double s = 0.0;
  const double* xi = x.point(i);
  for (std::size_t j = i + 1; j < x.size(); ++j) s += std::sqrt(squared_distance(xi, x.point(j), x.dim()));
  return s;
}

double finish_pairwise(const std::vector<double>& rows, std::size_t n) {
  double total = 0.0;
  for (double r : rows) total += r;
  const double nn = static_cast<double>(n);
  return 2.0 * total / (nn * nn);
}

double finish_mean(const std::vector<double>& v) {
  double total = 0.0;
  for (double r : v) total += r;
  return total / static_cast<double>(v.size());
}

}  // namespace

double pairwise_mean_distance(const PointSet& x) {
  const auto n = static_cast<long>(x.size());
  if (n == 0) return 0.0;
  std::vector<double> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = upper_row_sum(x, static_cast<std::size_t>(i));
  return finish_pairwise(rows, x.size());
}

double pairwise_mean_distance_serial(const PointSet& x) {
  if (x.empty()) return 0.0;
  std::vector<double> rows(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) rows[i] = upper_row_sum(x, i);
  return finish_pairwise(rows, x.size());
}

double mean_min_distance(const PointSet& samples, const PointSet& collected) {
  const auto k = static_cast<long>(samples.size());
  if (k == 0) return 0.0;
  std::vector<double> mins(static_cast<std::size_t>(k));
#pragma omp parallel for schedule(static)
  for (long j = 0; j < k; ++j)
    mins[static_cast<std::size_t>(j)] = min_distance(samples.point(static_cast<std::size_t>(j)), collected);
  return finish_mean(mins);
}

double mean_min_distance_serial(const PointSet& samples, const PointSet& collected) {
  if (samples.empty()) return 0.0;
  std::vector<double> mins(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) mins[j] = min_distance(samples.point(j), collected);
  return finish_mean(mins);
}

std::vector<double> distance_sums(const PointSet& x) {
  const auto n = static_cast<long>(x.size());
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double s = 0.0;
    const double* xi = x.point(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < x.size(); ++j) s += std::sqrt(squared_distance(xi, x.point(j), x.dim()));
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

std::vector<double> distance_sums_serial(const PointSet& x) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += std::sqrt(squared_distance(x.point(i), x.point(j), x.dim()));
    out[i] = s;
  }
  return out;
}

}  // namespace bathyplan
