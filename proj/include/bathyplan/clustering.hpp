#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "bathyplan/features.hpp"

namespace bathyplan {

struct GmmOptions {
  int k = 8;
  std::uint64_t seed = 0;
  int max_iter = 200;
  /// Stop when the relative change of the EM objective drops below tol.
  double tol = 1e-6;
  int n_init = 5;
  /// Covariance prior strength as a fraction of trace(global covariance) / d.
  double ridge_scale = 1e-6;
};

/// Gaussian mixture with full covariances.
///
/// EM maximizes the log-likelihood plus a weak covariance prior
/// -lambda/2 * tr(Sigma_k^-1) per component, which turns the M-step covariance
/// into S_k + (lambda / N_k) I. `objective_trace` holds that penalized
/// objective after each E-step and is nondecreasing by construction.
struct GmmModel {
  int k = 0;
  int d = 0;
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  double lambda = 0.0;

  std::vector<double> objective_trace;
  std::vector<double> log_likelihood_trace;
  /// EM iterations (indices into the traces) right after an empty component was reseeded.
  std::vector<int> reseed_iterations;
  bool converged = false;
  int restart = 0;

  double log_likelihood() const { return log_likelihood_trace.empty() ? 0.0 : log_likelihood_trace.back(); }
  int parameter_count() const { return (k - 1) + k * d + k * d * (d + 1) / 2; }
  double bic(std::size_t n) const;
};

/// Columns of `x` are points. Requires more than k*(d+1) points.
/// Best of `n_init` k-means++-seeded restarts by final log-likelihood.
GmmModel fit_gmm(const Eigen::MatrixXd& x, const GmmOptions& options);

/// Fits K in [k_min, k_max] and returns the model with minimal BIC.
GmmModel fit_gmm_bic(const Eigen::MatrixXd& x, const GmmOptions& options, int k_min = 2, int k_max = 12);

/// Per-point log densities log(w_k) + log N(x | mu_k, Sigma_k), k x n.
Eigen::MatrixXd component_log_densities(const GmmModel& model, const Eigen::MatrixXd& x);
Eigen::MatrixXd component_log_densities_serial(const GmmModel& model, const Eigen::MatrixXd& x);

double gmm_log_likelihood(const GmmModel& model, const Eigen::MatrixXd& x);

struct ClusterMap {
  int k = 0;
  std::vector<int> labels;  // aligned with FeatureField sites
};

/// Label = argmax posterior responsibility, ties to the lowest component index.
ClusterMap assign_clusters(const GmmModel& model, const Eigen::MatrixXd& x);

struct ClusterComponent {
  int cluster = 0;
  std::vector<std::size_t> sites;  // ascending site indices
  bool ignored = false;

  std::size_t area() const { return sites.size(); }
};

/// 4-connected single-label components on the feature lattice ("polygons").
struct ClusterPolygons {
  int k = 0;
  std::vector<ClusterComponent> components;  // ordered by their first site
  std::size_t ignored_sites = 0;

  /// Labels with at least one non-ignored component, ascending.
  std::vector<int> active_labels() const;
};

ClusterPolygons polygonize(const FeatureField& field, const ClusterMap& map, std::size_t min_area);

struct RepresentativeNode {
  int cluster = 0;
  int component = 0;
  std::size_t site = 0;
  Position position;
};

struct RepresentativeSet {
  std::vector<RepresentativeNode> nodes;
  /// Clusters present on the map whose components were all ignored.
  std::vector<int> omitted_clusters;
};

RepresentativeSet representative_points(const ClusterPolygons& polys, const FeatureField& field,
                                        int per_component, std::uint64_t seed);

/// Writes the cluster map as an integer ESRI grid decimated to the lattice.
void write_cluster_raster(std::ostream& out, const BathyGrid& grid, const FeatureField& field,
                          const ClusterMap& map);

}  // namespace bathyplan
