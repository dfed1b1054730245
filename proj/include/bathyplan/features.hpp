#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "bathyplan/grid.hpp"

namespace bathyplan {

using FeatureVector = Eigen::VectorXd;

enum class EncoderKind { geometric, linear };

/// Maps a bathymetry patch to a feature vector.
///
/// `geometric` yields the 4-vector (mean depth, slope, sin(aspect), rugosity).
/// `linear` is the MSE-optimal linear encoder: an orthonormal projection onto
/// the top principal directions of centered, flattened training patches.
class Encoder {
public:
  static Encoder geometric(int patch_size, double cellsize);
  static Encoder linear(int patch_size, Eigen::VectorXd mean, Eigen::MatrixXd projection,
                        Eigen::VectorXd eigenvalues, double total_variance);

  EncoderKind kind() const { return kind_; }
  int patch_size() const { return patch_size_; }
  int dim() const { return kind_ == EncoderKind::geometric ? 4 : static_cast<int>(projection_.rows()); }
  int input_dim() const { return patch_size_ * patch_size_; }

  /// Throws std::invalid_argument when the patch size does not match.
  FeatureVector encode(const Patch& patch) const;

  // Linear kind only.
  const Eigen::VectorXd& mean() const { return mean_; }
  /// d x input_dim, orthonormal rows.
  const Eigen::MatrixXd& projection() const { return projection_; }
  /// Eigenvalues of the training covariance, descending (all of them, not only the kept ones).
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double total_variance() const { return total_variance_; }
  /// Mean per-sample squared reconstruction error predicted from the spectrum.
  double predicted_mse() const;
  Eigen::VectorXd reconstruct(const FeatureVector& z) const;

private:
  EncoderKind kind_ = EncoderKind::geometric;
  int patch_size_ = 0;
  double cellsize_ = 1.0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd projection_;
  Eigen::VectorXd eigenvalues_;
  double total_variance_ = 0.0;
};

/// Plane-fit descriptors of a patch.
///
/// The plane z = a + b*east + c*north is fit by least squares with cell offsets
/// scaled by `cellsize`. slope = |(b, c)|; aspect is the compass azimuth
/// (clockwise from north) of the downhill direction, and only its sine is
/// kept. Rugosity is the population standard deviation of the residuals.
/// A flat patch gives slope 0, sin(aspect) 0, rugosity 0.
FeatureVector geometric_features(const Patch& patch, double cellsize);

/// Reconstruction MSE is reported per sample: mean of ||x - x_hat||^2.
/// Throws DataError when the centered samples have rank < d.
Encoder fit_linear_encoder(std::span<const Patch> samples, int d);

/// Uniformly sampled valid patches (rejection sampling over centers).
std::vector<Patch> sample_patches(const BathyGrid& grid, int size, std::size_t count, std::uint64_t seed);

/// Per-site features on a stride lattice of patch centers.
///
/// Lattice site (i, j) sits at grid cell origin + (i, j) * stride. Sites whose
/// patch was rejected are absent; the site list is sorted row-major.
struct FeatureField {
  int stride = 1;
  int patch_size = 1;
  Cell origin;
  int lattice_rows = 0;
  int lattice_cols = 0;
  std::vector<Cell> sites;
  std::vector<Position> positions;
  std::vector<int> lattice;  // lattice_rows * lattice_cols, site index or -1
  Eigen::MatrixXd features;  // dim x size, one column per site

  std::size_t size() const { return sites.size(); }
  int dim() const { return static_cast<int>(features.rows()); }
  FeatureVector feature(std::size_t site) const { return features.col(static_cast<Eigen::Index>(site)); }
  int site_at(int lattice_row, int lattice_col) const;

  /// Site closest to `p` in world distance; ties go to the lower site index.
  std::size_t nearest_site(const BathyGrid& grid, const Position& p) const;
};

/// Parallel over lattice rows; identical output to build_feature_field_serial.
FeatureField build_feature_field(const BathyGrid& grid, const Encoder& encoder, int stride);
FeatureField build_feature_field_serial(const BathyGrid& grid, const Encoder& encoder, int stride);

/// Columnar text: comment header, then `row,col,easting,northing,f0..f{d-1}`.
void write_feature_field(std::ostream& out, const FeatureField& field);
/// Reads an externally produced feature table aligned with `grid`.
FeatureField read_feature_field(std::istream& in, const BathyGrid& grid);

}  // namespace bathyplan
