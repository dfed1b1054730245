#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bathyplan/geometry.hpp"

namespace bathyplan {

/// Georeferenced depth raster, ESRI ASCII grid layout.
///
/// Depths are stored row-major with row 0 the northernmost row. A cell is
/// valid iff its value is finite and differs from `nodata_value`.
class BathyGrid {
public:
  BathyGrid() = default;
  BathyGrid(int ncols, int nrows, double xllcorner, double yllcorner, double cellsize,
            double nodata_value, std::vector<double> depths);

  int ncols() const { return ncols_; }
  int nrows() const { return nrows_; }
  double xllcorner() const { return xllcorner_; }
  double yllcorner() const { return yllcorner_; }
  double cellsize() const { return cellsize_; }
  double nodata_value() const { return nodata_; }
  std::size_t size() const { return depths_.size(); }
  const std::vector<double>& depths() const { return depths_; }

  double width_m() const { return ncols_ * cellsize_; }
  double height_m() const { return nrows_ * cellsize_; }

  bool contains(Cell c) const { return c.row >= 0 && c.row < nrows_ && c.col >= 0 && c.col < ncols_; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * ncols_ + c.col; }
  Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index / ncols_), static_cast<int>(index % ncols_)};
  }

  double depth(Cell c) const { return depths_[index(c)]; }
  bool valid(Cell c) const;
  bool valid(std::size_t index) const;
  std::size_t valid_count() const;

  /// Cell center in world coordinates. All cell->world conversions go through here.
  Position cell_center(Cell c) const;
  /// Cell containing a world position; may lie outside the grid.
  Cell cell_of(const Position& p) const;
  bool inside_extent(const Position& p) const;

private:
  int ncols_ = 0;
  int nrows_ = 0;
  double xllcorner_ = 0.0;
  double yllcorner_ = 0.0;
  double cellsize_ = 1.0;
  double nodata_ = -9999.0;
  std::vector<double> depths_;
};

/// Square window of valid depths around a center cell.
struct Patch {
  Cell center;
  int size = 0;
  std::vector<double> values;  // row-major, size*size
};

/// Cells the vehicle may not enter.
struct ObstacleMask {
  int ncols = 0;
  int nrows = 0;
  std::vector<std::uint8_t> blocked;

  bool is_blocked(Cell c) const {
    return c.row < 0 || c.row >= nrows || c.col < 0 || c.col >= ncols ||
           blocked[static_cast<std::size_t>(c.row) * ncols + c.col] != 0;
  }
  std::size_t unblocked_count() const;
};

/// Ground-truth habitat labels for synthetic terrain. -1 marks unlabeled (nodata) cells.
struct LabelMap {
  int ncols = 0;
  int nrows = 0;
  int num_labels = 0;
  std::vector<int> labels;

  int at(Cell c) const { return labels[static_cast<std::size_t>(c.row) * ncols + c.col]; }
};

BathyGrid parse_ascii_grid(std::istream& in);
BathyGrid parse_ascii_grid(const std::string& text);
BathyGrid load_ascii_grid(const std::string& path);

/// Writes the grid with shortest round-trip decimal formatting.
void write_ascii_grid(std::ostream& out, const BathyGrid& grid);
std::string serialize_ascii_grid(const BathyGrid& grid);

/// Integer-valued raster in ESRI ASCII layout (used for cluster and label maps).
void write_ascii_int_grid(std::ostream& out, int ncols, int nrows, double xllcorner,
                          double yllcorner, double cellsize, int nodata,
                          const std::vector<int>& values);

/// Returns nullopt when the window leaves the grid or touches a no-data cell.
/// Throws std::invalid_argument for an even or non-positive size.
std::optional<Patch> extract_patch(const BathyGrid& grid, Cell center, int size);

/// Blocked iff the cell is invalid or its depth lies outside [depth_min, depth_max].
ObstacleMask operability_mask(const BathyGrid& grid, double depth_min, double depth_max);

std::string format_double(double v);

}  // namespace bathyplan
