#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bathyplan/grid.hpp"
#include "bathyplan/path.hpp"

namespace bathyplan {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row 0 at the top (north).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h, Rgb fill = {0, 0, 0});
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
};

/// Depth colormap, shallow = light; no-data cells are mid grey.
Image render_depth(const BathyGrid& grid);

/// One pixel per cell of `labels`; -1 (no data) is black.
Image render_labels(int ncols, int nrows, const std::vector<int>& labels);

/// Resamples an integer raster onto the cells of `grid` by cell-center lookup.
std::vector<int> resample_labels(const BathyGrid& grid, const BathyGrid& raster);

/// Distinct color per label for the first 12 labels, golden-ratio hues beyond.
Rgb label_color(int label);

/// Pixel (x = col, y = row) holding a world position.
Cell pixel_of(const BathyGrid& grid, const Position& p);

/// Draws each leg with Bresenham lines; pixels outside the image are skipped.
void overlay_path(Image& image, const BathyGrid& grid, const Path& path, Rgb color = {255, 0, 255});

/// Binary PPM (P6) with an optional header comment.
void write_ppm(std::ostream& out, const Image& image, const std::string& comment = "");
Image read_ppm(std::istream& in);

}  // namespace bathyplan
