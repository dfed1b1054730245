#include "bathyplan/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "bathyplan/error.hpp"

namespace bathyplan {

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
  if (w < 0 || h < 0) throw std::invalid_argument("negative image size");
  for (std::size_t i = 0; i < rgb.size(); i += 3) std::copy(fill.begin(), fill.end(), rgb.begin() + i);
}

Rgb Image::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
  rgb[i] = c[0];
  rgb[i + 1] = c[1];
  rgb[i + 2] = c[2];
}

namespace {

Rgb from_hsv(double h, double s, double v) {
  const double c = v * s;
  const double hp = std::fmod(h, 1.0) * 6.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) r = c, g = x;
  else if (hp < 2) r = x, g = c;
  else if (hp < 3) g = c, b = x;
  else if (hp < 4) g = x, b = c;
  else if (hp < 5) r = x, b = c;
  else r = c, b = x;
  const double m = v - c;
  auto q = [m](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255.0)); };
  return {q(r), q(g), q(b)};
}

}  // namespace

Rgb label_color(int label) {
  static constexpr Rgb palette[] = {
      {31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},  {148, 103, 189}, {140, 86, 75},
      {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207}, {255, 255, 153}, {0, 0, 128}};
  if (label < 0) return {0, 0, 0};
  if (label < 12) return palette[label];
  return from_hsv(0.618033988749895 * label, 0.65, 0.55 + 0.35 * ((label / 3) % 2));
}

Image render_depth(const BathyGrid& grid) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.valid(i)) continue;
    lo = std::min(lo, grid.depths()[i]);
    hi = std::max(hi, grid.depths()[i]);
  }
  Image img(grid.ncols(), grid.nrows(), {128, 128, 128});
  const double span = hi > lo ? hi - lo : 1.0;
  for (int r = 0; r < grid.nrows(); ++r)
    for (int c = 0; c < grid.ncols(); ++c) {
      if (!grid.valid(Cell{r, c})) continue;
      const double t = (grid.depth(Cell{r, c}) - lo) / span;  // 0 deep, 1 shallow
      img.set(c, r, {static_cast<std::uint8_t>(std::lround(20 + 180 * t)),
                     static_cast<std::uint8_t>(std::lround(40 + 200 * t)),
                     static_cast<std::uint8_t>(std::lround(110 + 140 * t))});
    }
  return img;
}

Image render_labels(int ncols, int nrows, const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(ncols) * nrows) throw std::invalid_argument("label raster size mismatch");
  Image img(ncols, nrows);
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < ncols; ++c) img.set(c, r, label_color(labels[static_cast<std::size_t>(r) * ncols + c]));
  return img;
}

std::vector<int> resample_labels(const BathyGrid& grid, const BathyGrid& raster) {
  std::vector<int> out(grid.size(), -1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cell src = raster.cell_of(grid.cell_center(grid.cell_at(i)));
    if (raster.contains(src) && raster.valid(src)) out[i] = static_cast<int>(std::lround(raster.depth(src)));
  }
  return out;
}

Cell pixel_of(const BathyGrid& grid, const Position& p) { return grid.cell_of(p); }

void overlay_path(Image& image, const BathyGrid& grid, const Path& path, Rgb color) {
  auto plot = [&](int x, int y) {
    if (x >= 0 && y >= 0 && x < image.width && y < image.height) image.set(x, y, color);
  };
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const Cell a = pixel_of(grid, path.waypoints[i]);
    const Cell b = i + 1 < path.waypoints.size() ? pixel_of(grid, path.waypoints[i + 1]) : a;
    int x0 = a.col, y0 = a.row;
    const int dx = std::abs(b.col - x0), dy = -std::abs(b.row - y0);
    const int sx = x0 < b.col ? 1 : -1, sy = y0 < b.row ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      plot(x0, y0);
      if (x0 == b.col && y0 == b.row) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
}

void write_ppm(std::ostream& out, const Image& image, const std::string& comment) {
  out << "P6\n";
  if (!comment.empty()) out << "# " << comment << '\n';
  out << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
}

Image read_ppm(std::istream& in) {
  auto token = [&in]() {
    std::string t;
    while (in >> std::ws && in.peek() == '#') {
      std::string skip;
      std::getline(in, skip);
    }
    in >> t;
    return t;
  };
  if (token() != "P6") throw DataError("not a binary PPM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw DataError("malformed PPM header");
  }
  if (maxval != 255 || w < 0 || h < 0) throw DataError("unsupported PPM header");
  in.get();
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) throw DataError("truncated PPM data");
  return img;
}

}  // namespace bathyplan
