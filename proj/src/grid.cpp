#include "bathyplan/grid.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bathyplan/error.hpp"

namespace bathyplan {

BathyGrid::BathyGrid(int ncols, int nrows, double xllcorner, double yllcorner, double cellsize,
                     double nodata_value, std::vector<double> depths)
    : ncols_(ncols),
      nrows_(nrows),
      xllcorner_(xllcorner),
      yllcorner_(yllcorner),
      cellsize_(cellsize),
      nodata_(nodata_value),
      depths_(std::move(depths)) {
  if (ncols < 1 || nrows < 1) throw DataError("grid dimensions must be positive");
  if (!(cellsize > 0.0) || !std::isfinite(cellsize)) throw DataError("cellsize must be > 0");
  if (depths_.size() != static_cast<std::size_t>(ncols) * nrows)
    throw DataError("depth array has " + std::to_string(depths_.size()) + " entries, expected " +
                    std::to_string(static_cast<std::size_t>(ncols) * nrows));
}

bool BathyGrid::valid(std::size_t i) const {
  const double v = depths_[i];
  return std::isfinite(v) && v != nodata_;
}

bool BathyGrid::valid(Cell c) const { return contains(c) && valid(index(c)); }

std::size_t BathyGrid::valid_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < depths_.size(); ++i) n += valid(i) ? 1 : 0;
  return n;
}

Position BathyGrid::cell_center(Cell c) const {
  return {xllcorner_ + (c.col + 0.5) * cellsize_,
          yllcorner_ + (nrows_ - c.row - 0.5) * cellsize_};
}

Cell BathyGrid::cell_of(const Position& p) const {
  const double col = std::floor((p.easting - xllcorner_) / cellsize_);
  const double row_from_south = std::floor((p.northing - yllcorner_) / cellsize_);
  // Clamp before the int conversion so far-away points stay well defined.
  const double lim = 1e9;
  return {static_cast<int>(std::clamp(nrows_ - 1 - row_from_south, -lim, lim)),
          static_cast<int>(std::clamp(col, -lim, lim))};
}

bool BathyGrid::inside_extent(const Position& p) const {
  return p.easting >= xllcorner_ && p.easting <= xllcorner_ + width_m() &&
         p.northing >= yllcorner_ && p.northing <= yllcorner_ + height_m();
}

std::size_t ObstacleMask::unblocked_count() const {
  return static_cast<std::size_t>(std::count(blocked.begin(), blocked.end(), 0));
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> parse_real(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

bool looks_numeric(std::string_view tok) {
  return !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '-' ||
                          tok[0] == '+' || tok[0] == '.');
}

}  // namespace

BathyGrid parse_ascii_grid(std::istream& in) {
  constexpr std::array<const char*, 5> required = {"ncols", "nrows", "xllcorner", "yllcorner",
                                                   "cellsize"};
  std::array<std::optional<double>, 5> header{};
  std::array<std::size_t, 5> header_line{};
  std::optional<double> nodata;

  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> toks;

  // Header: key/value lines until the first line that starts with a number.
  bool have_data_line = false;
  while (std::getline(in, line)) {
    ++lineno;
    toks = split_ws(line);
    if (toks.empty()) continue;
    if (looks_numeric(toks[0])) {
      have_data_line = true;
      break;
    }
    if (toks.size() != 2) throw ParseError(lineno, "header line must be '<key> <value>'");
    const std::string key = lower(std::string(toks[0]));
    const auto value = parse_real(toks[1]);
    if (!value) throw ParseError(lineno, "non-numeric header value '" + std::string(toks[1]) + "'");
    if (key == "nodata_value") {
      nodata = *value;
      continue;
    }
    const auto it = std::find(required.begin(), required.end(), key);
    if (it == required.end()) throw ParseError(lineno, "unknown header key '" + std::string(toks[0]) + "'");
    auto& slot = header[static_cast<std::size_t>(it - required.begin())];
    if (slot) throw ParseError(lineno, "duplicate header key '" + std::string(toks[0]) + "'");
    slot = *value;
    header_line[static_cast<std::size_t>(it - required.begin())] = lineno;
  }
  for (std::size_t k = 0; k < required.size(); ++k)
    if (!header[k]) throw ParseError(lineno, std::string("missing header key '") + required[k] + "'");

  const double ncols_d = *header[0];
  const double nrows_d = *header[1];
  if (ncols_d != std::floor(ncols_d) || ncols_d <= 0 || ncols_d > 1e8)
    throw ParseError(header_line[0], "ncols must be a positive integer");
  if (nrows_d != std::floor(nrows_d) || nrows_d <= 0 || nrows_d > 1e8)
    throw ParseError(header_line[1], "nrows must be a positive integer");
  if (!(*header[4] > 0.0)) throw ParseError(header_line[4], "cellsize must be > 0");
  const int ncols = static_cast<int>(ncols_d);
  const int nrows = static_cast<int>(nrows_d);

  std::vector<double> depths;
  depths.reserve(static_cast<std::size_t>(ncols) * nrows);
  int rows_read = 0;
  while (true) {
    if (have_data_line) {
      if (rows_read == nrows) throw ParseError(lineno, "more data rows than nrows");
      if (toks.size() != static_cast<std::size_t>(ncols))
        throw ParseError(lineno, "expected " + std::to_string(ncols) + " values, found " +
                                     std::to_string(toks.size()));
      for (auto tok : toks) {
        const auto v = parse_real(tok);
        if (!v) throw ParseError(lineno, "non-numeric token '" + std::string(tok) + "'");
        depths.push_back(*v);
      }
      ++rows_read;
    }
    if (!std::getline(in, line)) break;
    ++lineno;
    toks = split_ws(line);
    have_data_line = !toks.empty();
  }
  if (rows_read != nrows)
    throw ParseError(lineno, "expected " + std::to_string(nrows) + " data rows, found " +
                                 std::to_string(rows_read));

  return BathyGrid(ncols, nrows, *header[2], *header[3], *header[4], nodata.value_or(-9999.0),
                   std::move(depths));
}

BathyGrid parse_ascii_grid(const std::string& text) {
  std::istringstream in(text);
  return parse_ascii_grid(in);
}

BathyGrid load_ascii_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grid file '" + path + "'");
  try {
    return parse_ascii_grid(in);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

void write_ascii_grid(std::ostream& out, const BathyGrid& grid) {
  out << "ncols " << grid.ncols() << '\n'
      << "nrows " << grid.nrows() << '\n'
      << "xllcorner " << format_double(grid.xllcorner()) << '\n'
      << "yllcorner " << format_double(grid.yllcorner()) << '\n'
      << "cellsize " << format_double(grid.cellsize()) << '\n'
      << "NODATA_value " << format_double(grid.nodata_value()) << '\n';
  const auto& d = grid.depths();
  for (int r = 0; r < grid.nrows(); ++r) {
    for (int c = 0; c < grid.ncols(); ++c) {
      if (c) out << ' ';
      out << format_double(d[static_cast<std::size_t>(r) * grid.ncols() + c]);
    }
    out << '\n';
  }
}

std::string serialize_ascii_grid(const BathyGrid& grid) {
  std::ostringstream out;
  write_ascii_grid(out, grid);
  return out.str();
}

void write_ascii_int_grid(std::ostream& out, int ncols, int nrows, double xllcorner,
                          double yllcorner, double cellsize, int nodata,
                          const std::vector<int>& values) {
  out << "ncols " << ncols << '\n'
      << "nrows " << nrows << '\n'
      << "xllcorner " << format_double(xllcorner) << '\n'
      << "yllcorner " << format_double(yllcorner) << '\n'
      << "cellsize " << format_double(cellsize) << '\n'
      << "NODATA_value " << nodata << '\n';
  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < ncols; ++c) {
      if (c) out << ' ';
      out << values[static_cast<std::size_t>(r) * ncols + c];
    }
    out << '\n';
  }
}

std::optional<Patch> extract_patch(const BathyGrid& grid, Cell center, int size) {
  if (size <= 0 || size % 2 == 0)
    throw std::invalid_argument("patch size must be odd and positive, got " + std::to_string(size));
  const int half = size / 2;
  if (center.row - half < 0 || center.col - half < 0 || center.row + half >= grid.nrows() ||
      center.col + half >= grid.ncols())
    return std::nullopt;

  Patch patch{center, size, {}};
  patch.values.reserve(static_cast<std::size_t>(size) * size);
  for (int r = center.row - half; r <= center.row + half; ++r) {
    for (int c = center.col - half; c <= center.col + half; ++c) {
      const std::size_t i = grid.index({r, c});
      if (!grid.valid(i)) return std::nullopt;
      patch.values.push_back(grid.depths()[i]);
    }
  }
  return patch;
}

ObstacleMask operability_mask(const BathyGrid& grid, double depth_min, double depth_max) {
  if (std::isnan(depth_min) || std::isnan(depth_max) || depth_min > depth_max)
    throw std::invalid_argument("operability bounds inverted: [" + format_double(depth_min) +
                                ", " + format_double(depth_max) + "]");
  ObstacleMask mask{grid.ncols(), grid.nrows(), std::vector<std::uint8_t>(grid.size(), 0)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.depths()[i];
    mask.blocked[i] = (!grid.valid(i) || d < depth_min || d > depth_max) ? 1 : 0;
  }
  return mask;
}

}  // namespace bathyplan
