#include "bathyplan/terrain.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "bathyplan/error.hpp"

namespace bathyplan {

namespace {

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  const auto v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

NoiseLayer parse_noise(const YAML::Node& node, const std::string& where) {
  NoiseLayer n;
  if (!node) return n;
  if (!node.IsMap()) throw ConfigError(where + " must be a map");
  check_keys(node, {"amplitude", "wavelength", "octaves", "persistence"}, where);
  n.amplitude = get_or(node, "amplitude", n.amplitude);
  n.wavelength = get_or(node, "wavelength", n.wavelength);
  n.octaves = get_or(node, "octaves", n.octaves);
  n.persistence = get_or(node, "persistence", n.persistence);
  if (!(n.wavelength > 0.0)) throw ConfigError(where + ": wavelength must be > 0");
  if (n.octaves < 1) throw ConfigError(where + ": octaves must be >= 1");
  if (n.amplitude < 0.0) throw ConfigError(where + ": amplitude must be >= 0");
  return n;
}

std::vector<double> parse_tuple(const YAML::Node& node, std::size_t n, const std::string& where) {
  if (!node.IsSequence() || node.size() != n)
    throw ConfigError(where + " must be a list of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(v.as<double>());
  return out;
}

std::vector<RectRegion> parse_rects(const YAML::Node& node, const std::string& where) {
  std::vector<RectRegion> rects;
  if (!node) return rects;
  for (const auto& item : node) {
    const auto t = parse_tuple(item, 4, where + " rect [row0, col0, rows, cols]");
    RectRegion r{static_cast<int>(t[0]), static_cast<int>(t[1]), static_cast<int>(t[2]),
                 static_cast<int>(t[3])};
    if (r.rows <= 0 || r.cols <= 0) throw ConfigError(where + ": rect with zero area");
    rects.push_back(r);
  }
  return rects;
}

// Lattice hash in [-1, 1].
double lattice_value(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
  const std::uint64_t h = mix_seed(seed ^ (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL),
                                   static_cast<std::uint64_t>(iy));
  return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

double smooth(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double layered_noise(const NoiseLayer& layer, double row, double col, std::uint64_t seed) {
  if (layer.amplitude == 0.0) return 0.0;
  double sum = 0.0;
  double amp = layer.amplitude;
  double freq = 1.0 / layer.wavelength;
  for (int o = 0; o < layer.octaves; ++o) {
    sum += amp * value_noise(col * freq, row * freq, mix_seed(seed, static_cast<std::uint64_t>(o)));
    amp *= layer.persistence;
    freq *= 2.0;
  }
  return sum;
}

}  // namespace

double value_noise(double x, double y, std::uint64_t seed) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  const double tx = smooth(x - fx), ty = smooth(y - fy);
  const double v00 = lattice_value(ix, iy, seed), v10 = lattice_value(ix + 1, iy, seed);
  const double v01 = lattice_value(ix, iy + 1, seed), v11 = lattice_value(ix + 1, iy + 1, seed);
  const double a = v00 + tx * (v10 - v00);
  const double b = v01 + tx * (v11 - v01);
  return a + ty * (b - a);
}

TerrainSpec parse_terrain_spec(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("terrain spec: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("terrain spec must be a map");
  check_keys(root,
             {"ncols", "nrows", "cellsize", "xllcorner", "yllcorner", "base_depth", "trend", "layout",
              "zones", "nodata_rects", "seed"},
             "terrain spec");

  TerrainSpec spec;
  spec.ncols = get_or(root, "ncols", 0);
  spec.nrows = get_or(root, "nrows", 0);
  spec.cellsize = get_or(root, "cellsize", 1.0);
  spec.xllcorner = get_or(root, "xllcorner", 0.0);
  spec.yllcorner = get_or(root, "yllcorner", 0.0);
  spec.base_depth = get_or(root, "base_depth", spec.base_depth);
  spec.seed = get_or<std::uint64_t>(root, "seed", 0);
  spec.trend = parse_noise(root["trend"], "trend");
  const auto layout = get_or<std::string>(root, "layout", "painted");
  if (layout == "painted")
    spec.layout = ZoneLayout::painted;
  else if (layout == "voronoi")
    spec.layout = ZoneLayout::voronoi;
  else
    throw ConfigError("layout must be 'painted' or 'voronoi', got '" + layout + "'");

  if (spec.ncols < 1 || spec.nrows < 1) throw ConfigError("ncols and nrows must be >= 1");
  if (!(spec.cellsize > 0.0)) throw ConfigError("cellsize must be > 0");

  const auto zones = root["zones"];
  if (!zones || !zones.IsSequence()) throw ConfigError("'zones' must be a list");
  for (std::size_t z = 0; z < zones.size(); ++z) {
    const auto& zn = zones[z];
    const std::string where = "zone " + std::to_string(z);
    check_keys(zn, {"name", "depth_offset", "texture", "rects", "discs", "sites"}, where);
    ZoneSpec zone;
    zone.name = get_or<std::string>(zn, "name", "zone" + std::to_string(z));
    zone.depth_offset = get_or(zn, "depth_offset", 0.0);
    zone.texture = parse_noise(zn["texture"], where + " texture");
    zone.rects = parse_rects(zn["rects"], where);
    if (const auto discs = zn["discs"]) {
      for (const auto& item : discs) {
        const auto t = parse_tuple(item, 3, where + " disc [row, col, radius]");
        if (!(t[2] > 0.0)) throw ConfigError(where + ": disc with zero radius");
        zone.discs.push_back({t[0], t[1], t[2]});
      }
    }
    zone.sites = get_or(zn, "sites", 1);
    spec.zones.push_back(std::move(zone));
  }
  spec.nodata_rects = parse_rects(root["nodata_rects"], "nodata_rects");
  return spec;
}

TerrainSpec load_terrain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open terrain spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_terrain_spec(ss.str());
}

SyntheticTerrain synth_terrain(const TerrainSpec& spec, std::uint64_t seed) {
  const std::size_t nzones = spec.zones.size();
  if (nzones < 2) throw ConfigError("terrain spec needs at least 2 zones, got " + std::to_string(nzones));
  if (spec.ncols < 1 || spec.nrows < 1 || !(spec.cellsize > 0.0))
    throw ConfigError("terrain spec has an invalid grid shape");

  const std::size_t n = static_cast<std::size_t>(spec.ncols) * spec.nrows;
  std::vector<int> labels(n, 0);

  if (spec.layout == ZoneLayout::painted) {
    for (std::size_t z = 1; z < nzones; ++z) {
      const auto& zone = spec.zones[z];
      if (zone.rects.empty() && zone.discs.empty())
        throw ConfigError("zone '" + zone.name + "' has no region in a painted layout");
      for (const auto& r : zone.rects)
        for (int row = std::max(0, r.row0); row < std::min(spec.nrows, r.row0 + r.rows); ++row)
          for (int col = std::max(0, r.col0); col < std::min(spec.ncols, r.col0 + r.cols); ++col)
            labels[static_cast<std::size_t>(row) * spec.ncols + col] = static_cast<int>(z);
      for (const auto& d : zone.discs)
        for (int row = 0; row < spec.nrows; ++row)
          for (int col = 0; col < spec.ncols; ++col)
            if (std::hypot(row - d.row, col - d.col) <= d.radius)
              labels[static_cast<std::size_t>(row) * spec.ncols + col] = static_cast<int>(z);
    }
  } else {
    struct Site {
      double row, col;
      int zone;
    };
    std::vector<Site> sites;
    std::mt19937_64 rng(mix_seed(seed, 0xC0FFEE));
    std::uniform_real_distribution<double> ur(0.0, spec.nrows), uc(0.0, spec.ncols);
    for (std::size_t z = 0; z < nzones; ++z) {
      if (spec.zones[z].sites < 1) throw ConfigError("zone '" + spec.zones[z].name + "' needs sites >= 1");
      for (int s = 0; s < spec.zones[z].sites; ++s) {
        const double r = ur(rng);
        const double c = uc(rng);
        sites.push_back({r, c, static_cast<int>(z)});
      }
    }
    for (int row = 0; row < spec.nrows; ++row)
      for (int col = 0; col < spec.ncols; ++col) {
        double best = std::numeric_limits<double>::infinity();
        int zone = 0;
        for (const auto& s : sites) {
          const double d = std::hypot(row + 0.5 - s.row, col + 0.5 - s.col);
          if (d < best) {
            best = d;
            zone = s.zone;
          }
        }
        labels[static_cast<std::size_t>(row) * spec.ncols + col] = zone;
      }
  }

  const double nodata = -9999.0;
  std::vector<double> depths(n);
  for (int row = 0; row < spec.nrows; ++row) {
    for (int col = 0; col < spec.ncols; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * spec.ncols + col;
      const auto z = static_cast<std::size_t>(labels[i]);
      const auto& zone = spec.zones[z];
      depths[i] = spec.base_depth + layered_noise(spec.trend, row, col, mix_seed(seed, 1)) +
                  zone.depth_offset + layered_noise(zone.texture, row, col, mix_seed(seed, 100 + z));
    }
  }
  for (const auto& r : spec.nodata_rects)
    for (int row = std::max(0, r.row0); row < std::min(spec.nrows, r.row0 + r.rows); ++row)
      for (int col = std::max(0, r.col0); col < std::min(spec.ncols, r.col0 + r.cols); ++col) {
        const std::size_t i = static_cast<std::size_t>(row) * spec.ncols + col;
        depths[i] = nodata;
        labels[i] = -1;
      }

  std::vector<std::size_t> area(nzones, 0);
  for (int l : labels)
    if (l >= 0) ++area[static_cast<std::size_t>(l)];
  for (std::size_t z = 0; z < nzones; ++z)
    if (area[z] == 0) throw ConfigError("zone '" + spec.zones[z].name + "' covers no cells");

  SyntheticTerrain out{
      BathyGrid(spec.ncols, spec.nrows, spec.xllcorner, spec.yllcorner, spec.cellsize, nodata,
                std::move(depths)),
      LabelMap{spec.ncols, spec.nrows, static_cast<int>(nzones), std::move(labels)}};
  return out;
}

}  // namespace bathyplan
