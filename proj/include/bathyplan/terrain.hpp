#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bathyplan/grid.hpp"

namespace bathyplan {

/// Value-noise texture: `octaves` layers, each doubling frequency and scaling
/// amplitude by `persistence`. Wavelength is in cells.
struct NoiseLayer {
  double amplitude = 0.0;
  double wavelength = 16.0;
  int octaves = 1;
  double persistence = 0.5;
};

struct RectRegion {
  int row0 = 0, col0 = 0, rows = 0, cols = 0;
};

struct DiscRegion {
  double row = 0, col = 0, radius = 0;
};

struct ZoneSpec {
  std::string name;
  double depth_offset = 0.0;
  NoiseLayer texture;
  // Painted layout: regions overwrite earlier zones. Zone 0 is the background.
  std::vector<RectRegion> rects;
  std::vector<DiscRegion> discs;
  // Voronoi layout: number of seeded sites owned by this zone.
  int sites = 1;
};

enum class ZoneLayout { painted, voronoi };

struct TerrainSpec {
  int ncols = 0;
  int nrows = 0;
  double cellsize = 1.0;
  double xllcorner = 0.0;
  double yllcorner = 0.0;
  double base_depth = -20.0;
  NoiseLayer trend;
  ZoneLayout layout = ZoneLayout::painted;
  std::vector<ZoneSpec> zones;
  std::vector<RectRegion> nodata_rects;
  std::uint64_t seed = 0;  // default seed when none is given on the command line
};

struct SyntheticTerrain {
  BathyGrid grid;
  LabelMap labels;
};

/// Parses a YAML (or JSON) terrain description. See docs/terrain_spec.md.
TerrainSpec parse_terrain_spec(const std::string& text);
TerrainSpec load_terrain_spec(const std::string& path);

/// Deterministic in (spec, seed). Throws ConfigError for fewer than two zones
/// or for a zone that ends up covering no valid cell.
SyntheticTerrain synth_terrain(const TerrainSpec& spec, std::uint64_t seed);

/// Smooth value noise in roughly [-1, 1]; exposed for tests.
double value_noise(double x, double y, std::uint64_t seed);

}  // namespace bathyplan
