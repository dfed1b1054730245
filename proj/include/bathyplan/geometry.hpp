#pragma once

#include <cmath>
#include <cstdint>

namespace bathyplan {

/// World position in the grid's own metric frame (easting, northing in meters).
struct Position {
  double easting = 0.0;
  double northing = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

/// Grid cell index; row 0 is the northernmost row.
struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

inline double distance(const Position& a, const Position& b) {
  return std::hypot(b.easting - a.easting, b.northing - a.northing);
}

inline Position lerp(const Position& a, const Position& b, double t) {
  return {a.easting + t * (b.easting - a.easting), a.northing + t * (b.northing - a.northing)};
}

/// SplitMix64 step, used to derive independent per-task seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace bathyplan
