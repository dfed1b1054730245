#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bathyplan/geometry.hpp"

namespace bathyplan {

/// Ordered open polyline of survey waypoints.
struct Path {
  std::vector<Position> waypoints;

  double length() const;
  bool empty() const { return waypoints.empty(); }
};

/// Inserts evenly spaced points into each leg so that consecutive waypoints
/// are at most `spacing` apart. Original waypoints are kept; a leg of length L
/// is split into ceil(L / spacing) equal pieces.
Path densify(const Path& path, double spacing);

/// `index,easting,northing,cum_length_m`; lines starting with # are skipped on read.
void write_path_csv(std::ostream& out, const Path& path);
Path read_path_csv(std::istream& in);

/// GeoJSON Feature with a LineString geometry; coordinates stay in the grid frame.
void write_path_geojson(std::ostream& out, const Path& path, const std::string& crs_note,
                        const std::string& config_digest);

}  // namespace bathyplan
