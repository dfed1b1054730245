#include "bathyplan/path.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bathyplan/error.hpp"
#include "bathyplan/grid.hpp"

namespace bathyplan {

double Path::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) total += distance(waypoints[i - 1], waypoints[i]);
  return total;
}

Path densify(const Path& path, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("densify spacing must be > 0");
  Path out;
  if (path.waypoints.empty()) return out;
  out.waypoints.push_back(path.waypoints.front());
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    const Position& a = path.waypoints[i - 1];
    const Position& b = path.waypoints[i];
    const double len = distance(a, b);
    const auto pieces = static_cast<int>(std::max(1.0, std::ceil(len / spacing - 1e-12)));
    for (int k = 1; k < pieces; ++k) out.waypoints.push_back(lerp(a, b, static_cast<double>(k) / pieces));
    out.waypoints.push_back(b);
  }
  return out;
}

void write_path_csv(std::ostream& out, const Path& path) {
  out << "index,easting,northing,cum_length_m\n";
  double cum = 0.0;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    if (i) cum += distance(path.waypoints[i - 1], path.waypoints[i]);
    out << i << ',' << format_double(path.waypoints[i].easting) << ',' << format_double(path.waypoints[i].northing)
        << ',' << format_double(cum) << '\n';
  }
}

Path read_path_csv(std::istream& in) {
  Path p;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("index,easting,northing", 0) != 0) throw ParseError(lineno, "unexpected path CSV header");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string idx, e, n;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, e, ',') || !std::getline(ss, n, ','))
      throw ParseError(lineno, "expected index,easting,northing");
    try {
      p.waypoints.push_back({std::stod(e), std::stod(n)});
    } catch (const std::exception&) {
      throw ParseError(lineno, "non-numeric coordinate");
    }
  }
  return p;
}

void write_path_geojson(std::ostream& out, const Path& path, const std::string& crs_note,
                        const std::string& config_digest) {
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& w : path.waypoints) coords.push_back({w.easting, w.northing});
  nlohmann::json doc = {
      {"type", "Feature"},
      {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
      {"properties", {{"crs", crs_note}, {"length_m", path.length()}, {"config_digest", config_digest}}},
  };
  out << doc.dump(2) << '\n';
}

}  // namespace bathyplan
