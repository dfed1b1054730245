#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bathyplan/error.hpp"
#include "bathyplan/features.hpp"
#include "bathyplan/terrain.hpp"

using namespace bathyplan;

namespace {

const std::string kTwoZone = R"(
ncols: 80
nrows: 80
cellsize: 5
base_depth: -20
trend: {amplitude: 1, wavelength: 60}
zones:
  - name: flat
    texture: {amplitude: 0.05, wavelength: 20}
  - name: bumpy
    texture: {amplitude: 2.0, wavelength: 2, octaves: 2}
    rects:
      - [0, 40, 80, 40]
)";

struct Stats {
  double mean = 0, sd = 0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double x : v) s.sd += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(s.sd / static_cast<double>(v.size()));
  return s;
}

}  // namespace

TEST_CASE("fixture terrain is deterministic") {
  const TerrainSpec spec = load_terrain_spec(std::string(BATHYPLAN_FIXTURE_DIR) + "/3zone.yaml");
  const auto a = synth_terrain(spec, 7);
  const auto b = synth_terrain(spec, 7);
  CHECK(a.grid.depths() == b.grid.depths());
  CHECK(a.labels.labels == b.labels.labels);
  CHECK(a.labels.num_labels == 3);
  const auto c = synth_terrain(spec, 8);
  CHECK(a.grid.depths() != c.grid.depths());
}

TEST_CASE("fixture reef zone is rare") {
  const TerrainSpec spec = load_terrain_spec(std::string(BATHYPLAN_FIXTURE_DIR) + "/3zone.yaml");
  const auto t = synth_terrain(spec, spec.seed);
  std::vector<std::size_t> area(3, 0);
  std::size_t valid = 0;
  for (std::size_t i = 0; i < t.labels.labels.size(); ++i) {
    const int l = t.labels.labels[i];
    CHECK((l >= 0) == t.grid.valid(i));
    if (l >= 0) {
      ++area[static_cast<std::size_t>(l)];
      ++valid;
    }
  }
  CHECK(static_cast<double>(area[2]) / static_cast<double>(valid) < 0.10);
  CHECK(area[2] > 0);
}

TEST_CASE("label histogram matches painted areas") {
  const TerrainSpec spec = parse_terrain_spec(R"(
ncols: 20
nrows: 10
zones:
  - name: a
  - name: b
    rects: [[2, 3, 4, 5]]
  - name: c
    rects: [[0, 0, 1, 20], [9, 15, 5, 10]]
nodata_rects: [[5, 0, 2, 2]]
)");
  const auto t = synth_terrain(spec, 1);
  std::vector<int> count(3, 0);
  int nodata = 0;
  for (int l : t.labels.labels) l < 0 ? ++nodata : ++count[static_cast<std::size_t>(l)];
  CHECK(count[1] == 20);
  CHECK(count[2] == 20 + 5);
  CHECK(nodata == 4);
  CHECK(count[0] == 200 - 20 - 25 - 4);
}

TEST_CASE("two-zone rugosity separates by a wide margin") {
  const TerrainSpec spec = parse_terrain_spec(kTwoZone);
  const auto t = synth_terrain(spec, 42);
  std::vector<double> rug[2];
  for (int r = 2; r < t.grid.nrows() - 2; r += 2)
    for (int c = 2; c < t.grid.ncols() - 2; c += 2) {
      const auto p = extract_patch(t.grid, Cell{r, c}, 5);
      REQUIRE(p);
      // Skip patches straddling the boundary.
      if (c >= 36 && c <= 43) continue;
      rug[t.labels.at(Cell{r, c})].push_back(geometric_features(*p, spec.cellsize)(3));
    }
  const Stats flat = stats(rug[0]), bumpy = stats(rug[1]);
  CHECK(bumpy.mean - flat.mean > 3.0 * std::max(flat.sd, bumpy.sd));
}

TEST_CASE("voronoi layout labels every cell") {
  const TerrainSpec spec = parse_terrain_spec(R"(
ncols: 30
nrows: 30
layout: voronoi
zones:
  - {name: a, sites: 3}
  - {name: b, sites: 2}
  - {name: c, sites: 2}
)");
  const auto t = synth_terrain(spec, 5);
  for (int l : t.labels.labels) CHECK((l >= 0 && l < 3));
  CHECK(synth_terrain(spec, 5).labels.labels == t.labels.labels);
}

TEST_CASE("spec errors") {
  CHECK_THROWS_AS(synth_terrain(parse_terrain_spec("ncols: 4\nnrows: 4\nzones: [{name: a}]\n"), 1), ConfigError);
  CHECK_THROWS_AS(synth_terrain(parse_terrain_spec(R"(
ncols: 4
nrows: 4
zones:
  - {name: a}
  - {name: b, rects: [[0, 0, 4, 4]]}
)"),
                                1),
                  ConfigError);
  CHECK_THROWS_AS(parse_terrain_spec("ncols: 4\nnrows: 4\ncolour: red\nzones: []\n"), ConfigError);
  CHECK_THROWS_AS(parse_terrain_spec("ncols: [4\n"), ConfigError);
  CHECK_THROWS_AS(load_terrain_spec("/nonexistent/spec.yaml"), DataError);
}

TEST_CASE("value noise is smooth and bounded") {
  for (int i = 0; i < 200; ++i) {
    const double x = i * 0.173, y = i * 0.091;
    const double v = value_noise(x, y, 9);
    CHECK(std::abs(v) <= 1.0);
    CHECK(std::abs(value_noise(x + 1e-6, y, 9) - v) < 1e-4);
  }
  CHECK(value_noise(2.0, 3.0, 1) != value_noise(2.0, 3.0, 2));
}
