#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bathyplan/error.hpp"
#include "bathyplan/grid.hpp"

using namespace bathyplan;

namespace {

const char* kMinimal =
    "ncols 2\n"
    "nrows 2\n"
    "xllcorner 100\n"
    "yllcorner 200\n"
    "cellsize 5\n"
    "1 2\n"
    "3 4\n";

std::size_t error_line(const std::string& text) {
  try {
    parse_ascii_grid(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

BathyGrid constant_grid(int n, double v) {
  return BathyGrid(n, n, 0, 0, 1, -9999, std::vector<double>(static_cast<std::size_t>(n) * n, v));
}

}  // namespace

TEST_CASE("minimal grid parses") {
  const BathyGrid g = parse_ascii_grid(std::string(kMinimal));
  CHECK(g.ncols() == 2);
  CHECK(g.nrows() == 2);
  CHECK(g.depths() == std::vector<double>{1, 2, 3, 4});
  CHECK(g.width_m() == 10.0);
  CHECK(g.height_m() == 10.0);
  CHECK(g.nodata_value() == -9999.0);
  CHECK(g.valid_count() == 4);
}

TEST_CASE("nodata sentinel marks a cell invalid") {
  const BathyGrid g = parse_ascii_grid(std::string(
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\nNODATA_value -9999\n1 -9999\n3 4\n"));
  CHECK(g.valid_count() == 3);
  CHECK_FALSE(g.valid(Cell{0, 1}));
  CHECK(g.valid(Cell{1, 1}));
}

TEST_CASE("header keys are case insensitive; unknown keys are rejected") {
  CHECK_NOTHROW(parse_ascii_grid(std::string("NCOLS 1\nNROWS 1\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 1\n7\n")));
  CHECK_THROWS_AS(parse_ascii_grid(std::string("ncols 1\nnrows 1\nxllcenter 0\nyllcorner 0\ncellsize 1\n7\n")),
                  ParseError);
}

TEST_CASE("malformed input reports the offending line") {
  CHECK(error_line("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n1 2 3\n3 4\n") == 6);
  CHECK(error_line("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n1 2\n3 x\n") == 7);
  CHECK(error_line("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n1 2\n") == 6);
  CHECK(error_line("ncols 0\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n") == 1);
  CHECK(error_line("ncols 2\nnrows -1\nxllcorner 0\nyllcorner 0\ncellsize 5\n") == 2);
  CHECK(error_line("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 0\n1 2\n3 4\n") == 5);
  CHECK(error_line("ncols 2\nbogus 2\n") == 2);
}

TEST_CASE("missing file is a data error") {
  CHECK_THROWS_AS(load_ascii_grid("/nonexistent/grid.asc"), DataError);
}

TEST_CASE("serialize then parse round-trips exactly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-200.0, 5.0);
  std::vector<double> d(7 * 5);
  for (auto& v : d) v = u(rng);
  d[3] = -9999;
  d[4] = 0.1 + 0.2;
  const BathyGrid g(7, 5, 312345.125, 6000000.5, 0.1, -9999, d);
  const BathyGrid back = parse_ascii_grid(serialize_ascii_grid(g));
  CHECK(back.ncols() == g.ncols());
  CHECK(back.nrows() == g.nrows());
  CHECK(back.xllcorner() == g.xllcorner());
  CHECK(back.yllcorner() == g.yllcorner());
  CHECK(back.cellsize() == g.cellsize());
  CHECK(back.nodata_value() == g.nodata_value());
  CHECK(back.depths() == g.depths());
}

TEST_CASE("cell centers and cell lookup agree") {
  const BathyGrid g = parse_ascii_grid(std::string(kMinimal));
  const Position p = g.cell_center(Cell{0, 0});
  CHECK(p.easting == 102.5);
  CHECK(p.northing == 207.5);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(g.cell_of(g.cell_center(Cell{r, c})) == Cell{r, c});
  CHECK_FALSE(g.contains(g.cell_of(Position{99.0, 205.0})));
}

TEST_CASE("extract_patch") {
  const BathyGrid flat = constant_grid(5, -12.5);
  const auto p = extract_patch(flat, Cell{2, 2}, 3);
  REQUIRE(p);
  CHECK(p->values == std::vector<double>(9, -12.5));
  CHECK_FALSE(extract_patch(flat, Cell{0, 0}, 3));
  CHECK_THROWS_AS(extract_patch(flat, Cell{2, 2}, 4), std::invalid_argument);

  std::vector<double> d(25, -3.0);
  d[2 * 5 + 3] = -9999;
  const BathyGrid holed(5, 5, 0, 0, 1, -9999, d);
  CHECK_FALSE(extract_patch(holed, Cell{2, 2}, 3));
  CHECK(extract_patch(holed, Cell{2, 1}, 1));
}

TEST_CASE("extract_patch never returns the sentinel") {
  std::mt19937_64 rng(3);
  std::vector<double> d(20 * 20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : d) v = u(rng) < 0.05 ? -9999.0 : -u(rng) * 50.0;
  const BathyGrid g(20, 20, 0, 0, 1, -9999, d);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 20; ++c)
      if (const auto p = extract_patch(g, Cell{r, c}, 5))
        for (double v : p->values) CHECK(v != -9999.0);
}

TEST_CASE("operability mask") {
  const BathyGrid g(3, 1, 0, 0, 1, -9999, {-2, -10, -30});
  CHECK(operability_mask(g, -25, -5).blocked == std::vector<std::uint8_t>{1, 0, 1});
  const BathyGrid empty(2, 2, 0, 0, 1, -9999, {-9999, -9999, -9999, -9999});
  CHECK(operability_mask(empty, -100, 100).unblocked_count() == 0);
  const BathyGrid mixed(3, 1, 0, 0, 1, -9999, {-2, -9999, -30});
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(operability_mask(mixed, -inf, inf).blocked == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(operability_mask(mixed, -1000, 1000).blocked == std::vector<std::uint8_t>{0, 1, 0});
  CHECK_THROWS_AS(operability_mask(g, -5, -25), std::invalid_argument);
  CHECK_THROWS_AS(operability_mask(g, std::nan(""), 0), std::invalid_argument);
}

TEST_CASE("mask treats out-of-grid cells as blocked") {
  const BathyGrid g(2, 2, 0, 0, 1, -9999, {1, 1, 1, 1});
  const ObstacleMask m = operability_mask(g, -10, 10);
  CHECK(m.is_blocked(Cell{-1, 0}));
  CHECK(m.is_blocked(Cell{0, 2}));
  CHECK_FALSE(m.is_blocked(Cell{1, 1}));
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-9999) == "-9999");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}
