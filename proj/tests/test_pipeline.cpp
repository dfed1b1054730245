#include <doctest.h>

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bathyplan/error.hpp"
#include "bathyplan/pipeline.hpp"
#include "bathyplan/render.hpp"

using namespace bathyplan;

namespace {

const std::string kFixture = std::string(BATHYPLAN_FIXTURE_DIR) + "/3zone.yaml";

RunConfig fixture_config(std::uint64_t seed) {
  RunConfig c;
  c.synthetic = kFixture;
  c.seed = seed;
  return c;
}

const std::string& file_of(const Artifacts& a, const std::string& name) {
  for (const auto& f : a.files)
    if (f.first == name) return f.second;
  FAIL("missing artifact " << name);
  static const std::string none;
  return none;
}

}  // namespace

TEST_CASE("config digest") {
  RunConfig a = fixture_config(1);
  const std::string d = config_digest(a);
  CHECK(d.size() == 16);
  CHECK(config_digest(a) == d);

  RunConfig b = a;
  b.jobs = 3;
  b.out_dir = "elsewhere";
  CHECK(config_digest(b) == d);
  b.seed = 2;
  CHECK(config_digest(b) != d);
  // Planner settings only count for the planner that runs.
  b = a;
  b.inforrt.iterations = 401;
  CHECK(config_digest(b) == d);
  a.planner = b.planner = PlannerKind::inforrt;
  CHECK(config_digest(b) != config_digest(a));
  b = a;
  b.tsp_sweeps = 10;
  CHECK(config_digest(b) == config_digest(a));
}

TEST_CASE("invalid configs and inputs") {
  RunConfig c;
  CHECK_THROWS_AS(prepare_scene(c), ConfigError);
  c = fixture_config(0);
  c.input = "also.asc";
  CHECK_THROWS_AS(prepare_scene(c), ConfigError);
  c = fixture_config(0);
  c.patch = 4;
  CHECK_THROWS_AS(prepare_scene(c), ConfigError);
  c = fixture_config(0);
  c.budget = 0;
  CHECK_THROWS_AS(prepare_scene(c), ConfigError);

  RunConfig m;
  m.input = "/nonexistent/grid.asc";
  CHECK_THROWS_AS(prepare_scene(m), DataError);
  m = fixture_config(0);
  m.synthetic = "/nonexistent/terrain.yaml";
  CHECK_THROWS_AS(prepare_scene(m), DataError);
}

TEST_CASE("tsp covers every cluster while transects do not") {
  RunConfig c = fixture_config(1);
  c.budget = 2200;
  const Scene scene = prepare_scene(c);
  REQUIRE(scene.labels.has_value());
  CHECK(scene.clusters.labels.size() == scene.env->field().size());

  const PlanOutcome out = plan_on_scene(scene, c);
  const BenchmarkResult bench = benchmark_on_scene(scene, c);
  CHECK(out.report.d_m <= c.budget + 1e-6);
  CHECK(out.report.mc == 1.0);
  CHECK(bench.transects.size() == 100);
  CHECK(bench.mean_mc < 1.0);
}

// Each seed regenerates the encoder sample, GMM and tree, so this runs the full chain 20 times.
TEST_CASE("inforrt covers every cluster on the 3-zone terrain") {
  int full = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunConfig c = fixture_config(seed);
    c.budget = 3200;
    c.planner = PlannerKind::inforrt;
    c.inforrt.criterion = PathCriterion::neg_msd;
    const Scene scene = prepare_scene(c);
    const PlanOutcome out = plan_on_scene(scene, c);
    CHECK(out.report.d_m <= c.budget + 1e-6);
    if (out.report.mc == 1.0) ++full;
  }
  CAPTURE(full);
  CHECK(full >= 18);
}

TEST_CASE("plan artifacts") {
  RunConfig c = fixture_config(3);
  c.planner = PlannerKind::inforrt;
  c.inforrt.iterations = 60;
  const Scene scene = prepare_scene(c);
  const PlanOutcome out = plan_on_scene(scene, c);
  const BenchmarkResult bench = benchmark_on_scene(scene, c);
  const Artifacts a = plan_artifacts(scene, out, bench, c);
  const std::string digest = config_digest(c);

  std::set<std::string> names;
  for (const auto& f : a.files) names.insert(f.first);
  for (const char* n : {"path.csv", "path.geojson", "metrics.json", "clusters.asc", "grid.asc", "labels.asc",
                        "tree_0.csv", "tree_1.csv", "tree_2.csv", "tree_3.csv", "preview_depth.ppm",
                        "preview_clusters.ppm", "manifest.json"})
    CHECK(names.count(n) == 1);
  CHECK(names.count("tree_4.csv") == 0);

  // Every file carries the digest, or is listed by a manifest that does.
  const auto manifest = nlohmann::json::parse(file_of(a, "manifest.json"));
  CHECK(manifest["config_digest"] == digest);
  CHECK(manifest["files"].size() == a.files.size() - 1);
  for (const auto& [name, body] : a.files) {
    if (name.ends_with(".asc")) continue;
    CAPTURE(name);
    CHECK(body.find(digest) != std::string::npos);
  }

  const auto metrics = nlohmann::json::parse(file_of(a, "metrics.json"));
  CHECK(metrics["config_digest"] == digest);
  CHECK(metrics["mc"].get<double>() == out.report.mc);
  CHECK(metrics["planner_info"].is_object());

  // Rebuilding from the same config gives identical bytes, whatever the thread count.
  const int saved = omp_get_max_threads();
  omp_set_num_threads(saved == 3 ? 2 : 3);
  const Scene again = prepare_scene(c);
  const Artifacts b = plan_artifacts(again, plan_on_scene(again, c), benchmark_on_scene(again, c), c);
  omp_set_num_threads(saved);
  REQUIRE(b.files.size() == a.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i] == b.files[i]);
}

TEST_CASE("write_artifacts") {
  const auto dir = std::filesystem::temp_directory_path() / "bathyplan_test_write";
  std::filesystem::remove_all(dir);
  Artifacts a;
  a.files.emplace_back("x.txt", "hello\n");
  write_artifacts(a, (dir / "sub").string());
  std::ifstream in(dir / "sub" / "x.txt");
  std::string s;
  std::getline(in, s);
  CHECK(s == "hello");

  // A regular file where the directory should be.
  std::ofstream(dir / "blocker") << "x";
  CHECK_THROWS_AS(write_artifacts(a, (dir / "blocker" / "out").string()), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("render") {
  const BathyGrid g(4, 6, 100, 200, 10.0, -9999, {-1, -2, -3, -4, -9999, -6, -7, -8, -9, -10, -11, -12,
                                                   -13, -14, -15, -16, -17, -18, -19, -20, -21, -22, -23, -24});
  const Image depth = render_depth(g);
  CHECK(depth.width == 4);
  CHECK(depth.height == 6);

  // Corners: the north-west corner is pixel (0, 0), south-east is (w-1, h-1).
  const Cell nw = pixel_of(g, {100.5, 259.5});
  CHECK(nw.row == 0);
  CHECK(nw.col == 0);
  const Cell se = pixel_of(g, {139.5, 200.5});
  CHECK(se.row == 5);
  CHECK(se.col == 3);

  Image img(4, 6);
  overlay_path(img, g, Path{{{105, 255}, {135, 205}}}, {255, 0, 255});
  CHECK(img.at(0, 0) == Rgb{255, 0, 255});
  CHECK(img.at(3, 5) == Rgb{255, 0, 255});
  CHECK(img.at(3, 0) == Rgb{0, 0, 0});

  std::set<Rgb> colors;
  for (int l = 0; l < 24; ++l) colors.insert(label_color(l));
  CHECK(colors.size() == 24);
  const Image labels = render_labels(2, 1, {-1, 3});
  CHECK(labels.at(0, 0) == Rgb{0, 0, 0});
  CHECK(labels.at(1, 0) == label_color(3));

  std::stringstream ss;
  write_ppm(ss, depth, "note");
  const Image back = read_ppm(ss);
  CHECK(back.width == depth.width);
  CHECK(back.height == depth.height);
  CHECK(back.rgb == depth.rgb);
}
