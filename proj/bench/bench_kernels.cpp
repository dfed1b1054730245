// Parallel kernels against their serial twins. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "bathyplan/clustering.hpp"
#include "bathyplan/features.hpp"
#include "bathyplan/kernels.hpp"
#include "bathyplan/terrain.hpp"

using namespace bathyplan;

namespace {

PointSet random_points(std::size_t n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  PointSet p(d);
  p.reserve(n);
  std::vector<double> v(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = g(rng);
    p.push_back(v.data());
  }
  return p;
}

Eigen::MatrixXd random_matrix(int d, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = g(rng) + (j % 3) * 2.0;
  return m;
}

template <double (*F)(const PointSet&)>
void BM_pairwise(benchmark::State& state) {
  const PointSet x = random_points(static_cast<std::size_t>(state.range(0)), 8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(F(x));
  state.SetComplexityN(state.range(0));
}

template <double (*F)(const PointSet&, const PointSet&)>
void BM_mean_min(benchmark::State& state) {
  const PointSet y = random_points(1000, 8, 2);
  const PointSet x = random_points(static_cast<std::size_t>(state.range(0)), 8, 3);
  for (auto _ : state) benchmark::DoNotOptimize(F(y, x));
}

template <std::vector<double> (*F)(const PointSet&)>
void BM_distance_sums(benchmark::State& state) {
  const PointSet x = random_points(static_cast<std::size_t>(state.range(0)), 8, 4);
  for (auto _ : state) benchmark::DoNotOptimize(F(x));
}

template <Eigen::MatrixXd (*F)(const GmmModel&, const Eigen::MatrixXd&)>
void BM_log_densities(benchmark::State& state) {
  static const Eigen::MatrixXd fit = random_matrix(8, 3000, 5);
  static const GmmModel model = fit_gmm(fit, GmmOptions{.k = 8, .n_init = 1});
  const Eigen::MatrixXd x = random_matrix(8, state.range(0), 6);
  for (auto _ : state) benchmark::DoNotOptimize(F(model, x));
}

template <FeatureField (*F)(const BathyGrid&, const Encoder&, int)>
void BM_feature_field(benchmark::State& state) {
  static const SyntheticTerrain t = synth_terrain(load_terrain_spec(BATHYPLAN_FIXTURE_DIR "/3zone.yaml"), 7);
  const BathyGrid& g = t.grid;
  const Encoder enc = Encoder::geometric(9, g.cellsize());
  for (auto _ : state) benchmark::DoNotOptimize(F(g, enc, 3));
}

}  // namespace

BENCHMARK(BM_pairwise<pairwise_mean_distance>)->Name("pairwise_mean/parallel")->Arg(500)->Arg(2000);
BENCHMARK(BM_pairwise<pairwise_mean_distance_serial>)->Name("pairwise_mean/serial")->Arg(500)->Arg(2000);
BENCHMARK(BM_mean_min<mean_min_distance>)->Name("mean_min/parallel")->Arg(200)->Arg(2000);
BENCHMARK(BM_mean_min<mean_min_distance_serial>)->Name("mean_min/serial")->Arg(200)->Arg(2000);
BENCHMARK(BM_distance_sums<distance_sums>)->Name("distance_sums/parallel")->Arg(1000);
BENCHMARK(BM_distance_sums<distance_sums_serial>)->Name("distance_sums/serial")->Arg(1000);
BENCHMARK(BM_log_densities<component_log_densities>)->Name("gmm_log_densities/parallel")->Arg(20000);
BENCHMARK(BM_log_densities<component_log_densities_serial>)->Name("gmm_log_densities/serial")->Arg(20000);
BENCHMARK(BM_feature_field<build_feature_field>)->Name("feature_field/parallel");
BENCHMARK(BM_feature_field<build_feature_field_serial>)->Name("feature_field/serial");

BENCHMARK_MAIN();
