#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "bathyplan/tsp.hpp"

using namespace bathyplan;

namespace {

SetTspInstance random_instance(std::mt19937_64& rng, int groups, int max_per_group) {
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::uniform_int_distribution<int> per(1, max_per_group);
  SetTspInstance inst;
  for (int g = 0; g < groups; ++g) {
    const int n = per(rng);
    for (int i = 0; i < n; ++i) inst.nodes.push_back({g * 3 + 1, {u(rng), u(rng)}});
  }
  return inst;
}

// Every choice of one node per group, every ordering of the groups.
double exhaustive_optimum(const SetTspInstance& inst) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < inst.nodes.size(); ++i) groups[inst.nodes[i].group].push_back(i);
  std::vector<std::vector<std::size_t>> members;
  for (auto& [g, v] : groups) members.push_back(v);
  const std::size_t k = members.size();
  std::vector<std::size_t> choice(k, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    do {
      double len = 0.0;
      for (std::size_t i = 1; i < k; ++i)
        len += distance(inst.nodes[members[order[i - 1]][choice[order[i - 1]]]].position,
                        inst.nodes[members[order[i]][choice[order[i]]]].position);
      best = std::min(best, len);
    } while (std::next_permutation(order.begin(), order.end()));
    std::size_t g = 0;
    while (g < k && ++choice[g] == members[g].size()) choice[g++] = 0;
    if (g == k) break;
  }
  return best;
}

void check_one_per_group(const SetTspInstance& inst, const TspSolution& s) {
  std::set<int> seen;
  for (std::size_t i : s.order) CHECK(seen.insert(inst.nodes[i].group).second);
  const auto ids = inst.group_ids();
  CHECK(seen == std::set<int>(ids.begin(), ids.end()));
}

}  // namespace

TEST_CASE("single node") {
  SetTspInstance inst;
  inst.nodes.push_back({0, {5, 5}});
  const TspSolution s = solve_set_tsp(inst, {});
  CHECK(s.order == std::vector<std::size_t>{0});
  CHECK(s.path.waypoints.size() == 1);
  CHECK(s.length == 0.0);
}

TEST_CASE("collinear nodes give the end-to-end tour") {
  SetTspInstance inst;
  inst.nodes = {{0, {10, 0}}, {1, {20, 0}}, {2, {0, 0}}};
  const TspSolution s = solve_set_tsp(inst, {});
  CHECK(s.length == doctest::Approx(20.0));
  const double first = s.path.waypoints.front().easting;
  CHECK((first == 0.0 || first == 20.0));
}

TEST_CASE("within 2% of the exhaustive optimum") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 20; ++t) {
    const SetTspInstance inst = random_instance(rng, 3 + t % 6, 3);
    AnnealOptions opt;
    opt.seed = static_cast<std::uint64_t>(t);
    const TspSolution s = solve_set_tsp(inst, opt);
    const double opt_len = exhaustive_optimum(inst);
    CAPTURE(t);
    CHECK(s.length <= 1.02 * opt_len + 1e-9);
    CHECK(s.length <= s.initial_length + 1e-9);
    CHECK(std::abs(s.path.length() - s.length) <= 1e-9 * std::max(1.0, s.length));
    CHECK(tour_length(inst, s.order) == doctest::Approx(s.length));
    check_one_per_group(inst, s);
  }
}

TEST_CASE("deterministic and translation invariant") {
  std::mt19937_64 rng(5);
  SetTspInstance inst = random_instance(rng, 10, 4);
  AnnealOptions opt;
  opt.seed = 3;
  opt.sweeps = 500;
  const TspSolution a = solve_set_tsp(inst, opt), b = solve_set_tsp(inst, opt);
  CHECK(a.order == b.order);
  CHECK(a.length == b.length);
  for (auto& n : inst.nodes) {
    n.position.easting += 512.0;
    n.position.northing -= 2048.0;
  }
  CHECK(solve_set_tsp(inst, opt).length == doctest::Approx(a.length).epsilon(1e-9));
}

TEST_CASE("fixed start stays first") {
  std::mt19937_64 rng(8);
  SetTspInstance inst = random_instance(rng, 7, 2);
  inst.start = 4;
  const TspSolution s = solve_set_tsp(inst, {});
  CHECK(s.order.front() == 4);
  check_one_per_group(inst, s);
}

TEST_CASE("budget enforcement drops groups until the tour fits") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    SetTspInstance inst = random_instance(rng, 8, 2);
    inst.start = 0;
    const TspSolution full = solve_set_tsp(inst, {});
    const double budget = full.length * (0.2 + 0.07 * t);
    const TspSolution cut = enforce_budget(inst, full, budget);
    CHECK(cut.length <= budget);
    CHECK(cut.order.front() == 0);
    CHECK(cut.order.size() + cut.dropped_groups.size() == full.order.size());
    CHECK(std::abs(cut.path.length() - cut.length) <= 1e-9 * std::max(1.0, cut.length));
  }
  SetTspInstance inst = random_instance(rng, 4, 1);
  const TspSolution s = solve_set_tsp(inst, {});
  CHECK(enforce_budget(inst, s, s.length + 1).order == s.order);
}

TEST_CASE("instance from representatives") {
  RepresentativeSet reps;
  reps.nodes = {{2, 0, 5, {1, 1}}, {0, 1, 9, {2, 2}}, {2, 3, 11, {3, 3}}};
  const SetTspInstance inst = make_set_tsp_instance(reps);
  CHECK(inst.nodes.size() == 3);
  CHECK(inst.group_ids() == std::vector<int>{0, 2});
  CHECK_THROWS_AS(solve_set_tsp(SetTspInstance{}, {}), std::invalid_argument);
}
