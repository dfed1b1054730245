#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bathyplan/clustering.hpp"
#include "bathyplan/path.hpp"

namespace bathyplan {

struct TspNode {
  int group = 0;  // cluster id
  Position position;
};

/// Visit exactly one node of every group along an open tour (Euclidean metric).
struct SetTspInstance {
  std::vector<TspNode> nodes;
  /// Optional fixed first node.
  std::optional<std::size_t> start;

  /// Distinct group ids, ascending.
  std::vector<int> group_ids() const;
};

SetTspInstance make_set_tsp_instance(const RepresentativeSet& reps);

struct AnnealOptions {
  std::uint64_t seed = 0;
  /// Number of temperature steps. Ignored when a time budget is set.
  int sweeps = 2000;
  /// Wall-clock cap in seconds; nondeterministic, meant for interactive runs.
  std::optional<double> time_budget_s;
  double cooling = 0.995;
};

struct TspSolution {
  std::vector<std::size_t> order;  // node indices, one per group
  Path path;
  double initial_length = 0.0;  // best nearest-neighbour tour
  double length = 0.0;
  std::vector<int> dropped_groups;  // filled by enforce_budget
};

/// Simulated annealing over 2-opt segment reversals and within-group node
/// swaps, starting from the best nearest-neighbour tour. Geometric schedule
/// from T0 = mean pairwise node distance. Never returns a tour longer than
/// the initial one.
TspSolution solve_set_tsp(const SetTspInstance& instance, const AnnealOptions& options);

/// Greedily removes the node with the largest length saving until the tour
/// fits `budget`. The fixed start node is never removed.
TspSolution enforce_budget(const SetTspInstance& instance, TspSolution solution, double budget);

double tour_length(const SetTspInstance& instance, const std::vector<std::size_t>& order);

}  // namespace bathyplan
