#include "bathyplan/tsp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace bathyplan {

std::vector<int> SetTspInstance::group_ids() const {
  std::set<int> s;
  for (const auto& n : nodes) s.insert(n.group);
  return {s.begin(), s.end()};
}

SetTspInstance make_set_tsp_instance(const RepresentativeSet& reps) {
  SetTspInstance inst;
  for (const auto& n : reps.nodes) inst.nodes.push_back({n.cluster, n.position});
  return inst;
}

double tour_length(const SetTspInstance& instance, const std::vector<std::size_t>& order) {
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i)
    total += distance(instance.nodes[order[i - 1]].position, instance.nodes[order[i]].position);
  return total;
}

namespace {

class Annealer {
public:
  Annealer(const SetTspInstance& inst) : inst_(inst) {
    const std::size_t n = inst.nodes.size();
    dist_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        dist_[i * n + j] = distance(inst.nodes[i].position, inst.nodes[j].position);
    std::map<int, std::size_t> slot;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = slot.emplace(inst.nodes[i].group, members_.size());
      if (inserted) members_.emplace_back();
      members_[it->second].push_back(i);
      group_of_.push_back(it->second);
    }
  }

  double d(std::size_t a, std::size_t b) const { return dist_[a * inst_.nodes.size() + b]; }
  std::size_t groups() const { return members_.size(); }

  double length(const std::vector<std::size_t>& order) const {
    double t = 0.0;
    for (std::size_t i = 1; i < order.size(); ++i) t += d(order[i - 1], order[i]);
    return t;
  }

  std::vector<std::size_t> nearest_neighbour(std::size_t first) const {
    std::vector<std::size_t> order{first};
    std::vector<char> done(groups(), 0);
    done[group_of_[first]] = 1;
    for (std::size_t step = 1; step < groups(); ++step) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < inst_.nodes.size(); ++j) {
        if (done[group_of_[j]]) continue;
        const double dj = d(order.back(), j);
        if (dj < best_d) {
          best_d = dj;
          best = j;
        }
      }
      order.push_back(best);
      done[group_of_[best]] = 1;
    }
    return order;
  }

  std::vector<std::size_t> greedy() const {
    std::vector<std::size_t> best;
    double best_len = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < inst_.nodes.size(); ++s) {
      if (inst_.start && *inst_.start != s) continue;
      auto order = nearest_neighbour(s);
      const double len = length(order);
      if (len < best_len) {
        best_len = len;
        best = std::move(order);
      }
    }
    return best;
  }

  double mean_pairwise() const {
    const std::size_t n = inst_.nodes.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += d(i, j);
    return s / (static_cast<double>(n) * (n - 1) / 2.0);
  }

  std::vector<std::size_t> anneal(std::vector<std::size_t> order, const AnnealOptions& opt) const {
    const std::size_t g = order.size();
    const std::size_t lo = inst_.start ? 1 : 0;  // first movable position
    double cur = length(order);
    std::vector<std::size_t> best = order;
    double best_len = cur;
    const double t0 = mean_pairwise();
    if (g < 2 || t0 <= 0.0) return best;

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto moves = static_cast<int>(std::max<std::size_t>(16, g * g));
    const auto started = std::chrono::steady_clock::now();
    double temp = t0;

    auto edge = [&](std::size_t a, std::size_t b) { return d(order[a], order[b]); };
    for (int sweep = 0;; ++sweep) {
      if (opt.time_budget_s) {
        const std::chrono::duration<double> el = std::chrono::steady_clock::now() - started;
        if (el.count() >= *opt.time_budget_s) break;
      } else if (sweep >= opt.sweeps) {
        break;
      }
      for (int m = 0; m < moves; ++m) {
        const bool try_swap = unit(rng) < 0.5;
        if (try_swap) {
          std::uniform_int_distribution<std::size_t> pos_d(lo, g - 1);
          const std::size_t p = pos_d(rng);
          const auto& mem = members_[group_of_[order[p]]];
          if (mem.size() < 2) continue;
          std::uniform_int_distribution<std::size_t> mem_d(0, mem.size() - 1);
          const std::size_t cand = mem[mem_d(rng)];
          if (cand == order[p]) continue;
          double delta = 0.0;
          if (p > 0) delta += d(order[p - 1], cand) - edge(p - 1, p);
          if (p + 1 < g) delta += d(cand, order[p + 1]) - edge(p, p + 1);
          if (delta <= 0.0 || unit(rng) < std::exp(-delta / temp)) {
            order[p] = cand;
            cur += delta;
          }
        } else {
          if (g - lo < 2) continue;
          std::uniform_int_distribution<std::size_t> pos_d(lo, g - 1);
          std::size_t i = pos_d(rng), j = pos_d(rng);
          if (i == j) continue;
          if (i > j) std::swap(i, j);
          double delta = 0.0;
          if (i > 0) delta += d(order[i - 1], order[j]) - edge(i - 1, i);
          if (j + 1 < g) delta += d(order[i], order[j + 1]) - edge(j, j + 1);
          if (delta <= 0.0 || unit(rng) < std::exp(-delta / temp)) {
            std::reverse(order.begin() + static_cast<long>(i), order.begin() + static_cast<long>(j) + 1);
            cur += delta;
          }
        }
        if (cur < best_len - 1e-12) {
          // Recompute to keep accumulated rounding out of the incumbent.
          cur = length(order);
          if (cur < best_len) {
            best_len = cur;
            best = order;
          }
        }
      }
      temp *= opt.cooling;
    }
    return best;
  }

private:
  const SetTspInstance& inst_;
  std::vector<double> dist_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> group_of_;
};

Path to_path(const SetTspInstance& inst, const std::vector<std::size_t>& order) {
  Path p;
  for (auto i : order) p.waypoints.push_back(inst.nodes[i].position);
  return p;
}

}  // namespace

TspSolution solve_set_tsp(const SetTspInstance& instance, const AnnealOptions& options) {
  if (instance.nodes.empty()) throw std::invalid_argument("set-TSP instance has no nodes");
  if (instance.start && *instance.start >= instance.nodes.size())
    throw std::invalid_argument("set-TSP start node out of range");
  for (const auto& n : instance.nodes)
    if (!std::isfinite(n.position.easting) || !std::isfinite(n.position.northing))
      throw std::invalid_argument("set-TSP node with non-finite coordinates");

  const Annealer annealer(instance);
  TspSolution sol;
  const auto initial = annealer.greedy();
  sol.initial_length = annealer.length(initial);
  sol.order = annealer.anneal(initial, options);
  sol.length = annealer.length(sol.order);
  sol.path = to_path(instance, sol.order);
  return sol;
}

TspSolution enforce_budget(const SetTspInstance& instance, TspSolution sol, double budget) {
  auto& order = sol.order;
  auto d = [&](std::size_t a, std::size_t b) {
    return distance(instance.nodes[order[a]].position, instance.nodes[order[b]].position);
  };
  while (order.size() > 1 && tour_length(instance, order) > budget) {
    const std::size_t lo = instance.start ? 1 : 0;
    std::size_t best_pos = lo;
    double best_saving = -std::numeric_limits<double>::infinity();
    for (std::size_t p = lo; p < order.size(); ++p) {
      double saving = 0.0;
      if (p == 0)
        saving = d(0, 1);
      else if (p + 1 == order.size())
        saving = d(p - 1, p);
      else
        saving = d(p - 1, p) + d(p, p + 1) - d(p - 1, p + 1);
      if (saving > best_saving) {
        best_saving = saving;
        best_pos = p;
      }
    }
    sol.dropped_groups.push_back(instance.nodes[order[best_pos]].group);
    order.erase(order.begin() + static_cast<long>(best_pos));
  }
  sol.length = tour_length(instance, order);
  sol.path = to_path(instance, order);
  return sol;
}

}  // namespace bathyplan
