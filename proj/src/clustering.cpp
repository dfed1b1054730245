#include "bathyplan/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace bathyplan {

double GmmModel::bic(std::size_t n) const {
  return -2.0 * log_likelihood() + parameter_count() * std::log(static_cast<double>(n));
}

namespace {

struct ComponentCache {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd inv_lower;
  double log_norm = 0.0;  // log w_k - d/2 log(2 pi) - 1/2 log|Sigma_k|
  Eigen::MatrixXd inv;
};

std::vector<ComponentCache> prepare(const GmmModel& m) {
  std::vector<ComponentCache> cache(static_cast<std::size_t>(m.k));
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (int c = 0; c < m.k; ++c) {
    auto& cc = cache[static_cast<std::size_t>(c)];
    cc.llt.compute(m.covariances[static_cast<std::size_t>(c)]);
    if (cc.llt.info() != Eigen::Success) throw std::runtime_error("GMM covariance lost positive definiteness");
    const Eigen::MatrixXd lower = cc.llt.matrixL().toDenseMatrix();
    const double logdet = 2.0 * lower.diagonal().array().log().sum();
    cc.inv_lower = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(m.d, m.d));
    const double w = m.weights(c);
    cc.log_norm = (w > 0 ? std::log(w) : -std::numeric_limits<double>::infinity()) - 0.5 * m.d * log2pi - 0.5 * logdet;
    cc.inv = cc.llt.solve(Eigen::MatrixXd::Identity(m.d, m.d));
  }
  return cache;
}

constexpr Eigen::Index kBlock = 512;

// Columns [b0, b0 + len) of the k x n log-density matrix. Serial and parallel
// callers use the same blocks, so their results are bit-identical.
void log_density_block(const GmmModel& m, const std::vector<ComponentCache>& cache, const Eigen::MatrixXd& x,
                       Eigen::Index b0, Eigen::Index len, Eigen::MatrixXd& out) {
  Eigen::MatrixXd z(m.d, len);
  for (int c = 0; c < m.k; ++c) {
    const auto& cc = cache[static_cast<std::size_t>(c)];
    z.noalias() = cc.inv_lower * (x.middleCols(b0, len).colwise() - m.means[static_cast<std::size_t>(c)]);
    out.row(c).segment(b0, len) = (cc.log_norm - 0.5 * z.colwise().squaredNorm().array()).matrix();
  }
}

void log_densities_into(const GmmModel& model, const Eigen::MatrixXd& x, Eigen::MatrixXd& out) {
  if (x.rows() != model.d) throw std::invalid_argument("feature dimension does not match the GMM");
  const auto cache = prepare(model);
  out.resize(model.k, x.cols());
  const long blocks = static_cast<long>((x.cols() + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const Eigen::Index b0 = b * kBlock;
    log_density_block(model, cache, x, b0, std::min(kBlock, x.cols() - b0), out);
  }
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

double covariance_penalty(const GmmModel& m, const std::vector<ComponentCache>& cache) {
  double p = 0.0;
  for (const auto& cc : cache) p += -0.5 * m.lambda * cc.inv.trace();
  return p;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
  const Eigen::VectorXd mean = x.rowwise().mean();
  const Eigen::MatrixXd c = x.colwise() - mean;
  return c * c.transpose() / static_cast<double>(x.cols());
}

std::vector<Eigen::Index> kmeanspp(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const auto n = x.cols();
  std::vector<Eigen::Index> centers;
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.push_back(pick(rng));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    const auto last = centers.back();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& v = d2[static_cast<std::size_t>(i)];
      v = std::min(v, (x.col(i) - x.col(last)).squaredNorm());
      total += v;
    }
    if (total <= 0.0) {
      centers.push_back(pick(rng));
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng);
    Eigen::Index chosen = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      target -= d2[static_cast<std::size_t>(i)];
      if (target < 0.0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(chosen);
  }
  return centers;
}

GmmModel run_em(const Eigen::MatrixXd& x, const GmmOptions& opt, int restart) {
  const auto n = x.cols();
  const int d = static_cast<int>(x.rows());
  const int k = opt.k;
  std::mt19937_64 rng(mix_seed(opt.seed, static_cast<std::uint64_t>(restart)));

  const Eigen::MatrixXd global_cov = sample_covariance(x);
  const double trace_scale = std::max(global_cov.trace() / d, 1e-12);

  GmmModel m;
  m.k = k;
  m.d = d;
  m.restart = restart;
  m.lambda = opt.ridge_scale * trace_scale;
  m.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  const Eigen::MatrixXd init_cov = global_cov + Eigen::MatrixXd::Identity(d, d) * (m.lambda + 1e-12 * trace_scale);
  for (auto c : kmeanspp(x, k, rng)) {
    m.means.push_back(x.col(c));
    m.covariances.push_back(init_cov);
  }

  Eigen::MatrixXd logp(k, n);
  Eigen::MatrixXd centered(d, n), weighted(d, n);
  Eigen::MatrixXd resp(k, n);
  Eigen::VectorXd point_ll(n);
  for (int it = 0; it < opt.max_iter; ++it) {
    // E-step
    log_densities_into(m, x, logp);
    const auto cache = prepare(m);
    const Eigen::RowVectorXd mx = logp.colwise().maxCoeff();
    resp = (logp.rowwise() - mx).array().exp().matrix();
    point_ll = (mx.array() + resp.colwise().sum().array().log()).transpose();
    resp.array().rowwise() /= resp.colwise().sum().array();
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll += point_ll(i);
    const double objective = ll + covariance_penalty(m, cache);
    m.log_likelihood_trace.push_back(ll);
    m.objective_trace.push_back(objective);
    if (it > 0) {
      const double prev = m.objective_trace[m.objective_trace.size() - 2];
      if (std::abs(objective - prev) <= opt.tol * std::abs(objective)) {
        m.converged = true;
        break;
      }
    }
    if (it + 1 == opt.max_iter) break;

    // M-step
    bool reseeded = false;
    for (int c = 0; c < k; ++c) {
      const double nk = resp.row(c).sum();
      if (nk <= 1e-8 * static_cast<double>(n)) {
        // Empty component: restart it at the worst-explained point.
        Eigen::Index worst = 0;
        point_ll.minCoeff(&worst);
        m.means[static_cast<std::size_t>(c)] = x.col(worst);
        m.covariances[static_cast<std::size_t>(c)] = init_cov;
        m.weights(c) = 1.0 / static_cast<double>(n);
        point_ll(worst) = std::numeric_limits<double>::infinity();
        reseeded = true;
        continue;
      }
      const Eigen::VectorXd mean = (x * resp.row(c).transpose()) / nk;
      centered = x.colwise() - mean;
      weighted = centered.array().rowwise() * resp.row(c).array();
      Eigen::MatrixXd cov = (weighted * centered.transpose()) / nk;
      cov = 0.5 * (cov + cov.transpose()).eval();
      cov.diagonal().array() += m.lambda / nk;
      m.means[static_cast<std::size_t>(c)] = mean;
      m.covariances[static_cast<std::size_t>(c)] = cov;
      m.weights(c) = nk / static_cast<double>(n);
    }
    m.weights /= m.weights.sum();
    if (reseeded) m.reseed_iterations.push_back(it + 1);
  }
  return m;
}

}  // namespace

Eigen::MatrixXd component_log_densities(const GmmModel& model, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out;
  log_densities_into(model, x, out);
  return out;
}

Eigen::MatrixXd component_log_densities_serial(const GmmModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.d) throw std::invalid_argument("feature dimension does not match the GMM");
  const auto cache = prepare(model);
  Eigen::MatrixXd out(model.k, x.cols());
  for (Eigen::Index b0 = 0; b0 < x.cols(); b0 += kBlock)
    log_density_block(model, cache, x, b0, std::min(kBlock, x.cols() - b0), out);
  return out;
}

double gmm_log_likelihood(const GmmModel& model, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd logp = component_log_densities(model, x);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) ll += log_sum_exp(logp.col(i));
  return ll;
}

GmmModel fit_gmm(const Eigen::MatrixXd& x, const GmmOptions& options) {
  if (options.k < 1) throw std::invalid_argument("GMM needs k >= 1");
  if (options.n_init < 1 || options.max_iter < 1) throw std::invalid_argument("GMM needs n_init, max_iter >= 1");
  const auto need = static_cast<Eigen::Index>(options.k) * (x.rows() + 1);
  if (x.cols() <= need)
    throw std::invalid_argument("GMM with k=" + std::to_string(options.k) + " needs more than " +
                                std::to_string(need) + " points, got " + std::to_string(x.cols()));
  std::optional<GmmModel> best;
  for (int r = 0; r < options.n_init; ++r) {
    GmmModel m = run_em(x, options, r);
    if (!best || m.log_likelihood() > best->log_likelihood()) best = std::move(m);
  }
  return *best;
}

GmmModel fit_gmm_bic(const Eigen::MatrixXd& x, const GmmOptions& options, int k_min, int k_max) {
  std::optional<GmmModel> best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    if (x.cols() <= static_cast<Eigen::Index>(k) * (x.rows() + 1)) break;
    GmmOptions o = options;
    o.k = k;
    GmmModel m = fit_gmm(x, o);
    const double b = m.bic(static_cast<std::size_t>(x.cols()));
    if (b < best_bic) {
      best_bic = b;
      best = std::move(m);
    }
  }
  if (!best) throw std::invalid_argument("too few points for a BIC sweep");
  return *best;
}

ClusterMap assign_clusters(const GmmModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.d) throw std::invalid_argument("feature dimension does not match the GMM");
  const Eigen::MatrixXd logp = component_log_densities(model, x);
  ClusterMap map{model.k, std::vector<int>(static_cast<std::size_t>(x.cols()), 0)};
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    int best = 0;
    for (int c = 1; c < model.k; ++c)
      if (logp(c, i) > logp(best, i)) best = c;
    map.labels[static_cast<std::size_t>(i)] = best;
  }
  return map;
}

std::vector<int> ClusterPolygons::active_labels() const {
  std::set<int> s;
  for (const auto& c : components)
    if (!c.ignored) s.insert(c.cluster);
  return {s.begin(), s.end()};
}

ClusterPolygons polygonize(const FeatureField& field, const ClusterMap& map, std::size_t min_area) {
  if (map.labels.size() != field.size()) throw std::invalid_argument("cluster map does not match the feature field");
  ClusterPolygons out;
  out.k = map.k;
  std::vector<char> seen(field.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < field.size(); ++s) {
    if (seen[s]) continue;
    ClusterComponent comp;
    comp.cluster = map.labels[s];
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      comp.sites.push_back(cur);
      const int li = (field.sites[cur].row - field.origin.row) / field.stride;
      const int lj = (field.sites[cur].col - field.origin.col) / field.stride;
      constexpr int dr[4] = {-1, 1, 0, 0};
      constexpr int dc[4] = {0, 0, -1, 1};
      for (int q = 0; q < 4; ++q) {
        const int nb = field.site_at(li + dr[q], lj + dc[q]);
        if (nb < 0) continue;
        const auto u = static_cast<std::size_t>(nb);
        if (!seen[u] && map.labels[u] == comp.cluster) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.sites.begin(), comp.sites.end());
    comp.ignored = comp.area() < min_area;
    if (comp.ignored) out.ignored_sites += comp.area();
    out.components.push_back(std::move(comp));
  }
  return out;
}

RepresentativeSet representative_points(const ClusterPolygons& polys, const FeatureField& field,
                                        int per_component, std::uint64_t seed) {
  if (per_component < 1) throw std::invalid_argument("per_component must be >= 1");
  RepresentativeSet out;
  std::mt19937_64 rng(seed);
  std::set<int> present, routed;
  for (std::size_t ci = 0; ci < polys.components.size(); ++ci) {
    const auto& comp = polys.components[ci];
    present.insert(comp.cluster);
    if (comp.ignored) continue;
    routed.insert(comp.cluster);
    std::vector<std::size_t> pool = comp.sites;
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(per_component), pool.size());
    for (std::size_t t = 0; t < take; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, pool.size() - 1);
      std::swap(pool[t], pool[pick(rng)]);
      out.nodes.push_back({comp.cluster, static_cast<int>(ci), pool[t], field.positions[pool[t]]});
    }
  }
  for (int c : present)
    if (!routed.count(c)) out.omitted_clusters.push_back(c);
  return out;
}

void write_cluster_raster(std::ostream& out, const BathyGrid& grid, const FeatureField& field, const ClusterMap& map) {
  const double cs = grid.cellsize() * field.stride;
  const double xll = grid.xllcorner() + (field.origin.col + 0.5) * grid.cellsize() - 0.5 * cs;
  // Northing of lattice row i's center must equal that of grid row origin.row + i*stride.
  const double north_top = grid.yllcorner() + (grid.nrows() - field.origin.row - 0.5) * grid.cellsize();
  const double yll = north_top + 0.5 * cs - field.lattice_rows * cs;
  std::vector<int> values(field.lattice.size(), -9999);
  for (std::size_t k = 0; k < field.lattice.size(); ++k)
    if (field.lattice[k] >= 0) values[k] = map.labels[static_cast<std::size_t>(field.lattice[k])];
  write_ascii_int_grid(out, field.lattice_cols, field.lattice_rows, xll, yll, cs, -9999, values);
}

}  // namespace bathyplan
