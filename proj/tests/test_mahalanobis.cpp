#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bathyplan/mahalanobis.hpp"

using namespace bathyplan;

namespace {

MahalanobisModel with_inv(const Eigen::MatrixXd& inv) {
  return MahalanobisModel(Eigen::VectorXd::Zero(inv.rows()), inv);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double brute(const Eigen::MatrixXd& inv, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = 0; j < u.size(); ++j) s += (u(i) - v(i)) * inv(i, j) * (u(j) - v(j));
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("hand-evaluated distances") {
  const MahalanobisModel id = with_inv(Eigen::MatrixXd::Identity(2, 2));
  CHECK(mahalanobis(id, vec({0, 0}), vec({3, 4})) == doctest::Approx(5.0));
  CHECK(mahalanobis(id, vec({1.5, -2}), vec({1.5, -2})) == 0.0);
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 4;
  diag(1, 1) = 1;
  CHECK(mahalanobis(with_inv(diag), vec({0, 0}), vec({1, 1})) == doctest::Approx(std::sqrt(5.0)));
  CHECK_THROWS_AS(mahalanobis(id, vec({0, 0, 0}), vec({1, 1, 1})), std::invalid_argument);
}

TEST_CASE("model rejects a non-SPD inverse covariance") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, 1;
  CHECK_THROWS_AS(with_inv(m), std::invalid_argument);
  m << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(with_inv(m), std::invalid_argument);
}

TEST_CASE("metric axioms on random SPD matrices") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(1, 6);
  for (int t = 0; t < 1000; ++t) {
    const int d = dim(rng);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = g(rng);
    const Eigen::MatrixXd inv = a * a.transpose() + 1e-3 * Eigen::MatrixXd::Identity(d, d);
    const MahalanobisModel m = with_inv(inv);
    Eigen::VectorXd u(d), v(d), w(d);
    for (int i = 0; i < d; ++i) {
      u(i) = g(rng);
      v(i) = g(rng);
      w(i) = g(rng);
    }
    const double uv = mahalanobis(m, u, v), vu = mahalanobis(m, v, u);
    const double uw = mahalanobis(m, u, w), wv = mahalanobis(m, w, v);
    CHECK(uv >= 0.0);
    CHECK(uv == vu);
    CHECK(mahalanobis(m, u, u) == 0.0);
    CHECK(uv > 0.0);
    CHECK(uv <= uw + wv + 1e-12 * (1.0 + uw + wv));
    CHECK(std::abs(uv - brute(inv, u, v)) <= 1e-12 * std::max(1.0, uv));
    // Whitened Euclidean distance agrees with the quadratic form.
    CHECK(std::abs((m.whiten(u) - m.whiten(v)).norm() - uv) <= 1e-9 * std::max(1.0, uv));
  }
}

TEST_CASE("reward") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = g(rng);
  const Eigen::MatrixXd inv = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(3, 3);
  const MahalanobisModel m = with_inv(inv);
  auto rv = [&] { return vec({g(rng), g(rng), g(rng)}); };

  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd u = rv();
    std::vector<FeatureVector> set;
    for (int i = 0; i < 5; ++i) set.push_back(rv());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : set) best = std::min(best, brute(inv, u, v));
    const double r = reward(m, u, set);
    CHECK(std::abs(r - best) <= 1e-9 * std::max(1.0, best));

    const std::vector<FeatureVector> single{set[0]};
    CHECK(reward(m, u, single) == mahalanobis(m, u, set[0]));

    std::vector<FeatureVector> bigger = set;
    bigger.push_back(rv());
    CHECK(reward(m, u, bigger) <= r);
    bigger.push_back(u);
    CHECK(reward(m, u, bigger) == 0.0);
  }
  CHECK_THROWS_AS(reward(m, rv(), std::vector<FeatureVector>{}), std::invalid_argument);
}

TEST_CASE("fit on standard normal data approaches identity") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(3, 10000);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (int i = 0; i < 3; ++i) x(i, j) = g(rng);
  const MahalanobisModel m = fit_mahalanobis(x);
  // Entry standard error is about sqrt(2/n) = 0.014; 0.1 leaves a wide margin.
  CHECK((m.inv_cov() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("two points in one dimension") {
  Eigen::MatrixXd x(1, 2);
  x << 1.0, 3.0;
  const MahalanobisModel m = fit_mahalanobis(x, 0.5);
  CHECK(m.inv_cov()(0, 0) == doctest::Approx(1.0 / (2.0 + 0.5)));
  const MahalanobisModel dflt = fit_mahalanobis(x);
  CHECK(dflt.ridge() == doctest::Approx(2e-6));
  CHECK_THROWS_AS(fit_mahalanobis(Eigen::MatrixXd::Ones(2, 2)), std::invalid_argument);
}

TEST_CASE("fit is invariant to feature order") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> g;
  std::vector<FeatureVector> f;
  for (int i = 0; i < 40; ++i) f.push_back(vec({g(rng), 2 * g(rng)}));
  const MahalanobisModel a = fit_mahalanobis(f);
  std::reverse(f.begin(), f.end());
  const MahalanobisModel b = fit_mahalanobis(f);
  CHECK((a.inv_cov() - b.inv_cov()).norm() < 1e-12);
  CHECK((a.mean() - b.mean()).norm() < 1e-12);
}
