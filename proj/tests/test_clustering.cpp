#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emdpe/clustering.hpp"
#include "emdpe/rng.hpp"
#include "emdpe/transport.hpp"

using namespace emdpe;

namespace {

std::vector<std::size_t> iota_vec(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// exhaustive minimum of the K-median objective over all K-subsets
double brute_objective(const std::vector<double>& v, std::size_t k) {
  const std::size_t n = v.size();
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(k), true);
  double best = INFINITY;
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) s.push_back(i);
    }
    best = std::min(best, kmedian_objective(v, s));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

}  // namespace

TEST_CASE("weighted median") {
  const std::vector<std::size_t> i3{1, 2, 3};
  const std::vector<std::size_t> i4{1, 2, 3, 4};
  CHECK(weighted_median(i3, std::vector<double>{1, 1, 1}) == 2);
  CHECK(weighted_median(i4, std::vector<double>{1, 1, 1, 1}) == 2);
  CHECK(weighted_median(i3, std::vector<double>{0.1, 0.1, 5}) == 3);
  CHECK(weighted_median(i3, std::vector<double>{0, 0, 0}) == 2);
  CHECK_THROWS(weighted_median(std::vector<std::size_t>{}, std::vector<double>{}));
}

TEST_CASE("kmedian objective") {
  const std::vector<double> v{1, 1, 1, 1, 1};
  CHECK(kmedian_objective(v, std::vector<std::size_t>{2}) == doctest::Approx(6.0));
  const std::vector<double> w{0, 2, 0, 3, 0};
  CHECK(kmedian_objective(w, std::vector<std::size_t>{1, 3}) == 0.0);

  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(30);
    for (auto& e : x) e = u(rng);
    const std::vector<std::size_t> s{static_cast<std::size_t>(i % 10), 12, 25};
    const auto dense = make_sparse(30, iota_vec(30), x);
    CHECK(kmedian_objective(x, s) == doctest::Approx(emd(dense, emd_sparse_approx(x, s)).cost).epsilon(1e-9));
  }
}

TEST_CASE("lloyd objective never increases") {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 40;
    std::vector<double> w(n);
    for (auto& e : w) e = u(rng) < 0.5 ? u(rng) : 0.01 * u(rng);
    const auto pos = iota_vec(n);
    const std::vector<std::size_t> init{static_cast<std::size_t>(i % 5), 20, 39};
    const auto run = lloyd(pos, w, init, 100);
    for (std::size_t t = 1; t < run.objective_trace.size(); ++t) {
      CHECK(run.objective_trace[t] <= run.objective_trace[t - 1] + 1e-12);
    }
    CHECK(run.converged);
  }
}

TEST_CASE("kmedian finds the exact optimum on small inputs") {
  Rng rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> v(12);
    for (auto& e : v) e = u(rng);
    const std::size_t k = 1 + i % 3;
    const auto r = kmedian(v, ParameterGrid(0.0, 1.0, 12), k, 100 + i);
    CHECK(r.objective == doctest::Approx(brute_objective(v, k)).epsilon(1e-9));
  }
}

TEST_CASE("kmedian on sparse input returns the support") {
  std::vector<double> v(50, 0.0);
  v[4] = 1.0;
  v[17] = 2.0;
  v[41] = 0.5;
  const auto r = kmedian(v, ParameterGrid(0.0, 0.5, 50), 3, 1);
  CHECK(r.support == std::vector<std::size_t>{4, 17, 41});
  CHECK(r.theta_hat == std::vector<double>{2.0, 8.5, 20.5});
  CHECK(r.objective == 0.0);

  CHECK_THROWS_AS(kmedian(v, ParameterGrid(0.0, 0.5, 50), 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmedian(std::vector<double>(5, 0.0), ParameterGrid(0.0, 1.0, 5), 1, 1), std::invalid_argument);
}

TEST_CASE("kmedian is deterministic") {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(200);
  for (auto& e : v) e = u(rng);
  const ParameterGrid g(0.0, 1.0, 200);
  CHECK(kmedian(v, g, 5, 9).support == kmedian(v, g, 5, 9).support);
}
