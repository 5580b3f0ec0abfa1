#include <doctest.h>

#include <cmath>

#include "emdpe/recovery.hpp"
#include "emdpe/transport.hpp"

using namespace emdpe;

namespace {

const ParametricModel& tde() {
  static const auto m = ParametricModel::chirp(500, 1e-6, 1e6, 20e6, 50e6);
  return m;
}

const Dictionary& tde_dict() {
  static const Dictionary d = build_dictionary(tde(), build_grid(0.0, 10e-6, 0.02e-6));
  return d;
}

SceneSpec tde_scene() {
  SceneSpec s;
  s.k = 4;
  s.min_separation = 0.2e-6;
  s.off_bound = 1e-6;
  s.on_grid = true;
  return s;
}

}  // namespace

TEST_CASE("algorithm names") {
  for (auto a : {Algorithm::CSP, Algorithm::BSP, Algorithm::KMedianOnly, Algorithm::ThresholdOnly}) {
    CHECK(parse_algorithm(algorithm_name(a)) == a);
  }
  CHECK(parse_algorithm("CSP") == Algorithm::CSP);
  CHECK_THROWS_AS(parse_algorithm("omp"), std::invalid_argument);
}

TEST_CASE("config validation") {
  RecoveryConfig c;
  CHECK_NOTHROW(c.validate());
  c.k = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.nu = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.threshold = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.max_outer_iter = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("hard threshold") {
  cvec v(3);
  v << 0.5, 1.2, 0.3;
  cvec want(3);
  want << 0.5, 1.2, 0.0;
  CHECK((hard_threshold(v, 0.4) - want).norm() == 0.0);
  CHECK(hard_threshold(v, 1.2).norm() == 0.0);
  cvec z(3);
  z << 0.0, 2.0, 0.0;
  CHECK((hard_threshold(z, 0.0) - z).norm() == 0.0);
}

TEST_CASE("proxy") {
  const auto op = MeasurementOperator::identity(500);
  const auto& d = tde_dict();
  const cvec v = proxy(d.atoms().col(100), op, d);
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  CHECK(at == 100);
  CHECK(std::abs(v(100)) == doctest::Approx(1.0).epsilon(0.03));

  const cvec a = d.atoms().col(30) * 2.0;
  const cvec b = d.atoms().col(300) * std::complex<double>(0.0, 1.0);
  CHECK((proxy(a + b, op, d) - proxy(a, op, d) - proxy(b, op, d)).norm() < 1e-12);

  const auto fe = ParametricModel::complex_exponential(500);
  const Dictionary fd = build_dictionary(fe, ParameterGrid(0.0, 1.0, 20));
  const cvec pv = proxy(fd.atoms().col(4) + fd.atoms().col(11), MeasurementOperator::identity(500), fd);
  CHECK(std::abs(pv(4)) == doctest::Approx(1.0));
  CHECK(std::abs(pv(11)) == doctest::Approx(1.0));
}

TEST_CASE("band excluded selection") {
  const auto& d = tde_dict();
  cvec v = cvec::Zero(static_cast<Eigen::Index>(d.size()));
  v(100) = 1.0;
  v(101) = 0.9;
  v(300) = 0.5;
  CHECK(band_excluded_select(v, d, 2, 1.0) == std::vector<std::size_t>{100, 101});
  const double c = d.normalized_coherence(100, 101);
  CHECK(band_excluded_select(v, d, 2, c * 0.5) == std::vector<std::size_t>{100, 300});

  const auto fe = ParametricModel::complex_exponential(64);
  const Dictionary fd = build_dictionary(fe, ParameterGrid(0.0, 1.0, 10));
  cvec w(10);
  for (Eigen::Index i = 0; i < 10; ++i) w(i) = static_cast<double>(i);
  CHECK(band_excluded_select(w, fd, 3, 0.0) == std::vector<std::size_t>{7, 8, 9});

  const Dictionary tiny = build_dictionary(tde(), build_grid(0.0, 0.04e-6, 0.02e-6));
  CHECK_THROWS_AS(band_excluded_select(cvec::Ones(3), tiny, 2, 0.001), std::runtime_error);
}

TEST_CASE("least squares recovers coefficients on the true support") {
  const auto& d = tde_dict();
  const auto op = MeasurementOperator::gaussian(200, 500, 3);
  const std::vector<std::size_t> s{60, 200, 350};
  cvec c(3);
  c << 1.0, std::complex<double>(0.0, 2.0), -0.5;
  const cvec y = op.apply(cvec(d.columns(s) * c));
  CHECK((least_squares(y, op, d, s) - c).norm() < 1e-6);
}

TEST_CASE("single noiseless frequency component is found exactly") {
  // centred on the grid so the proxy is symmetric about its peak
  const auto fe = ParametricModel::complex_exponential(256);
  const auto g = build_grid(0.0, 100.0, 0.25);
  const Dictionary d = build_dictionary(fe, g);
  for (std::size_t i : {200}) {
    RecoveryConfig rc;
    rc.k = 1;
    rc.algorithm = Algorithm::KMedianOnly;
    const auto r = recover(d.atoms().col(static_cast<Eigen::Index>(i)), MeasurementOperator::identity(256), d, rc, 1);
    CHECK(r.support == std::vector<std::size_t>{i});
  }
}

TEST_CASE("noiseless time-delay recovery at full rate") {
  const auto& d = tde_dict();
  const auto op = MeasurementOperator::identity(500);
  int ok_km = 0, ok_csp = 0, ok_bsp = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const Scene sc = draw_random_scene(d.grid(), tde_scene(), 1000 + t);
    const cvec y = compose_signal(d, sc.params, sc.coefs);
    RecoveryConfig rc;
    rc.algorithm = Algorithm::KMedianOnly;
    ok_km += pee(sc.params, recover(y, op, d, rc, t).theta_hat) < 1e-12;
    rc.algorithm = Algorithm::CSP;
    ok_csp += pee(sc.params, recover(y, op, d, rc, t).theta_hat) < 1e-12;
    rc.algorithm = Algorithm::BSP;
    rc.nu = 0.001;
    ok_bsp += pee(sc.params, recover(y, op, d, rc, t).theta_hat) < 1e-12;
  }
  CHECK(ok_km >= trials - 1);
  CHECK(ok_csp >= trials - 1);
  CHECK(ok_bsp >= trials - 1);
}

TEST_CASE("exact sparse proxy") {
  const auto fe = ParametricModel::complex_exponential(64);
  const Dictionary d = build_dictionary(fe, ParameterGrid(0.0, 1.0, 30));
  const cvec y = d.atoms().col(5) + 0.5 * d.atoms().col(20);
  RecoveryConfig rc;
  rc.k = 2;
  const auto r = csp(y, MeasurementOperator::identity(64), d, rc, 4);
  CHECK(r.support == std::vector<std::size_t>{5, 20});
  CHECK(r.residual_norm < 1e-9);
}

TEST_CASE("csp surfaces the clustering precondition") {
  const auto fe = ParametricModel::complex_exponential(64);
  const Dictionary d = build_dictionary(fe, ParameterGrid(0.0, 1.0, 30));
  RecoveryConfig rc;
  rc.k = 3;
  rc.threshold = 0.9;
  CHECK_THROWS_AS(csp(d.atoms().col(5), MeasurementOperator::identity(64), d, rc, 1), std::invalid_argument);
}

TEST_CASE("bsp with nu = 1 is plain subspace pursuit") {
  const auto fe = ParametricModel::complex_exponential(64);
  const Dictionary d = build_dictionary(fe, ParameterGrid(0.0, 1.0, 30));
  const cvec y = d.atoms().col(3) + d.atoms().col(17) + 0.7 * d.atoms().col(25);
  RecoveryConfig rc;
  rc.k = 3;
  rc.algorithm = Algorithm::BSP;
  const auto r = bsp(y, MeasurementOperator::identity(64), d, rc);
  CHECK(r.support == std::vector<std::size_t>{3, 17, 25});
}
