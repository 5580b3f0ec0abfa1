#include <doctest.h>

#include <cmath>

#include "emdpe/measurement.hpp"
#include "emdpe/recovery.hpp"
#include "emdpe/rng.hpp"

using namespace emdpe;

namespace {

cvec random_vec(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  cvec x(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  return x;
}

}  // namespace

TEST_CASE("identity") {
  const cvec x = random_vec(16, 1);
  const auto op = MeasurementOperator::identity(16);
  CHECK((op.apply(x) - x).norm() == 0.0);
  CHECK((op.apply_adjoint(x) - x).norm() == 0.0);
  CHECK_THROWS_AS(op.apply(random_vec(5, 1)), std::invalid_argument);
}

TEST_CASE("gaussian operator") {
  const cvec x = random_vec(500, 2);
  const auto a = MeasurementOperator::gaussian(200, 500, 7);
  const auto b = MeasurementOperator::gaussian(200, 500, 7);
  CHECK(a.rows() == 200);
  CHECK((a.apply(x) - b.apply(x)).norm() == 0.0);
  CHECK((a.dense() - b.dense()).norm() == 0.0);

  // adjoint identity <Phi x, y> = <x, Phi^T y>
  const cvec y = random_vec(200, 3);
  CHECK(std::abs(a.apply(x).dot(y) - x.dot(a.apply_adjoint(y))) < 1e-9);

  // E |Phi x|^2 = |x|^2
  double ratio = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) ratio += MeasurementOperator::gaussian(200, 500, s).apply(x).squaredNorm();
  CHECK(ratio / 50.0 / x.squaredNorm() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("row subsampling") {
  const auto op = MeasurementOperator::row_subsampled(4, 10, 5);
  REQUIRE(op.kept_rows().size() == 4);
  const cvec x = random_vec(10, 4);
  const cvec y = op.apply(x);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(y(i) == x(op.kept_rows()(i)));
  CHECK((op.dense() * x.real() - y.real()).norm() < 1e-15);
}

TEST_CASE("awgn") {
  const cvec y = random_vec(200, 9);
  CHECK((add_awgn(y, kNoiseless, 1) - y).norm() == 0.0);
  CHECK((add_awgn(y, 20.0, 1) - add_awgn(y, 20.0, 1)).norm() == 0.0);

  double power = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) power += (add_awgn(y, 0.0, s) - y).squaredNorm();
  CHECK(power / 1000.0 / y.squaredNorm() == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(add_awgn(cvec::Zero(4), 10.0, 1), std::invalid_argument);
}
