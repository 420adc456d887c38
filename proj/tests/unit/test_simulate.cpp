#include "doctest.h"

#include <cmath>

#include "cgns/errors.hpp"
#include "cgns/linear_model.hpp"
#include "cgns/rng.hpp"
#include "cgns/simulate.hpp"
#include "cgns/triad.hpp"

using namespace cgns;

namespace {

Vector vec1(double v) { return Vector::Constant(1, v); }

CgnsModel drift_only(double c) {
  CoefficientSnapshot s;
  s.lambda_x = Matrix::Zero(1, 1);
  s.lambda_y = Matrix::Zero(1, 1);
  s.f_x = vec1(c);
  s.f_y = vec1(0.0);
  s.sigma1_x = Matrix::Zero(1, 1);
  s.sigma2_x = Matrix::Zero(1, 1);
  s.sigma1_y = Matrix::Zero(1, 1);
  s.sigma2_y = Matrix::Zero(1, 1);
  return constant_model(s, "drift");
}

}  // namespace

TEST_CASE("time grid construction") {
  const TimeGrid g = TimeGrid::make(0.0, 1.0, 0.1);
  CHECK(g.n_steps == 10);
  CHECK(g.size() == 11);
  CHECK(g.time(10) == doctest::Approx(1.0));
  CHECK(g.index_of(0.54) == 5);
  CHECK(g.index_of(5.0) == 10);
  CHECK(g.index_of(-1.0) == 0);
  CHECK_THROWS_AS(TimeGrid::make(0.0, 1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(TimeGrid::make(1.0, 0.0, 0.1), InvalidInput);
}

TEST_CASE("deterministic drift step") {
  const CgnsModel m = drift_only(3.0);
  auto [x, y] = em_step(m, 0.0, vec1(1.0), vec1(2.0), 0.01, vec1(0.7), vec1(-0.2));
  CHECK(x(0) == 1.0 + 3.0 * 0.01);
  CHECK(y(0) == 2.0);
}

TEST_CASE("pure diffusion step advances by sqrt(dt)") {
  CoefficientSnapshot s;
  s.lambda_x = Matrix::Zero(2, 1);
  s.lambda_y = Matrix::Zero(1, 1);
  s.f_x = Vector::Zero(2);
  s.f_y = Vector::Zero(1);
  s.sigma1_x = Matrix::Identity(2, 2);
  s.sigma2_x = Matrix::Zero(2, 1);
  s.sigma1_y = Matrix::Zero(1, 2);
  s.sigma2_y = Matrix::Zero(1, 1);
  const CgnsModel m = constant_model(s);
  Vector e1 = Vector::Zero(2);
  e1(0) = 1.0;
  auto [x, y] = em_step(m, 0.0, Vector::Zero(2), Vector::Zero(1), 0.04, e1, vec1(0.0));
  CHECK(x(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(x(1) == 0.0);
}

TEST_CASE("triad step from the origin without noise") {
  const CgnsModel m = triad_model();
  const double dt = 1e-3;
  auto [x, y] = em_step(m, 0.0, vec1(0.0), Vector::Zero(2), dt, vec1(0.0), Vector::Zero(2));
  CHECK(x(0) == doctest::Approx(3.0 * dt).epsilon(1e-15));
  CHECK(y(0) == 0.0);
  CHECK(y(1) == 0.0);
}

TEST_CASE("simulate_path basics") {
  const CgnsModel m = scalar_linear_model(1.0, -1.0, 1.0, 1.0);
  SUBCASE("zero steps keep the initial state") {
    const Trajectory tr = simulate_path(m, vec1(0.5), vec1(-0.5), TimeGrid::make(0, 0, 0.01), 3);
    CHECK(tr.x_path.rows() == 1);
    CHECK(tr.x_path(0, 0) == 0.5);
    CHECK(tr.y_path(0, 0) == -0.5);
  }
  SUBCASE("same seed gives bit-identical paths") {
    const TimeGrid g = TimeGrid::make(0, 5, 0.01);
    const Trajectory a = simulate_path(m, vec1(0.0), vec1(0.0), g, 99);
    const Trajectory b = simulate_path(m, vec1(0.0), vec1(0.0), g, 99);
    const Trajectory c = simulate_path(m, vec1(0.0), vec1(0.0), g, 100);
    CHECK(a.x_path == b.x_path);
    CHECK(a.y_path == b.y_path);
    CHECK(a.y_path != c.y_path);
    CHECK(a.x_path.rows() == 501);
  }
}

TEST_CASE("OU stationary variance") {
  // y is an OU process with rate 1 and unit noise; stationary variance 1/2.
  const CgnsModel m = scalar_linear_model(0.0, -1.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0.0, 500.0, 1e-3);
  const long burn = g.index_of(10.0);
  const auto ens = simulate_ensemble(m, vec1(0.0), vec1(0.0), g, 17, 16, 0);
  double s = 0.0, s2 = 0.0;
  long n = 0;
  for (const auto& tr : ens) {
    const Vector y = tr.y_path.col(0).tail(g.size() - burn);
    s += y.sum();
    s2 += y.squaredNorm();
    n += y.size();
  }
  const double var = s2 / n - (s / n) * (s / n);
  MESSAGE("pooled OU variance " << var);
  CHECK(std::abs(var - 0.5) <= 0.05 * 0.5);
}

TEST_CASE("simulate_ensemble seeding and independence") {
  const CgnsModel m = scalar_linear_model(1.0, -1.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0, 2, 0.01);
  const auto one = simulate_ensemble(m, vec1(0.0), vec1(0.0), g, 5, 1);
  const Trajectory ref = simulate_path(m, vec1(0.0), vec1(0.0), g, sub_seed(5, 0));
  CHECK(one[0].x_path == ref.x_path);
  CHECK(one[0].y_path == ref.y_path);

  const auto two = simulate_ensemble(m, vec1(0.0), vec1(0.0), g, 5, 2);
  CHECK(two[0].y_path != two[1].y_path);

  const auto serial = simulate_ensemble(m, vec1(0.0), vec1(0.0), g, 8, 7, 1);
  const auto threaded = simulate_ensemble(m, vec1(0.0), vec1(0.0), g, 8, 7, 4);
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].y_path == threaded[i].y_path);
}

TEST_CASE("ensemble mean of pure diffusion stays near the start") {
  const CgnsModel m = scalar_linear_model(0.0, -1.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0, 1, 0.01);
  const std::size_t n = 2000;
  const auto ens = simulate_ensemble(m, vec1(2.0), vec1(0.0), g, 1, n, 0);
  double s = 0.0;
  for (const auto& tr : ens) s += tr.x_path(g.n_steps, 0);
  // x = 2 + W(1): sigma = 1 at t = 1.
  CHECK(std::abs(s / n - 2.0) <= 4.0 / std::sqrt(double(n)));
}

TEST_CASE("blow-up is reported with the ensemble member") {
  const CgnsModel m = scalar_linear_model(1.0, 40.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0, 2, 1e-3);
  CHECK_THROWS_AS(simulate_path(m, vec1(0.0), vec1(1.0), g, 1), NonFiniteState);
  try {
    simulate_ensemble(m, vec1(0.0), vec1(1.0), g, 1, 3, 2);
    FAIL("expected NonFiniteState");
  } catch (const NonFiniteState& e) {
    CHECK(std::string(e.what()).find("ensemble member 0") != std::string::npos);
    CHECK(e.time() > 0.0);
  }
}
