#include "doctest.h"

#include <cmath>
#include <random>

#include "cgns/errors.hpp"
#include "cgns/filter.hpp"
#include "cgns/linear_model.hpp"
#include "cgns/simulate.hpp"
#include "cgns/triad.hpp"
#include "lti_cases.hpp"
#include "support.hpp"

using namespace cgns;

namespace {

Vector vec1(double v) { return Vector::Constant(1, v); }

GaussianState scalar_state(double m, double r) { return {vec1(m), Matrix::Constant(1, 1, r)}; }

}  // namespace

TEST_CASE("zero innovation gives a pure forecast of the mean") {
  const double lx = 1.3, ly = -0.6, fx = 0.4, fy = 0.2, dt = 1e-2;
  const CgnsModel m = scalar_linear_model(lx, ly, 0.8, 0.5, fx, fy);
  const GaussianState s = scalar_state(0.9, 0.3);
  const double x = 2.0;
  const double x_next = x + (lx * s.mean(0) + fx) * dt;
  const GaussianState n = filter_step(m, 0.0, vec1(x), vec1(x_next), s, dt);
  CHECK(n.mean(0) == doctest::Approx(0.9 + (ly * 0.9 + fy) * dt).epsilon(1e-14));
}

TEST_CASE("the stationary Riccati value is a fixed point") {
  const CgnsModel m = scalar_linear_model(1.0, -1.0, 1.0, 1.0);
  const double r_inf = std::sqrt(2.0) - 1.0;
  CHECK(r_inf == doctest::Approx(oracle::scalar_riccati_root(-1.0, 1.0, 1.0, 1.0)));
  for (double dt : {1e-2, 1e-3}) {
    const GaussianState n =
        filter_step(m, 0.0, vec1(0.0), vec1(0.1), scalar_state(0.0, r_inf), dt);
    CHECK(std::abs(n.cov(0, 0) - r_inf) <= dt * dt);
  }
}

TEST_CASE("decoupled observations reduce the filter to the unconditional moments") {
  CoefficientSnapshot s;
  s.lambda_x = Matrix::Zero(1, 2);
  s.lambda_y.resize(2, 2);
  s.lambda_y << -1.0, 0.5, -0.5, -2.0;
  s.f_x = vec1(0.3);
  s.f_y = Vector::Ones(2);
  s.sigma1_x = Matrix::Ones(1, 1);
  s.sigma2_x = Matrix::Zero(1, 2);
  s.sigma1_y = Matrix::Zero(2, 1);
  s.sigma2_y = Matrix::Identity(2, 2) * 0.7;
  const CgnsModel m = constant_model(s);
  const auto lc = local_coefficients(m, 0.0, vec1(0.0));
  GaussianState st{Vector::Constant(2, 0.4), Matrix::Identity(2, 2) * 0.2};
  CHECK(lc.kalman_gain(st.cov).isZero());
  const double dt = 1e-2;
  const GaussianState n = filter_step(m, 0.0, vec1(0.0), vec1(5.0), st, dt);
  const Vector mean = st.mean + (s.lambda_y * st.mean + s.f_y) * dt;
  const Matrix cov = st.cov + (s.lambda_y * st.cov + st.cov * s.lambda_y.transpose() +
                               s.sigma2_y * s.sigma2_y.transpose()) * dt;
  CHECK((n.mean - mean).norm() < 1e-14);
  CHECK((n.cov - cov).norm() < 1e-14);
}

TEST_CASE("run_filter with zero steps returns the initial state") {
  const CgnsModel m = scalar_linear_model(1.0, -1.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0, 0, 0.1);
  const PosteriorSeries f = run_filter(m, Matrix::Zero(1, 1), g, scalar_state(0.3, 0.2));
  REQUIRE(f.states.size() == 1);
  CHECK(f.states[0].mean(0) == 0.3);
  CHECK(f.states[0].cov(0, 0) == 0.2);
  CHECK(f.kind == SeriesKind::Filter);
}

TEST_CASE("run_filter rejects mismatched paths") {
  const CgnsModel m = scalar_linear_model(1.0, -1.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0, 1, 0.1);
  CHECK_THROWS_AS(run_filter(m, Matrix::Zero(5, 1), g, default_filter_init(1)), InvalidInput);
  CHECK_THROWS_AS(run_filter(m, Matrix::Zero(11, 2), g, default_filter_init(1)), InvalidInput);
}

TEST_CASE("scalar filter matches the Kalman-Bucy oracle over 1e4 steps") {
  const double lx = 1.0, ly = -1.0, sx = 1.0, sy = 1.0;
  const CgnsModel m = scalar_linear_model(lx, ly, sx, sy);
  const TimeGrid g = TimeGrid::make(0.0, 10.0, 1e-3);
  const Trajectory tr = simulate_path(m, vec1(0.0), vec1(0.0), g, 4);
  const PosteriorSeries f = run_filter(m, tr.x_path, g, default_filter_init(1));
  const auto ref = oracle::kalman_bucy(testing::scalar_system(lx, ly, sx, sy), tr.x_path, g.dt,
                                       oracle::Vec::Zero(1), oracle::Mat::Identity(1, 1) * 0.01);
  double err_m = 0.0, err_r = 0.0;
  for (long j = 0; j < g.size(); ++j) {
    err_m = std::max(err_m, std::abs(f.states[j].mean(0) - ref.mean[j](0)));
    err_r = std::max(err_r, std::abs(f.states[j].cov(0, 0) - ref.cov[j](0, 0)));
  }
  CHECK(err_m <= 1e-10);
  CHECK(err_r <= 1e-10);
}

TEST_CASE("randomized two-dimensional LTI models match the oracle") {
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 5; ++rep) {
    const auto c = oracle::random_lti(gen, 2);
    const CgnsModel m = constant_model(c.snap);
    const TimeGrid g = TimeGrid::make(0.0, 5.0, 1e-3);
    const Trajectory tr = simulate_path(m, vec1(0.0), Vector::Zero(2), g, 100 + rep);
    const GaussianState init = default_filter_init(2);
    const PosteriorSeries f = run_filter(m, tr.x_path, g, init);
    const auto ref = oracle::kalman_bucy(c.sys, tr.x_path, g.dt, init.mean, init.cov);
    double err = 0.0;
    for (long j = 0; j < g.size(); ++j) {
      err = std::max(err, (f.states[j].mean - ref.mean[j]).cwiseAbs().maxCoeff());
      err = std::max(err, (f.states[j].cov - ref.cov[j]).cwiseAbs().maxCoeff());
    }
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("the filter approaches the exact discrete Kalman filter at first order") {
  // The exact filter of the Euler-Maruyama discretization differs from the
  // Euler-stepped continuous filter by O(dt).
  const auto sys = testing::scalar_system(1.0, -1.0, 1.0, 1.0);
  const CgnsModel m = scalar_linear_model(1.0, -1.0, 1.0, 1.0);
  std::vector<double> errs;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const TimeGrid g = TimeGrid::make(0.0, 5.0, dt);
    const Trajectory tr = simulate_path(m, vec1(0.0), vec1(0.0), g, 8);
    const PosteriorSeries f = run_filter(m, tr.x_path, g, default_filter_init(1));
    const auto d = oracle::discrete_kf_rts(sys, tr.x_path, dt, oracle::Vec::Zero(1),
                                           oracle::Mat::Identity(1, 1) * 0.01);
    double e = 0.0;
    for (long j = 0; j < g.size(); ++j)
      e = std::max(e, std::abs(f.states[j].cov(0, 0) - d.predicted.cov[j](0, 0)));
    errs.push_back(e);
  }
  MESSAGE("covariance gaps " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(testing::rel_close(errs[0] / errs[1], 2.0, 0.15));
  CHECK(testing::rel_close(errs[1] / errs[2], 2.0, 0.15));
}

TEST_CASE("filter covariance converges to the Riccati root") {
  const CgnsModel m = scalar_linear_model(1.0, -1.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0.0, 20.0, 1e-4);
  const Trajectory tr = simulate_path(m, vec1(0.0), vec1(0.0), g, 1);
  const PosteriorSeries f = run_filter(m, tr.x_path, g, default_filter_init(1));
  CHECK(std::abs(f.states.back().cov(0, 0) - (std::sqrt(2.0) - 1.0)) <= 1e-6);
}

TEST_CASE("the filter is causal") {
  const CgnsModel m = triad_model();
  const TimeGrid g = TimeGrid::make(0.0, 4.0, 1e-3);
  const Trajectory tr = simulate_path(m, vec1(0.0), Vector::Zero(2), g, 3);
  const PosteriorSeries full = run_filter(m, tr.x_path, g, default_filter_init(2));
  const long j = 1500;
  const TimeGrid gj = TimeGrid::make(0.0, g.time(j), g.dt);
  REQUIRE(gj.n_steps == j);
  const PosteriorSeries cut = run_filter(m, tr.x_path.topRows(j + 1), gj, default_filter_init(2));
  for (long i = 0; i <= j; ++i) {
    CHECK(cut.states[i].mean == full.states[i].mean);
    CHECK(cut.states[i].cov == full.states[i].cov);
  }
}

TEST_CASE("triad filter covariance stays symmetric PSD and the alternative mean form agrees") {
  const CgnsModel m = triad_model();
  const TimeGrid g = TimeGrid::make(0.0, 10.0, 1e-3);
  const Trajectory tr = simulate_path(m, vec1(0.0), Vector::Zero(2), g, 12);
  const PosteriorSeries f = run_filter(m, tr.x_path, g, default_filter_init(2));
  double worst = 0.0;
  for (long j = 0; j < g.size(); ++j) {
    const Matrix& r = f.states[j].cov;
    CHECK(r == r.transpose());
    CHECK(min_eigenvalue(r) >= -kTolPsd);
    if (j < g.n_steps) {
      const Vector alt = filter_mean_step_alternative(m, g.time(j), tr.x_path.row(j).transpose(),
                                                      tr.x_path.row(j + 1).transpose(),
                                                      f.states[j], g.dt);
      worst = std::max(worst, (alt - f.states[j + 1].mean).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("covariance blow-up is reported") {
  const CgnsModel m = scalar_linear_model(0.0, 30.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0.0, 2.0, 1e-3);
  CHECK_THROWS_AS(run_filter(m, Matrix::Zero(g.size(), 1), g, default_filter_init(1)),
                  CovarianceBlowup);
}
