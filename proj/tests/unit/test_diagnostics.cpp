#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cgns/diagnostics.hpp"
#include "cgns/errors.hpp"
#include "cgns/filter.hpp"
#include "cgns/linear_model.hpp"
#include "cgns/sampler.hpp"
#include "cgns/simulate.hpp"
#include "cgns/triad.hpp"
#include "support.hpp"

using namespace cgns;

namespace {

Matrix col(std::initializer_list<double> v) {
  Matrix m(static_cast<long>(v.size()), 1);
  long i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

Matrix white(long n, std::uint64_t seed, int cols = 1) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Matrix m(n, cols);
  for (long i = 0; i < m.size(); ++i) m(i) = nd(gen);
  return m;
}

Matrix fixture_truth() {
  Matrix m(1000, 1);
  for (long j = 0; j < 1000; ++j) m(j, 0) = std::sin(0.01 * j) + 0.5 * std::sin(0.037 * j);
  return m;
}

Matrix fixture_estimate() {
  Matrix m = 0.8 * fixture_truth();
  for (long j = 0; j < 1000; ++j) m(j, 0) += 0.3 * std::cos(0.05 * j);
  return m;
}

}  // namespace

TEST_CASE("temporal statistics") {
  CHECK(temporal_stats(col({3.0, 3.0, 3.0})).std == 0.0);
  const TemporalStats s = temporal_stats(col({0.0, 2.0}));
  CHECK(s.mean(0) == 1.0);
  CHECK(s.std == doctest::Approx(std::sqrt(2.0)));
  const TemporalStats a = temporal_stats(col({1.0, 5.0, -2.0, 4.0}));
  const TemporalStats b = temporal_stats(col({4.0, -2.0, 1.0, 5.0}));
  CHECK(a.mean(0) == b.mean(0));
  CHECK(a.std == doctest::Approx(b.std));
}

TEST_CASE("srmse") {
  const Matrix t = fixture_truth();
  CHECK(srmse(t, t) == 0.0);
  CHECK(srmse(col({0.0, 2.0}), col({1.0, 1.0})) == doctest::Approx(1.0));
  const Matrix e = fixture_estimate();
  CHECK(srmse(2.0 * t, 2.0 * e) == doctest::Approx(srmse(t, e)).epsilon(1e-12));
  CHECK(srmse(t.array() + 3.0, e.array() + 3.0) == doctest::Approx(srmse(t, e)).epsilon(1e-12));
  CHECK_THROWS_AS(srmse(col({1.0, 1.0}), col({0.0, 2.0})), DegenerateSeries);
}

TEST_CASE("corr") {
  const Matrix t = fixture_truth();
  CHECK(corr(t, t) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(corr(t, -t) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(corr(t, t.array() + 4.0) == doctest::Approx(1.0).epsilon(1e-14));
  const Matrix e = fixture_estimate();
  CHECK(corr(t, 3.0 * e) == doctest::Approx(corr(t, e)).epsilon(1e-12));
  CHECK_THROWS_AS(corr(t, Matrix::Ones(t.rows(), 1)), DegenerateSeries);
}

TEST_CASE("conditional correlation") {
  const Matrix t = fixture_truth(), e = fixture_estimate();
  CHECK(corr_conditional(t, e, std::vector<bool>(t.rows(), true)) ==
        doctest::Approx(corr(t, e)).epsilon(1e-12));
  CHECK(corr_conditional(col({0.0, 2.0, 5.0}), col({0.0, 2.0, -1.0}), {true, true, false}) ==
        doctest::Approx(1.0));
  const auto mask = extreme_mask(t.col(0), 1.0);
  const long count = std::count(mask.begin(), mask.end(), true);
  CHECK(count == 187);
  CHECK(corr_conditional(t, e, mask) == doctest::Approx(0.27006700136059775).epsilon(1e-10));
  CHECK_THROWS_AS(corr_conditional(t, e, std::vector<bool>(t.rows(), false)), DegenerateSeries);
}

TEST_CASE("bias-variance decomposition") {
  const Matrix t = fixture_truth();
  TrajectoryEnsemble one;
  one.samples.push_back(t);
  const BiasVariance z = bias_variance(t, one);
  CHECK(z.bias_sq == 0.0);
  CHECK(z.variance_term == 0.0);
  CHECK(z.expected_sq_srmse == 0.0);

  TrajectoryEnsemble same;
  const Matrix e = fixture_estimate();
  for (int i = 0; i < 4; ++i) same.samples.push_back(e);
  const BiasVariance s = bias_variance(t, same);
  CHECK(std::abs(s.variance_term) < 1e-20);
  CHECK(s.bias_sq == doctest::Approx(std::pow(srmse(t, e), 2)));

  // About the empirical mean the identity is exact.
  TrajectoryEnsemble noisy;
  for (int i = 0; i < 50; ++i) noisy.samples.push_back(e + 0.3 * white(t.rows(), 100 + i));
  const BiasVariance bv = bias_variance(t, noisy);
  CHECK(bv.expected_sq_srmse == doctest::Approx(bv.bias_sq + bv.variance_term).epsilon(1e-10));
  double direct = 0.0;
  for (const auto& smp : noisy.samples) direct += std::pow(srmse(t, smp), 2);
  CHECK(bv.expected_sq_srmse == doctest::Approx(direct / 50.0).epsilon(1e-10));

  BiasVarianceAccumulator acc(t);
  for (const auto& smp : noisy.samples) acc.add(smp);
  CHECK(acc.count() == 50);
  const BiasVariance streamed = acc.result();
  CHECK(streamed.bias_sq == doctest::Approx(bv.bias_sq).epsilon(1e-10));
  CHECK(streamed.variance_term == doctest::Approx(bv.variance_term).epsilon(1e-10));
}

TEST_CASE("eta factor") {
  const Matrix mean = fixture_truth();
  CHECK(eta_factor(mean, mean) == doctest::Approx(1.0));
  const Matrix r = white(mean.rows(), 3);
  double prev = 2.0;
  for (double scale : {1.0, 10.0, 100.0}) {
    const double eta = eta_factor(mean, mean + scale * r);
    CHECK(eta < prev);
    prev = eta;
  }
  CHECK(prev < 0.02);
  TrajectoryEnsemble ens;
  ens.samples = {mean + r, mean + 2.0 * r};
  const EtaReport rep = eta_factor(mean, ens);
  REQUIRE(rep.per_sample.size() == 2);
  CHECK(rep.mean == doctest::Approx(0.5 * (rep.per_sample[0] + rep.per_sample[1])));
}

TEST_CASE("ACF basics") {
  const Matrix w = white(20000, 1);
  const AcfCurve a = acf(w, 50, 0.1);
  CHECK(a.values[0] == 1.0);
  CHECK(a.lags[10] == doctest::Approx(1.0));
  for (long s = 1; s <= 50; ++s) CHECK(std::abs(a.values[s]) <= 4.0 / std::sqrt(20000.0));

  // Direct evaluation of the biased trace estimator on a two-column series.
  const Matrix two = white(300, 2, 2);
  const AcfCurve b = acf(two, 5);
  const Vector mu = two.colwise().mean().transpose();
  double c0 = 0.0, c3 = 0.0;
  for (long j = 0; j < 300; ++j) c0 += (two.row(j).transpose() - mu).squaredNorm();
  for (long j = 0; j + 3 < 300; ++j)
    c3 += (two.row(j).transpose() - mu).dot(two.row(j + 3).transpose() - mu);
  CHECK(b.values[3] == doctest::Approx(c3 / c0).epsilon(1e-12));
  CHECK_THROWS_AS(acf(Matrix::Ones(10, 1), 3), DegenerateSeries);
}

TEST_CASE("OU ACF decays at the damping rate") {
  // ACF curves of eight independent 500-unit paths are averaged before the fit.
  const CgnsModel m = scalar_linear_model(0.0, -1.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0.0, 500.0, 1e-3);
  const long max_lag = g.index_of(1.0);
  const auto ens = simulate_ensemble(m, Vector::Zero(1), Vector::Zero(1), g, 8, 8, 0);
  std::vector<double> mean_acf(static_cast<std::size_t>(max_lag) + 1, 0.0), lags;
  for (const auto& tr : ens) {
    const AcfCurve a = acf(tr.y_path, max_lag, g.dt);
    lags = a.lags;
    for (std::size_t k = 0; k < mean_acf.size(); ++k) mean_acf[k] += a.values[k] / ens.size();
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k < mean_acf.size(); ++k) {
    num += lags[k] * std::log(mean_acf[k]);
    den += lags[k] * lags[k];
  }
  const double rate = -num / den;
  MESSAGE("fitted OU rate " << rate);
  CHECK(testing::rel_close(rate, 1.0, 0.10));
}

TEST_CASE("sample ACF is a convex combination of mean and residual ACFs") {
  const CgnsModel m = scalar_linear_model(1.0, -1.0, 1.0, 1.0);
  const TimeGrid g = TimeGrid::make(0.0, 200.0, 1e-3);
  const Trajectory tr = simulate_path(m, Vector::Zero(1), Vector::Zero(1), g, 12);
  const PosteriorSeries f = run_filter(m, tr.x_path, g, default_filter_init(1));
  const TrajectoryEnsemble e = run_forward_sampler(m, tr.x_path, g, f, 3, 1);
  Matrix mean(g.size(), 1);
  for (long j = 0; j < g.size(); ++j) mean(j, 0) = f.states[j].mean(0);
  const AcfDecomposition d = acf_decomposition(e.samples[0], mean, g.index_of(2.0), g.dt);
  CHECK(d.beta1 + d.beta2 == doctest::Approx(1.0));
  CHECK((d.beta1 > 0.0 && d.beta2 > 0.0));
  double worst = 0.0;
  for (std::size_t k = 0; k < d.sample.values.size(); ++k)
    worst = std::max(worst, std::abs(d.sample.values[k] -
                                     (d.beta1 * d.mean.values[k] + d.beta2 * d.residual.values[k])));
  MESSAGE("max convex-combination gap " << worst);
  CHECK(worst <= 0.05);
}

TEST_CASE("Welch PSD") {
  const double dt = 0.01;
  SUBCASE("sinusoid peak") {
    const double f0 = 5.0;
    Vector x(20000);
    for (long j = 0; j < x.size(); ++j) x(j) = std::sin(2.0 * std::numbers::pi * f0 * j * dt);
    const PsdEstimate p = psd_estimate(x, 1000, dt);
    const auto peak = std::max_element(p.power.begin(), p.power.end()) - p.power.begin();
    CHECK(p.freqs[peak] == doctest::Approx(f0));
  }
  SUBCASE("white noise is flat and satisfies Parseval") {
    const Vector x = 2.0 * white(100000, 5).col(0);
    const PsdEstimate p = psd_estimate(x, 512, dt);
    const double df = p.freqs[1] - p.freqs[0];
    double total = 0.0;
    for (double v : p.power) total += v * df;
    const double var = (x.array() - x.mean()).square().mean();
    CHECK(std::abs(total - var) <= 0.05 * var);
    // Flat at the two-sided level 2 * var * dt, checked on band averages.
    const double level = 2.0 * var * dt;
    const std::size_t nb = p.power.size();
    for (std::size_t b = 1; b + 1 < 8; ++b) {
      double s = 0.0;
      std::size_t cnt = 0;
      for (std::size_t i = b * nb / 8; i < (b + 1) * nb / 8; ++i, ++cnt) s += p.power[i];
      CHECK(testing::rel_close(s / cnt, level, 0.05));
    }
  }
  SUBCASE("Parseval on an OU path") {
    const CgnsModel m = scalar_linear_model(0.0, -1.0, 1.0, 1.0);
    const TimeGrid g = TimeGrid::make(0.0, 300.0, 1e-2);
    const Trajectory tr = simulate_path(m, Vector::Zero(1), Vector::Zero(1), g, 2);
    const Vector x = tr.y_path.col(0);
    const PsdEstimate p = psd_estimate(x, 4096, g.dt);
    const double df = p.freqs[1] - p.freqs[0];
    double total = 0.0;
    for (double v : p.power) total += v * df;
    const double var = (x.array() - x.mean()).square().mean();
    MESSAGE("Parseval ratio " << total / var);
    CHECK(std::abs(total - var) <= 0.05 * var);
  }
  CHECK_THROWS_AS(psd_estimate(Vector::Ones(100), 64, dt), InvalidInput);
  CHECK_THROWS_AS(psd_estimate(Vector::Ones(1000), 64, dt), DegenerateSeries);
}

TEST_CASE("uncertainty spectra in the decoupled case") {
  CoefficientSnapshot c;
  c.lambda_x = Matrix::Zero(1, 2);
  c.lambda_y.resize(2, 2);
  c.lambda_y << -1.0, 0.3, -0.3, -0.5;
  c.f_x = Vector::Zero(1);
  c.f_y = Vector::Zero(2);
  c.sigma1_x = Matrix::Ones(1, 1);
  c.sigma2_x = Matrix::Zero(1, 2);
  c.sigma1_y = Matrix::Zero(2, 1);
  c.sigma2_y = Matrix::Identity(2, 2);
  c.sigma2_y(1, 1) = 0.5;
  const CgnsModel m = constant_model(c);
  const TimeGrid g = TimeGrid::make(0.0, 1.0, 1e-2);
  const Trajectory tr = simulate_path(m, Vector::Zero(1), Vector::Zero(2), g, 1);
  const PosteriorSeries f = run_filter(m, tr.x_path, g, default_filter_init(2));
  const SpectrumTrack s = uncertainty_spectra(m, {{&tr.x_path, &f}});
  REQUIRE(s.times.size() == static_cast<std::size_t>(g.size()));
  for (std::size_t j = 0; j < s.times.size(); ++j) {
    CHECK(s.damping_forward.max[j] == doctest::Approx(s.damping_unconditional.max[j]));
    CHECK(s.damping_forward.min[j] == doctest::Approx(s.damping_unconditional.min[j]));
    CHECK(s.noise_forward.max[j] == doctest::Approx(1.0));
    CHECK(s.noise_backward.min[j] == doctest::Approx(0.25));
    CHECK(s.noise_unconditional.min[j] == doctest::Approx(0.25));
    CHECK(std::abs(s.difference.min[j]) < 1e-14);
    CHECK(std::abs(s.difference.max[j]) < 1e-14);
  }
  const SpectrumTrack strided = uncertainty_spectra(m, {{&tr.x_path, &f}}, 10);
  CHECK(strided.times.size() == 11);
}

TEST_CASE("triad uncertainty hierarchy") {
  const CgnsModel m = triad_model();
  const TimeGrid g = TimeGrid::make(0.0, 20.0, 1e-3);
  const Trajectory tr = simulate_path(m, Vector::Zero(1), Vector::Zero(2), g, 77);
  const PosteriorSeries f = run_filter(m, tr.x_path, g, default_filter_init(2));
  const SpectrumTrack s = uncertainty_spectra(m, {{&tr.x_path, &f}});
  CHECK(s.min_eig_syy_minus_b >= -kTolPsd);
  CHECK(s.min_eig_rgr >= -kTolPsd);
  CHECK(s.min_noise_eig >= -kTolPsd);
  const double lowest = *std::min_element(s.difference.min.begin(), s.difference.min.end());
  CHECK(lowest < 0.0);
}
