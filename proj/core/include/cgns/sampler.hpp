#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cgns/filter.hpp"
#include "cgns/rng.hpp"

namespace cgns {

enum class SampleDirection { Forward, Backward };

const char* to_string(SampleDirection d) noexcept;

struct TrajectoryEnsemble {
  TimeGrid grid;
  Matrix observed_x;            // (J+1) x k
  std::vector<Matrix> samples;  // each (J+1) x l
  SampleDirection direction = SampleDirection::Forward;
  std::uint64_t seed = 0;
};

/// Initial draw for each sample: N(mean, cov) of the filter at the starting
/// end point, or a fixed point (e.g. a known truth value).
struct SamplerInit {
  enum class Mode { Gaussian, PointMass };
  Mode mode = Mode::Gaussian;
  Vector point;
};

/// y_hat' = y_hat + (mu_next - mu) + (A - R Gamma)(y_hat - mu) dt
///          + (B + R Gamma R)^{1/2} sqrt(dt) eps
Vector forward_sample_step(const CgnsModel& model, double t, const Vector& x_j,
                           const Vector& mu_f_j, const Vector& mu_f_next, const Matrix& r_f_j,
                           const Vector& y_hat, double dt, const Vector& eps);

/// One step from t+dt back to t, driven by the filter statistics at t and the
/// observation increment over [t, t+dt].
Vector backward_sample_step(const CgnsModel& model, double t, const Vector& x_t,
                            const Vector& x_next, const Vector& mu_f_t, const Matrix& r_f_t,
                            const Vector& y_hat_next, double dt, const Vector& eps);

/// Same step expressed through the smoother mean:
/// y_hat = y_hat+ + (mu_s - mu_s+) - (B R_f^-1 + A)(y_hat+ - mu_s+) dt + B^{1/2} sqrt(dt) eps
Vector backward_sample_step_alternative(const CgnsModel& model, double t, const Vector& x_t,
                                        const Matrix& r_f_t, const Vector& mu_s_t,
                                        const Vector& mu_s_next, const Vector& y_hat_next,
                                        double dt, const Vector& eps);

/// Every sampler step is affine in (y, eps): y_out = M y_in + c + N eps. A plan
/// stores these per-step kernels so that sampling many paths costs only small
/// matrix-vector products. Kernel j maps index j to j+1 (forward) or j+1 to j
/// (backward); kernels are stored row-major, l*l + l + l*l doubles each.
struct SamplerPlan {
  SampleDirection direction = SampleDirection::Forward;
  TimeGrid grid;
  int l = 0;
  std::vector<double> kernels;
  Vector init_mean;
  Matrix init_sqrt;  // zero for a point-mass start

  long start_index() const noexcept {
    return direction == SampleDirection::Forward ? 0 : grid.n_steps;
  }
};

SamplerPlan make_forward_plan(const CgnsModel& model, const Matrix& x_path, const TimeGrid& grid,
                              const PosteriorSeries& filter_series,
                              const SamplerInit& init = {});

SamplerPlan make_backward_plan(const CgnsModel& model, const Matrix& x_path,
                               const TimeGrid& grid, const PosteriorSeries& filter_series,
                               const SamplerInit& init = {});

/// Seed of sample i: sub_seed(stream_seed(seed, label), i) with the label
/// matching the plan direction. The first l normals draw the initial value;
/// then l normals per step in the order the steps are applied.
std::uint64_t sample_seed(SampleDirection direction, std::uint64_t seed, std::size_t i) noexcept;

/// Fills `path` ((J+1) x l) with one sample.
void generate_sample(const SamplerPlan& plan, std::uint64_t sample_seed, Matrix& path);

/// Generates m samples on up to `threads` workers and hands them to `fn` in
/// index order, so results never depend on the thread count. Only a bounded
/// block of paths is held in memory at a time.
void for_each_sample(const SamplerPlan& plan, std::uint64_t seed, std::size_t m,
                     unsigned threads,
                     const std::function<void(std::size_t, const Matrix&)>& fn);

TrajectoryEnsemble sample_ensemble(const SamplerPlan& plan, const Matrix& x_path,
                                   std::uint64_t seed, std::size_t m, unsigned threads = 1);

TrajectoryEnsemble run_forward_sampler(const CgnsModel& model, const Matrix& x_path,
                                       const TimeGrid& grid, const PosteriorSeries& filter_series,
                                       std::uint64_t seed, std::size_t m,
                                       const SamplerInit& init = {}, unsigned threads = 1);

TrajectoryEnsemble run_backward_sampler(const CgnsModel& model, const Matrix& x_path,
                                        const TimeGrid& grid,
                                        const PosteriorSeries& filter_series, std::uint64_t seed,
                                        std::size_t m, const SamplerInit& init = {},
                                        unsigned threads = 1);

/// Ensemble mean and covariance (divide by m - 1) at one grid index.
struct ProbeMoments {
  long index = 0;
  double time = 0.0;
  Vector mean;
  Matrix cov;
};

std::vector<ProbeMoments> probe_moments(const SamplerPlan& plan, std::uint64_t seed,
                                        std::size_t m, const std::vector<long>& indices,
                                        unsigned threads = 1);

}  // namespace cgns
