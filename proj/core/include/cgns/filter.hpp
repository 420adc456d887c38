#pragma once

#include <string>
#include <vector>

#include "cgns/model.hpp"
#include "cgns/simulate.hpp"

namespace cgns {

struct GaussianState {
  Vector mean;
  Matrix cov;
};

enum class SeriesKind { Filter, Smoother };

const char* to_string(SeriesKind kind) noexcept;

struct PosteriorSeries {
  TimeGrid grid;
  std::vector<GaussianState> states;
  SeriesKind kind = SeriesKind::Filter;
  std::string source_path_id;
  /// Steps at which a slightly negative eigenvalue of the covariance was
  /// clamped to zero.
  long psd_clamps = 0;
};

/// Trace above which a posterior covariance counts as blown up.
inline constexpr double kCovBlowupTrace = 1e8;

/// Mean 0, covariance 0.01 I.
GaussianState default_filter_init(int l);

/// One Euler step of the filter over [t, t+dt] with coefficients frozen at
/// (t, x_j). `clamped` is set when the new covariance needed a PSD clamp.
GaussianState filter_step(const CgnsModel& model, double t, const Vector& x_j,
                          const Vector& x_next, const GaussianState& state, double dt,
                          bool* clamped = nullptr);

GaussianState filter_step(const LocalCoefficients& c, double t, const Vector& x_j,
                          const Vector& x_next, const GaussianState& state, double dt,
                          bool* clamped = nullptr);

/// Mean update written as d mu = ((A - R Gamma) mu + f_y) dt + K (dx - f_x dt).
Vector filter_mean_step_alternative(const CgnsModel& model, double t, const Vector& x_j,
                                    const Vector& x_next, const GaussianState& state, double dt);

/// x_path is (J+1) x k on `grid`.
PosteriorSeries run_filter(const CgnsModel& model, const Matrix& x_path, const TimeGrid& grid,
                           const GaussianState& init, std::string source_path_id = {});

namespace detail {

/// Symmetrizes a covariance, clamps negative eigenvalues to zero, and throws
/// CovarianceBlowup / NonFiniteState on overflow.
Matrix finalize_cov(const Matrix& cov, double t, bool* clamped);

void check_series_shape(const CgnsModel& model, const Matrix& x_path, const TimeGrid& grid);

}  // namespace detail

}  // namespace cgns
