#pragma once

#include "cgns/filter.hpp"

namespace cgns {

/// Filter covariances with a smaller minimum eigenvalue cannot be inverted by
/// the smoother or the backward sampler.
void require_filter_pd(const Matrix& r_f, double t);

/// One backward Euler step from t+dt to t. Coefficients are taken at (t, x_t),
/// smoother quantities on the right-hand side at t+dt.
GaussianState smoother_step(const CgnsModel& model, double t, const Vector& x_t,
                            const Vector& x_next, const GaussianState& filt,
                            const GaussianState& smo_next, double dt, bool* clamped = nullptr);

GaussianState smoother_step(const LocalCoefficients& c, double t, const Vector& x_t,
                            const Vector& x_next, const GaussianState& filt,
                            const GaussianState& smo_next, double dt, bool* clamped = nullptr);

/// Backward pass; states[J] is copied from the filter series.
PosteriorSeries run_smoother(const CgnsModel& model, const Matrix& x_path, const TimeGrid& grid,
                             const PosteriorSeries& filter_series);

/// Discrete-time smoother recursion with the E and F gain matrices expanded
/// to first order in dt. Kept as a cross-check for smoother_step.
GaussianState discrete_smoother_step_oracle(const CgnsModel& model, double t, const Vector& x_t,
                                            const Vector& x_next, const GaussianState& filt,
                                            const GaussianState& smo_next, double dt);

}  // namespace cgns
