#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cgns/model.hpp"

namespace cgns {

/// Uniform grid t_j = t0 + j*dt, j = 0..n_steps.
struct TimeGrid {
  double t0 = 0.0;
  double t_end = 0.0;
  double dt = 1e-3;
  long n_steps = 0;

  /// Validates dt > 0 and t_end >= t0; n_steps = round((t_end - t0)/dt).
  static TimeGrid make(double t0, double t_end, double dt);

  double time(long j) const noexcept { return t0 + static_cast<double>(j) * dt; }
  long size() const noexcept { return n_steps + 1; }
  /// Nearest grid index to t, clamped to [0, n_steps].
  long index_of(double t) const noexcept;
};

struct Trajectory {
  TimeGrid grid;
  Matrix x_path;  // (J+1) x k
  Matrix y_path;  // (J+1) x l
  std::uint64_t seed = 0;
};

/// States with an entry above this magnitude abort the run.
inline constexpr double kBlowupThreshold = 1e8;

std::pair<Vector, Vector> em_step(const CgnsModel& model, double t, const Vector& x,
                                  const Vector& y, double dt, const Vector& eps1,
                                  const Vector& eps2);

/// Noise comes from stream_seed(seed, Truth): per step d normals for W1, then
/// r normals for W2.
Trajectory simulate_path(const CgnsModel& model, const Vector& x0, const Vector& y0,
                         const TimeGrid& grid, std::uint64_t seed);

/// Member i equals simulate_path(..., sub_seed(seed, i)); output does not
/// depend on `threads`.
std::vector<Trajectory> simulate_ensemble(const CgnsModel& model, const Vector& x0,
                                          const Vector& y0, const TimeGrid& grid,
                                          std::uint64_t seed, std::size_t m,
                                          unsigned threads = 1);

}  // namespace cgns
