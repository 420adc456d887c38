#include "cgns/simulate.hpp"

#include <cmath>
#include <algorithm>
#include <string>

#include "cgns/errors.hpp"
#include "cgns/parallel.hpp"
#include "cgns/rng.hpp"

namespace cgns {

TimeGrid TimeGrid::make(double t0, double t_end, double dt) {
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidInput("grid.dt must be positive");
  if (!std::isfinite(t0) || !std::isfinite(t_end) || t_end < t0)
    throw InvalidInput("grid.t_end must not be before grid.t0");
  TimeGrid g;
  g.t0 = t0;
  g.t_end = t_end;
  g.dt = dt;
  g.n_steps = std::lround((t_end - t0) / dt);
  return g;
}

long TimeGrid::index_of(double t) const noexcept {
  const long j = std::lround((t - t0) / dt);
  return std::clamp(j, 0L, n_steps);
}

namespace {

void guard_state(const Vector& x, const Vector& y, double t) {
  auto bad = [](const Vector& v) {
    return !v.allFinite() || (v.size() > 0 && v.cwiseAbs().maxCoeff() > kBlowupThreshold);
  };
  if (bad(x)) throw NonFiniteState(t, "observed state exceeded blow-up threshold");
  if (bad(y)) throw NonFiniteState(t, "hidden state exceeded blow-up threshold");
}

}  // namespace

std::pair<Vector, Vector> em_step(const CgnsModel& model, double t, const Vector& x,
                                  const Vector& y, double dt, const Vector& eps1,
                                  const Vector& eps2) {
  const CoefficientSnapshot s = model.evaluate(t, x);
  const double sq = std::sqrt(dt);
  Vector xn = x + (s.lambda_x * y + s.f_x) * dt + sq * (s.sigma1_x * eps1 + s.sigma2_x * eps2);
  Vector yn = y + (s.lambda_y * y + s.f_y) * dt + sq * (s.sigma1_y * eps1 + s.sigma2_y * eps2);
  guard_state(xn, yn, t + dt);
  return {std::move(xn), std::move(yn)};
}

Trajectory simulate_path(const CgnsModel& model, const Vector& x0, const Vector& y0,
                         const TimeGrid& grid, std::uint64_t seed) {
  if (x0.size() != model.k() || y0.size() != model.l())
    throw InvalidInput("initial state shape does not match model dimensions");
  Trajectory tr;
  tr.grid = grid;
  tr.seed = seed;
  tr.x_path.resize(grid.size(), model.k());
  tr.y_path.resize(grid.size(), model.l());
  tr.x_path.row(0) = x0.transpose();
  tr.y_path.row(0) = y0.transpose();
  guard_state(x0, y0, grid.t0);

  NormalRng rng(stream_seed(seed, StreamLabel::Truth));
  Vector x = x0, y = y0;
  Vector e1(model.d()), e2(model.r());
  for (long j = 0; j < grid.n_steps; ++j) {
    rng.fill(e1);
    rng.fill(e2);
    auto [xn, yn] = em_step(model, grid.time(j), x, y, grid.dt, e1, e2);
    x = std::move(xn);
    y = std::move(yn);
    tr.x_path.row(j + 1) = x.transpose();
    tr.y_path.row(j + 1) = y.transpose();
  }
  return tr;
}

std::vector<Trajectory> simulate_ensemble(const CgnsModel& model, const Vector& x0,
                                          const Vector& y0, const TimeGrid& grid,
                                          std::uint64_t seed, std::size_t m, unsigned threads) {
  if (m < 1) throw InvalidInput("ensemble size must be at least 1");
  std::vector<Trajectory> out(m);
  parallel_for(m, threads, [&](std::size_t i) {
    try {
      out[i] = simulate_path(model, x0, y0, grid, sub_seed(seed, i));
    } catch (const NonFiniteState& e) {
      throw NonFiniteState(e.time(), "ensemble member " + std::to_string(i));
    }
  });
  return out;
}

}  // namespace cgns
