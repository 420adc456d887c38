#include "cgns/filter.hpp"

#include <sstream>

#include "cgns/errors.hpp"

namespace cgns {

const char* to_string(SeriesKind kind) noexcept {
  return kind == SeriesKind::Filter ? "filter" : "smoother";
}

GaussianState default_filter_init(int l) {
  return {Vector::Zero(l), 0.01 * Matrix::Identity(l, l)};
}

namespace detail {

Matrix finalize_cov(const Matrix& cov, double t, bool* clamped) {
  if (clamped) *clamped = false;
  if (!cov.allFinite()) throw NonFiniteState(t, "posterior covariance");
  Matrix s = symmetrize(cov);
  const double tr = s.trace();
  if (tr > kCovBlowupTrace) throw CovarianceBlowup(t, tr);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.eigenvalues().minCoeff() >= 0.0) return s;
  if (clamped) *clamped = true;
  const Vector pos = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * pos.asDiagonal() * es.eigenvectors().transpose();
}

void check_series_shape(const CgnsModel& model, const Matrix& x_path, const TimeGrid& grid) {
  if (x_path.rows() != grid.size() || x_path.cols() != model.k()) {
    std::ostringstream os;
    os << "observed path has shape " << x_path.rows() << "x" << x_path.cols() << ", expected "
       << grid.size() << "x" << model.k();
    throw InvalidInput(os.str());
  }
}

}  // namespace detail

GaussianState filter_step(const LocalCoefficients& c, double t, const Vector& x_j,
                          const Vector& x_next, const GaussianState& st, double dt,
                          bool* clamped) {
  const auto& s = c.snap;
  const Matrix K = c.kalman_gain(st.cov);
  const Vector innovation = x_next - x_j - (s.lambda_x * st.mean + s.f_x) * dt;
  GaussianState out;
  out.mean = st.mean + (s.lambda_y * st.mean + s.f_y) * dt + K * innovation;
  const Matrix ly_r = s.lambda_y * st.cov;
  const Matrix drift =
      ly_r + ly_r.transpose() + c.gr.syy - K * (c.gr.sxy + s.lambda_x * st.cov);
  out.cov = detail::finalize_cov(st.cov + drift * dt, t + dt, clamped);
  if (!out.mean.allFinite()) throw NonFiniteState(t + dt, "filter mean");
  return out;
}

GaussianState filter_step(const CgnsModel& model, double t, const Vector& x_j,
                          const Vector& x_next, const GaussianState& state, double dt,
                          bool* clamped) {
  return filter_step(local_coefficients(model, t, x_j), t, x_j, x_next, state, dt, clamped);
}

Vector filter_mean_step_alternative(const CgnsModel& model, double t, const Vector& x_j,
                                    const Vector& x_next, const GaussianState& st, double dt) {
  const LocalCoefficients c = local_coefficients(model, t, x_j);
  const Matrix K = c.kalman_gain(st.cov);
  const Matrix damping = c.a_mat - st.cov * c.gamma;
  return st.mean + (damping * st.mean + c.snap.f_y) * dt + K * (x_next - x_j - c.snap.f_x * dt);
}

PosteriorSeries run_filter(const CgnsModel& model, const Matrix& x_path, const TimeGrid& grid,
                           const GaussianState& init, std::string source_path_id) {
  detail::check_series_shape(model, x_path, grid);
  if (init.mean.size() != model.l() || init.cov.rows() != model.l() ||
      init.cov.cols() != model.l())
    throw InvalidInput("filter initial state shape does not match hidden dimension");
  if (min_eigenvalue(init.cov) < -kTolPsd)
    throw InvalidInput("filter initial covariance is not positive semidefinite");

  PosteriorSeries out;
  out.grid = grid;
  out.kind = SeriesKind::Filter;
  out.source_path_id = std::move(source_path_id);
  out.states.reserve(static_cast<std::size_t>(grid.size()));
  out.states.push_back(init);
  for (long j = 0; j < grid.n_steps; ++j) {
    const double t = grid.time(j);
    const Vector xj = x_path.row(j).transpose();
    const Vector xn = x_path.row(j + 1).transpose();
    bool clamped = false;
    out.states.push_back(filter_step(model, t, xj, xn, out.states.back(), grid.dt, &clamped));
    if (clamped) ++out.psd_clamps;
  }
  return out;
}

}  // namespace cgns
