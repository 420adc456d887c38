#include "cgns/smoother.hpp"

#include "cgns/errors.hpp"

namespace cgns {

void require_filter_pd(const Matrix& r_f, double t) {
  const double lo = min_eigenvalue(r_f);
  if (!(lo > kTolPdStrict)) throw FilterCovSingular(t, lo);
}

GaussianState smoother_step(const LocalCoefficients& c, double t, const Vector& x_t,
                            const Vector& x_next, const GaussianState& filt,
                            const GaussianState& smo_next, double dt, bool* clamped) {
  require_filter_pd(filt.cov, t);
  const auto& s = c.snap;
  Eigen::LLT<Matrix> rf_llt(filt.cov);
  if (rf_llt.info() != Eigen::Success) throw FilterCovSingular(t, min_eigenvalue(filt.cov));
  const Matrix b_rinv = rf_llt.solve(c.b_mat).transpose();  // B R_f^-1
  const Vector& mu = smo_next.mean;
  const Matrix& r = smo_next.cov;

  GaussianState out;
  out.mean = mu - (s.lambda_y * mu + s.f_y - b_rinv * (filt.mean - mu)) * dt +
             c.cross_gain * ((x_t - x_next) + (s.lambda_x * mu + s.f_x) * dt);
  const Matrix damp = c.a_mat + b_rinv;
  const Matrix dr = damp * r;
  out.cov = detail::finalize_cov(r - (dr + dr.transpose() - c.b_mat) * dt, t, clamped);
  if (!out.mean.allFinite()) throw NonFiniteState(t, "smoother mean");
  return out;
}

GaussianState smoother_step(const CgnsModel& model, double t, const Vector& x_t,
                            const Vector& x_next, const GaussianState& filt,
                            const GaussianState& smo_next, double dt, bool* clamped) {
  return smoother_step(local_coefficients(model, t, x_t), t, x_t, x_next, filt, smo_next, dt,
                       clamped);
}

PosteriorSeries run_smoother(const CgnsModel& model, const Matrix& x_path, const TimeGrid& grid,
                             const PosteriorSeries& filter_series) {
  detail::check_series_shape(model, x_path, grid);
  if (filter_series.kind != SeriesKind::Filter)
    throw InvalidInput("run_smoother needs a filter series");
  if (static_cast<long>(filter_series.states.size()) != grid.size())
    throw InvalidInput("filter series length does not match the time grid");

  PosteriorSeries out;
  out.grid = grid;
  out.kind = SeriesKind::Smoother;
  out.source_path_id = filter_series.source_path_id;
  out.states.resize(filter_series.states.size());
  const long J = grid.n_steps;
  out.states[static_cast<std::size_t>(J)] = filter_series.states[static_cast<std::size_t>(J)];
  for (long j = J - 1; j >= 0; --j) {
    const auto ju = static_cast<std::size_t>(j);
    const double t = grid.time(j);
    const Vector xt = x_path.row(j).transpose();
    const Vector xn = x_path.row(j + 1).transpose();
    bool clamped = false;
    out.states[ju] = smoother_step(model, t, xt, xn, filter_series.states[ju],
                                   out.states[ju + 1], grid.dt, &clamped);
    if (clamped) ++out.psd_clamps;
  }
  return out;
}

GaussianState discrete_smoother_step_oracle(const CgnsModel& model, double t, const Vector& x_t,
                                            const Vector& x_next, const GaussianState& filt,
                                            const GaussianState& smo_next, double dt) {
  require_filter_pd(filt.cov, t);
  const LocalCoefficients c = local_coefficients(model, t, x_t);
  const auto& s = c.snap;
  const auto l = s.lambda_y.rows();
  const Matrix I = Matrix::Identity(l, l);
  const Matrix& rf = filt.cov;
  const Matrix rf_inv = rf.llt().solve(I);
  const Matrix sxx_inv = c.sxx_llt.solve(Matrix::Identity(s.lambda_x.rows(), s.lambda_x.rows()));

  const Matrix gx = s.lambda_x + c.gr.sxy * rf_inv;                       // k x l
  const Matrix kk = sxx_inv * gx;                                          // k x l
  const Matrix h = rf_inv * (s.lambda_y * rf + rf * s.lambda_y.transpose() + c.gr.syy);
  const Matrix c22 = rf + (s.lambda_y * rf + rf * s.lambda_y.transpose() + c.gr.syy) * dt;
  const Matrix cjj = rf * (I + s.lambda_y.transpose() * dt) * c22.inverse();
  const Matrix e = cjj + c.cross_gain * gx * dt;
  const Matrix krk = kk * rf * kk.transpose();                             // k x k
  const Matrix f =
      -rf * (kk.transpose() +
             (gx.transpose() * krk - rf_inv * h.transpose() * rf * kk.transpose() +
              s.lambda_y.transpose() * kk.transpose()) *
                 dt -
             s.lambda_x.transpose() * (sxx_inv + krk * dt));

  const Matrix prop = I + s.lambda_y * dt;
  GaussianState out;
  out.mean = filt.mean + e * (smo_next.mean - prop * filt.mean - s.f_y * dt) +
             f * (x_next - x_t - (s.lambda_x * filt.mean + s.f_x) * dt);
  out.cov = symmetrize(rf + e * (smo_next.cov * e.transpose() - prop * rf) -
                       f * s.lambda_x * rf * dt);
  return out;
}

}  // namespace cgns
