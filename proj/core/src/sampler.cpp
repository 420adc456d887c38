#include "cgns/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "cgns/errors.hpp"
#include "cgns/parallel.hpp"
#include "cgns/smoother.hpp"

namespace cgns {

const char* to_string(SampleDirection d) noexcept {
  return d == SampleDirection::Forward ? "forward" : "backward";
}

namespace {

struct ForwardTerms {
  Matrix damping;     // A - R Gamma
  Matrix noise_sqrt;  // (B + R Gamma R)^{1/2}
};

ForwardTerms forward_terms(const LocalCoefficients& c, const Matrix& r_f, double t) {
  const Matrix rg = r_f * c.gamma;
  const Matrix noise = clamp_psd(c.b_mat + rg * r_f, kTolPsd, "B + R Gamma R", t);
  return {c.a_mat - rg, psd_sqrt(noise, kTolPsd, t)};
}

struct BackwardTerms {
  Matrix damping;     // B R_f^-1 + A
  Vector shift;       // -lambda_y mu_f - f_y + damping mu_f, times dt, plus the x term
  Matrix noise_sqrt;  // B^{1/2}
};

BackwardTerms backward_terms(const LocalCoefficients& c, const Vector& x_t, const Vector& x_next,
                             const Vector& mu_f, const Matrix& r_f, double dt, double t) {
  require_filter_pd(r_f, t);
  const auto& s = c.snap;
  Eigen::LLT<Matrix> llt(r_f);
  BackwardTerms bt;
  bt.damping = llt.solve(c.b_mat).transpose() + c.a_mat;
  bt.shift = (-s.lambda_y * mu_f - s.f_y + bt.damping * mu_f) * dt +
             c.cross_gain * ((x_t - x_next) + (s.lambda_x * mu_f + s.f_x) * dt);
  bt.noise_sqrt = psd_sqrt(c.b_mat, kTolPsd, t);
  return bt;
}

void check_filter(const PosteriorSeries& fs, const TimeGrid& grid, int l) {
  if (fs.kind != SeriesKind::Filter) throw InvalidInput("sampler needs a filter series");
  if (static_cast<long>(fs.states.size()) != grid.size())
    throw InvalidInput("filter series length does not match the time grid");
  if (fs.states.front().mean.size() != l) throw InvalidInput("filter series has wrong dimension");
}

void set_init(SamplerPlan& plan, const SamplerInit& init, const GaussianState& start, double t) {
  const int l = plan.l;
  if (init.mode == SamplerInit::Mode::PointMass) {
    if (init.point.size() != l) throw InvalidInput("sampler point-mass start has wrong dimension");
    plan.init_mean = init.point;
    plan.init_sqrt = Matrix::Zero(l, l);
  } else {
    plan.init_mean = start.mean;
    plan.init_sqrt = psd_sqrt(start.cov, kTolPsd, t);
  }
}

void store_kernel(double* out, const Matrix& m, const Vector& c, const Matrix& n) {
  const auto l = c.size();
  for (Eigen::Index a = 0; a < l; ++a)
    for (Eigen::Index b = 0; b < l; ++b) out[a * l + b] = m(a, b);
  for (Eigen::Index a = 0; a < l; ++a) out[l * l + a] = c(a);
  for (Eigen::Index a = 0; a < l; ++a)
    for (Eigen::Index b = 0; b < l; ++b) out[l * l + l + a * l + b] = n(a, b);
}

std::size_t kernel_size(int l) { return static_cast<std::size_t>(2 * l * l + l); }

}  // namespace

Vector forward_sample_step(const CgnsModel& model, double t, const Vector& x_j,
                           const Vector& mu_f_j, const Vector& mu_f_next, const Matrix& r_f_j,
                           const Vector& y_hat, double dt, const Vector& eps) {
  const LocalCoefficients c = local_coefficients(model, t, x_j);
  const ForwardTerms ft = forward_terms(c, r_f_j, t);
  return y_hat + (mu_f_next - mu_f_j) + ft.damping * (y_hat - mu_f_j) * dt +
         ft.noise_sqrt * eps * std::sqrt(dt);
}

Vector backward_sample_step(const CgnsModel& model, double t, const Vector& x_t,
                            const Vector& x_next, const Vector& mu_f_t, const Matrix& r_f_t,
                            const Vector& y_hat_next, double dt, const Vector& eps) {
  const LocalCoefficients c = local_coefficients(model, t, x_t);
  const BackwardTerms bt = backward_terms(c, x_t, x_next, mu_f_t, r_f_t, dt, t);
  return y_hat_next - bt.damping * y_hat_next * dt + bt.shift +
         bt.noise_sqrt * eps * std::sqrt(dt);
}

Vector backward_sample_step_alternative(const CgnsModel& model, double t, const Vector& x_t,
                                        const Matrix& r_f_t, const Vector& mu_s_t,
                                        const Vector& mu_s_next, const Vector& y_hat_next,
                                        double dt, const Vector& eps) {
  require_filter_pd(r_f_t, t);
  const LocalCoefficients c = local_coefficients(model, t, x_t);
  const Matrix damping = r_f_t.llt().solve(c.b_mat).transpose() + c.a_mat;
  return y_hat_next + (mu_s_t - mu_s_next) - damping * (y_hat_next - mu_s_next) * dt +
         psd_sqrt(c.b_mat, kTolPsd, t) * eps * std::sqrt(dt);
}

SamplerPlan make_forward_plan(const CgnsModel& model, const Matrix& x_path, const TimeGrid& grid,
                              const PosteriorSeries& fs, const SamplerInit& init) {
  detail::check_series_shape(model, x_path, grid);
  check_filter(fs, grid, model.l());
  SamplerPlan plan;
  plan.direction = SampleDirection::Forward;
  plan.grid = grid;
  plan.l = model.l();
  set_init(plan, init, fs.states.front(), grid.t0);
  const std::size_t ks = kernel_size(plan.l);
  plan.kernels.resize(ks * static_cast<std::size_t>(grid.n_steps));
  const double sq = std::sqrt(grid.dt);
  const Matrix I = Matrix::Identity(plan.l, plan.l);
  for (long j = 0; j < grid.n_steps; ++j) {
    const double t = grid.time(j);
    const auto& st = fs.states[static_cast<std::size_t>(j)];
    const auto& nx = fs.states[static_cast<std::size_t>(j + 1)];
    const LocalCoefficients c = local_coefficients(model, t, x_path.row(j).transpose());
    const ForwardTerms ft = forward_terms(c, st.cov, t);
    const Matrix m = I + ft.damping * grid.dt;
    const Vector shift = nx.mean - st.mean - ft.damping * st.mean * grid.dt;
    store_kernel(plan.kernels.data() + ks * static_cast<std::size_t>(j), m, shift,
                 ft.noise_sqrt * sq);
  }
  return plan;
}

SamplerPlan make_backward_plan(const CgnsModel& model, const Matrix& x_path,
                               const TimeGrid& grid, const PosteriorSeries& fs,
                               const SamplerInit& init) {
  detail::check_series_shape(model, x_path, grid);
  check_filter(fs, grid, model.l());
  SamplerPlan plan;
  plan.direction = SampleDirection::Backward;
  plan.grid = grid;
  plan.l = model.l();
  set_init(plan, init, fs.states.back(), grid.time(grid.n_steps));
  const std::size_t ks = kernel_size(plan.l);
  plan.kernels.resize(ks * static_cast<std::size_t>(grid.n_steps));
  const double sq = std::sqrt(grid.dt);
  const Matrix I = Matrix::Identity(plan.l, plan.l);
  for (long j = 0; j < grid.n_steps; ++j) {
    const double t = grid.time(j);
    const auto& st = fs.states[static_cast<std::size_t>(j)];
    const Vector xt = x_path.row(j).transpose();
    const Vector xn = x_path.row(j + 1).transpose();
    const LocalCoefficients c = local_coefficients(model, t, xt);
    const BackwardTerms bt = backward_terms(c, xt, xn, st.mean, st.cov, grid.dt, t);
    store_kernel(plan.kernels.data() + ks * static_cast<std::size_t>(j), I - bt.damping * grid.dt,
                 bt.shift, bt.noise_sqrt * sq);
  }
  return plan;
}

std::uint64_t sample_seed(SampleDirection direction, std::uint64_t seed, std::size_t i) noexcept {
  const StreamLabel label = direction == SampleDirection::Forward ? StreamLabel::ForwardSampler
                                                                  : StreamLabel::BackwardSampler;
  return sub_seed(stream_seed(seed, label), i);
}

void generate_sample(const SamplerPlan& plan, std::uint64_t seed, Matrix& path) {
  const int l = plan.l;
  const long J = plan.grid.n_steps;
  path.resize(J + 1, l);
  NormalRng rng(seed);
  // Small fixed buffers; l is the hidden dimension and rarely exceeds a few.
  std::vector<double> y(static_cast<std::size_t>(l)), yn(static_cast<std::size_t>(l)),
      eps(static_cast<std::size_t>(l));
  rng.fill(eps.data(), eps.size());
  for (int a = 0; a < l; ++a) {
    double v = plan.init_mean(a);
    for (int b = 0; b < l; ++b) v += plan.init_sqrt(a, b) * eps[static_cast<std::size_t>(b)];
    y[static_cast<std::size_t>(a)] = v;
  }
  const std::size_t ks = kernel_size(l);
  const bool fwd = plan.direction == SampleDirection::Forward;
  long idx = fwd ? 0 : J;
  for (int a = 0; a < l; ++a) path(idx, a) = y[static_cast<std::size_t>(a)];
  for (long s = 0; s < J; ++s) {
    const long j = fwd ? s : J - 1 - s;
    const double* k = plan.kernels.data() + ks * static_cast<std::size_t>(j);
    const double* c = k + l * l;
    const double* n = c + l;
    rng.fill(eps.data(), eps.size());
    for (int a = 0; a < l; ++a) {
      double v = c[a];
      for (int b = 0; b < l; ++b)
        v += k[a * l + b] * y[static_cast<std::size_t>(b)] +
             n[a * l + b] * eps[static_cast<std::size_t>(b)];
      yn[static_cast<std::size_t>(a)] = v;
    }
    std::swap(y, yn);
    idx = fwd ? j + 1 : j;
    for (int a = 0; a < l; ++a) path(idx, a) = y[static_cast<std::size_t>(a)];
  }
  if (!path.allFinite() || path.cwiseAbs().maxCoeff() > kBlowupThreshold)
    throw NonFiniteState(plan.grid.t0, std::string(to_string(plan.direction)) + " sample path");
}

void for_each_sample(const SamplerPlan& plan, std::uint64_t seed, std::size_t m,
                     unsigned threads,
                     const std::function<void(std::size_t, const Matrix&)>& fn) {
  const std::size_t workers = resolve_threads(threads);
  const std::size_t block = std::max<std::size_t>(1, workers * 4);
  std::vector<Matrix> buf(std::min(block, m));
  for (std::size_t lo = 0; lo < m; lo += block) {
    const std::size_t n = std::min(block, m - lo);
    parallel_for(n, static_cast<unsigned>(workers), [&](std::size_t i) {
      generate_sample(plan, sample_seed(plan.direction, seed, lo + i), buf[i]);
    });
    for (std::size_t i = 0; i < n; ++i) fn(lo + i, buf[i]);
  }
}

TrajectoryEnsemble sample_ensemble(const SamplerPlan& plan, const Matrix& x_path,
                                   std::uint64_t seed, std::size_t m, unsigned threads) {
  if (m < 1) throw InvalidInput("ensemble size must be at least 1");
  TrajectoryEnsemble ens;
  ens.grid = plan.grid;
  ens.observed_x = x_path;
  ens.direction = plan.direction;
  ens.seed = seed;
  ens.samples.resize(m);
  parallel_for(m, threads, [&](std::size_t i) {
    generate_sample(plan, sample_seed(plan.direction, seed, i), ens.samples[i]);
  });
  return ens;
}

TrajectoryEnsemble run_forward_sampler(const CgnsModel& model, const Matrix& x_path,
                                       const TimeGrid& grid, const PosteriorSeries& fs,
                                       std::uint64_t seed, std::size_t m,
                                       const SamplerInit& init, unsigned threads) {
  return sample_ensemble(make_forward_plan(model, x_path, grid, fs, init), x_path, seed, m,
                         threads);
}

TrajectoryEnsemble run_backward_sampler(const CgnsModel& model, const Matrix& x_path,
                                        const TimeGrid& grid, const PosteriorSeries& fs,
                                        std::uint64_t seed, std::size_t m,
                                        const SamplerInit& init, unsigned threads) {
  return sample_ensemble(make_backward_plan(model, x_path, grid, fs, init), x_path, seed, m,
                         threads);
}

std::vector<ProbeMoments> probe_moments(const SamplerPlan& plan, std::uint64_t seed,
                                        std::size_t m, const std::vector<long>& indices,
                                        unsigned threads) {
  if (m < 2) throw InvalidInput("probe moments need at least two samples");
  const int l = plan.l;
  std::vector<ProbeMoments> out(indices.size());
  for (std::size_t p = 0; p < indices.size(); ++p) {
    if (indices[p] < 0 || indices[p] > plan.grid.n_steps)
      throw InvalidInput("probe index outside the time grid");
    out[p].index = indices[p];
    out[p].time = plan.grid.time(indices[p]);
    out[p].mean = Vector::Zero(l);
    out[p].cov = Matrix::Zero(l, l);
  }
  // Welford updates in sample order keep the result independent of threads.
  std::size_t count = 0;
  for_each_sample(plan, seed, m, threads, [&](std::size_t, const Matrix& path) {
    ++count;
    for (auto& pm : out) {
      const Vector v = path.row(pm.index).transpose();
      const Vector delta = v - pm.mean;
      pm.mean += delta / static_cast<double>(count);
      pm.cov += delta * (v - pm.mean).transpose();
    }
  });
  for (auto& pm : out) pm.cov = symmetrize(pm.cov / static_cast<double>(count - 1));
  return out;
}

}  // namespace cgns
