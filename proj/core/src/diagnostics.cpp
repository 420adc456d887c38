#include "cgns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cgns/errors.hpp"
#include "cgns/smoother.hpp"
#include "spectral.hpp"

namespace cgns {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << what << ": series shapes differ (" << a.rows() << "x" << a.cols() << " vs "
       << b.rows() << "x" << b.cols() << ")";
    throw InvalidInput(os.str());
  }
}

double sum_sq_anomaly(const Matrix& s, const Vector& mean) {
  return (s.rowwise() - mean.transpose()).squaredNorm();
}

double nonzero_std(const Matrix& s, const char* what) {
  const double sd = temporal_stats(s).std;
  if (!(sd > 0.0)) throw DegenerateSeries(std::string(what) + ": series has zero temporal spread");
  return sd;
}

}  // namespace

TemporalStats temporal_stats(const Matrix& series) {
  if (series.rows() < 2) throw InvalidInput("temporal statistics need at least two time points");
  const double J = static_cast<double>(series.rows() - 1);
  TemporalStats st;
  st.mean = series.colwise().mean().transpose();
  st.std = std::sqrt(sum_sq_anomaly(series, st.mean) / J);
  return st;
}

double srmse(const Matrix& truth, const Matrix& estimate) {
  require_same_shape(truth, estimate, "srmse");
  const double sd = nonzero_std(truth, "srmse");
  const double J = static_cast<double>(truth.rows() - 1);
  return std::sqrt((truth - estimate).squaredNorm() / J) / sd;
}

double corr(const Matrix& truth, const Matrix& estimate) {
  require_same_shape(truth, estimate, "corr");
  const TemporalStats a = temporal_stats(truth);
  const TemporalStats b = temporal_stats(estimate);
  if (!(a.std > 0.0) || !(b.std > 0.0))
    throw DegenerateSeries("corr: series has zero temporal spread");
  const Matrix da = truth.rowwise() - a.mean.transpose();
  const Matrix db = estimate.rowwise() - b.mean.transpose();
  const double J = static_cast<double>(truth.rows() - 1);
  return (da.array() * db.array()).sum() / (J * a.std * b.std);
}

double corr_conditional(const Matrix& truth, const Matrix& estimate,
                        const std::vector<bool>& mask) {
  require_same_shape(truth, estimate, "corr_conditional");
  if (static_cast<Eigen::Index>(mask.size()) != truth.rows())
    throw InvalidInput("corr_conditional: mask length does not match series");
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) rows.push_back(static_cast<Eigen::Index>(i));
  if (rows.size() < 2) throw DegenerateSeries("corr_conditional: mask selects fewer than 2 rows");
  return corr(truth(rows, Eigen::all), estimate(rows, Eigen::all));
}

std::vector<bool> extreme_mask(const Vector& column, double theta) {
  const TemporalStats st = temporal_stats(column);
  const double threshold = st.mean(0) + theta * st.std;
  std::vector<bool> mask(static_cast<std::size_t>(column.size()));
  for (Eigen::Index i = 0; i < column.size(); ++i)
    mask[static_cast<std::size_t>(i)] = column(i) > threshold;
  return mask;
}

BiasVarianceAccumulator::BiasVarianceAccumulator(Matrix truth) : truth_(std::move(truth)) {
  if (truth_.rows() < 2) throw InvalidInput("bias_variance: truth needs at least two time points");
  sum_ = Matrix::Zero(truth_.rows(), truth_.cols());
  sum_sq_norm_ = Vector::Zero(truth_.rows());
}

void BiasVarianceAccumulator::add(const Matrix& sample) {
  require_same_shape(truth_, sample, "bias_variance");
  sum_ += sample;
  sum_sq_norm_ += sample.rowwise().squaredNorm();
  sum_sq_truth_err_ += (truth_ - sample).squaredNorm();
  ++count_;
}

Matrix BiasVarianceAccumulator::ensemble_mean() const {
  if (count_ == 0) throw InvalidInput("bias_variance: empty ensemble");
  return sum_ / static_cast<double>(count_);
}

BiasVariance BiasVarianceAccumulator::result(const std::optional<Matrix>& mean_series) const {
  if (count_ == 0) throw InvalidInput("bias_variance: empty ensemble");
  const double m = static_cast<double>(count_);
  const double J = static_cast<double>(truth_.rows() - 1);
  const double var_truth = std::pow(nonzero_std(truth_, "bias_variance"), 2);
  const Matrix mean = mean_series ? *mean_series : ensemble_mean();
  require_same_shape(truth_, mean, "bias_variance");
  // sum_i |mean_j - s_ij|^2 = sum_i |s_ij|^2 - 2 <mean_j, sum_i s_ij> + m |mean_j|^2
  const double spread = sum_sq_norm_.sum() - 2.0 * (mean.array() * sum_.array()).sum() +
                        m * mean.squaredNorm();
  BiasVariance bv;
  bv.bias_sq = (truth_ - mean).squaredNorm() / J / var_truth;
  bv.variance_term = std::max(0.0, spread) / m / J / var_truth;
  bv.expected_sq_srmse = sum_sq_truth_err_ / m / J / var_truth;
  return bv;
}

BiasVariance bias_variance(const Matrix& truth, const TrajectoryEnsemble& ensemble,
                           const std::optional<Matrix>& mean_series) {
  if (ensemble.samples.empty()) throw InvalidInput("bias_variance: empty ensemble");
  BiasVarianceAccumulator acc(truth);
  for (const auto& s : ensemble.samples) acc.add(s);
  return acc.result(mean_series);
}

double eta_factor(const Matrix& mean_series, const Matrix& sample) {
  require_same_shape(mean_series, sample, "eta_factor");
  // The denominator sum expands |m' + r'|^2 with the cross term, i.e. it is
  // the anomaly energy of the sample itself.
  const double num = sum_sq_anomaly(mean_series, mean_series.colwise().mean().transpose());
  const double den = sum_sq_anomaly(sample, sample.colwise().mean().transpose());
  if (!(den > 0.0)) throw DegenerateSeries("eta_factor: sample has zero temporal spread");
  return std::sqrt(num) / std::sqrt(den);
}

EtaReport eta_factor(const Matrix& mean_series, const TrajectoryEnsemble& ensemble) {
  if (ensemble.samples.empty()) throw InvalidInput("eta_factor: empty ensemble");
  EtaReport rep;
  for (const auto& s : ensemble.samples) rep.per_sample.push_back(eta_factor(mean_series, s));
  double sum = 0.0;
  for (double v : rep.per_sample) sum += v;
  rep.mean = sum / static_cast<double>(rep.per_sample.size());
  return rep;
}

AcfCurve acf(const Matrix& series, long max_lag, double dt) {
  if (max_lag < 0 || max_lag >= series.rows())
    throw InvalidInput("acf: max_lag must be below the series length");
  std::vector<double> total(static_cast<std::size_t>(max_lag) + 1, 0.0);
  const Vector mean = series.colwise().mean().transpose();
  std::vector<double> col(static_cast<std::size_t>(series.rows()));
  for (Eigen::Index c = 0; c < series.cols(); ++c) {
    for (Eigen::Index j = 0; j < series.rows(); ++j)
      col[static_cast<std::size_t>(j)] = series(j, c) - mean(c);
    const auto lp = detail::lagged_products(col, max_lag);
    for (std::size_t s = 0; s < total.size(); ++s) total[s] += lp[s];
  }
  if (!(total[0] > 0.0)) throw DegenerateSeries("acf: series has zero temporal spread");
  AcfCurve out;
  out.lags.resize(total.size());
  out.values.resize(total.size());
  for (std::size_t s = 0; s < total.size(); ++s) {
    out.lags[s] = static_cast<double>(s) * dt;
    out.values[s] = total[s] / total[0];
  }
  out.values[0] = 1.0;
  return out;
}

AcfDecomposition acf_decomposition(const Matrix& sample, const Matrix& mean_series, long max_lag,
                                   double dt) {
  require_same_shape(sample, mean_series, "acf_decomposition");
  const Matrix residual = sample - mean_series;
  AcfDecomposition d;
  d.sample = acf(sample, max_lag, dt);
  d.mean = acf(mean_series, max_lag, dt);
  d.residual = acf(residual, max_lag, dt);
  const double vm = sum_sq_anomaly(mean_series, mean_series.colwise().mean().transpose());
  const double vr = sum_sq_anomaly(residual, residual.colwise().mean().transpose());
  d.beta1 = vm / (vm + vr);
  d.beta2 = 1.0 - d.beta1;
  d.sample.beta1 = d.beta1;
  d.sample.beta2 = d.beta2;
  return d;
}

PsdEstimate psd_estimate(const Vector& series, long segment_len, double dt) {
  const long n = series.size();
  if (segment_len < 2 || n < 2 * segment_len)
    throw InvalidInput("psd_estimate: series must hold at least two segments");
  if (!(dt > 0.0)) throw InvalidInput("psd_estimate: dt must be positive");
  const auto L = static_cast<std::size_t>(segment_len);
  std::vector<double> w(L);
  double wsq = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                 static_cast<double>(L)));
    wsq += w[i] * w[i];
  }
  const long step = segment_len / 2;
  const long nseg = (n - segment_len) / step + 1;
  const double fs = 1.0 / dt;
  std::vector<double> acc(L / 2 + 1, 0.0);
  std::vector<double> seg(L);
  bool any_spread = false;
  for (long s = 0; s < nseg; ++s) {
    const long off = s * step;
    double mean = 0.0;
    for (std::size_t i = 0; i < L; ++i) mean += series(off + static_cast<long>(i));
    mean /= static_cast<double>(L);
    for (std::size_t i = 0; i < L; ++i) {
      seg[i] = (series(off + static_cast<long>(i)) - mean) * w[i];
      if (seg[i] != 0.0) any_spread = true;
    }
    const auto p = detail::periodogram_raw(seg);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += p[k];
  }
  if (!any_spread) throw DegenerateSeries("psd_estimate: series has zero temporal spread");
  PsdEstimate out;
  out.freqs.resize(acc.size());
  out.power.resize(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const bool edge = k == 0 || (L % 2 == 0 && k == L / 2);
    out.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(L);
    out.power[k] = (edge ? 1.0 : 2.0) * acc[k] / (fs * wsq * static_cast<double>(nseg));
  }
  return out;
}

SpectrumTrack uncertainty_spectra(const CgnsModel& model, const std::vector<SpectrumRun>& runs,
                                  long stride) {
  if (runs.empty()) throw InvalidInput("uncertainty_spectra: no runs");
  if (stride < 1) throw InvalidInput("uncertainty_spectra: stride must be positive");
  const TimeGrid& grid = runs.front().filter->grid;
  for (const auto& r : runs) {
    if (!r.x_path || !r.filter) throw InvalidInput("uncertainty_spectra: incomplete run");
    if (r.filter->grid.n_steps != grid.n_steps || r.x_path->rows() != grid.size())
      throw InvalidInput("uncertainty_spectra: runs must share one time grid");
  }
  SpectrumTrack tr;
  EigTrack* tracks[] = {&tr.damping_unconditional, &tr.damping_forward, &tr.damping_backward,
                        &tr.noise_unconditional,   &tr.noise_forward,   &tr.noise_backward,
                        &tr.difference};
  const double inf = std::numeric_limits<double>::infinity();
  tr.min_eig_syy_minus_b = inf;
  tr.min_eig_rgr = inf;
  tr.min_noise_eig = inf;
  const double nruns = static_cast<double>(runs.size());
  for (long j = 0; j <= grid.n_steps; j += stride) {
    const double t = grid.time(j);
    tr.times.push_back(t);
    for (auto* e : tracks) {
      e->max.push_back(0.0);
      e->min.push_back(0.0);
    }
    for (const auto& run : runs) {
      const LocalCoefficients c = local_coefficients(model, t, run.x_path->row(j).transpose());
      const Matrix& rf = run.filter->states[static_cast<std::size_t>(j)].cov;
      require_filter_pd(rf, t);
      const Matrix rgr = symmetrize(rf * c.gamma * rf);
      const Matrix noise_fwd = c.b_mat + rgr;
      const Matrix back = -(rf.llt().solve(c.b_mat).transpose() + c.a_mat);
      const EigenRange ranges[] = {
          real_part_range(c.snap.lambda_y), real_part_range(c.a_mat - rf * c.gamma),
          real_part_range(back),            symmetric_eigen_range(c.gr.syy),
          symmetric_eigen_range(noise_fwd), symmetric_eigen_range(c.b_mat),
          symmetric_eigen_range(c.gr.syy - noise_fwd)};
      for (std::size_t i = 0; i < 7; ++i) {
        tracks[i]->max.back() += ranges[i].max / nruns;
        tracks[i]->min.back() += ranges[i].min / nruns;
      }
      tr.min_noise_eig =
          std::min({tr.min_noise_eig, ranges[3].min, ranges[4].min, ranges[5].min});
      tr.min_eig_syy_minus_b = std::min(tr.min_eig_syy_minus_b, min_eigenvalue(c.gr.syy - c.b_mat));
      tr.min_eig_rgr = std::min(tr.min_eig_rgr, min_eigenvalue(noise_fwd - c.b_mat));
    }
  }
  return tr;
}

}  // namespace cgns
