#pragma once

#include <optional>
#include <vector>

#include "cgns/filter.hpp"
#include "cgns/sampler.hpp"

namespace cgns {

/// Rows are time points t_0..t_J, columns are components.
struct TemporalStats {
  Vector mean;       // sum over j = 0..J divided by J + 1
  double std = 0.0;  // sqrt(sum_j |c_j - mean|^2 / J)
};

TemporalStats temporal_stats(const Matrix& series);

double srmse(const Matrix& truth, const Matrix& estimate);
double corr(const Matrix& truth, const Matrix& estimate);

/// corr restricted to rows where mask is true, anomalies taken about the
/// masked means.
double corr_conditional(const Matrix& truth, const Matrix& estimate,
                        const std::vector<bool>& mask);

/// Rows where the column exceeds its temporal mean plus theta temporal stds.
std::vector<bool> extreme_mask(const Vector& column, double theta = 1.0);

struct BiasVariance {
  double bias_sq = 0.0;
  double variance_term = 0.0;
  double expected_sq_srmse = 0.0;
};

/// Streams an ensemble through per-time sums so that long paths never need to
/// be held together.
class BiasVarianceAccumulator {
 public:
  explicit BiasVarianceAccumulator(Matrix truth);

  void add(const Matrix& sample);
  std::size_t count() const noexcept { return count_; }
  Matrix ensemble_mean() const;

  /// Decomposition about `mean_series`, or about the ensemble mean when
  /// absent. Only about the ensemble mean do the three terms add up exactly.
  BiasVariance result(const std::optional<Matrix>& mean_series = std::nullopt) const;

 private:
  Matrix truth_;
  Matrix sum_;            // (J+1) x l
  Vector sum_sq_norm_;    // J+1
  double sum_sq_truth_err_ = 0.0;
  std::size_t count_ = 0;
};

BiasVariance bias_variance(const Matrix& truth, const TrajectoryEnsemble& ensemble,
                           const std::optional<Matrix>& mean_series = std::nullopt);

struct EtaReport {
  std::vector<double> per_sample;
  double mean = 0.0;
};

/// Ratio of the temporal spread of mean_series to that of each sample,
/// residuals taken as sample - mean_series.
double eta_factor(const Matrix& mean_series, const Matrix& sample);
EtaReport eta_factor(const Matrix& mean_series, const TrajectoryEnsemble& ensemble);

struct AcfCurve {
  std::vector<double> lags;  // time units
  std::vector<double> values;
  std::optional<double> beta1;
  std::optional<double> beta2;
};

/// Biased trace ACF normalized by lag 0, computed with an FFT.
AcfCurve acf(const Matrix& series, long max_lag, double dt = 1.0);

struct AcfDecomposition {
  AcfCurve sample;
  AcfCurve mean;
  AcfCurve residual;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Splits a sampled path into posterior mean and residual and weighs their
/// ACFs by their share of the total temporal variance.
AcfDecomposition acf_decomposition(const Matrix& sample, const Matrix& mean_series, long max_lag,
                                   double dt = 1.0);

struct PsdEstimate {
  std::vector<double> freqs;
  std::vector<double> power;
};

/// Welch estimate: Hann window, 50% overlap, mean removed per segment,
/// one-sided density so that sum(power) * df approximates the variance.
PsdEstimate psd_estimate(const Vector& series, long segment_len, double dt = 1.0);

struct EigTrack {
  std::vector<double> max;
  std::vector<double> min;
};

/// Eigenvalue tracks averaged over runs. Damping tracks hold real parts of the
/// eigenvalues of lambda_y, A - R Gamma and -(B R^-1 + A); noise tracks hold
/// eigenvalues of syy, B + R Gamma R and B; `difference` is syy - B - R Gamma R.
struct SpectrumTrack {
  std::vector<double> times;
  EigTrack damping_unconditional;
  EigTrack damping_forward;
  EigTrack damping_backward;
  EigTrack noise_unconditional;
  EigTrack noise_forward;
  EigTrack noise_backward;
  EigTrack difference;
  /// Worst case over runs and steps of min eig(syy - B) and min eig(R Gamma R).
  double min_eig_syy_minus_b = 0.0;
  double min_eig_rgr = 0.0;
  /// Worst case over runs of the smallest eigenvalue on any noise track.
  double min_noise_eig = 0.0;
};

struct SpectrumRun {
  const Matrix* x_path = nullptr;
  const PosteriorSeries* filter = nullptr;
};

SpectrumTrack uncertainty_spectra(const CgnsModel& model, const std::vector<SpectrumRun>& runs,
                                  long stride = 1);

struct MetricReport {
  double srmse = 0.0;
  double corr = 0.0;
  double corr_extreme = 0.0;
  double eta = 0.0;
  double bias_sq = 0.0;
  double variance_term = 0.0;
  double expected_sq_srmse = 0.0;
};

}  // namespace cgns
