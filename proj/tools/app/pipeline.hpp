#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"

#include "cgns/diagnostics.hpp"
#include "config.hpp"

namespace cgns::app {

namespace fs = std::filesystem;

Matrix mean_matrix(const PosteriorSeries& series);

/// What to collect while streaming one sampler ensemble.
struct EnsembleRequest {
  std::uint64_t seed = 0;
  std::size_t m = 1;
  unsigned threads = 0;
  std::optional<fs::path> export_dir;  // sample_NNNNN.csv files go here
  std::size_t export_count = 0;
  std::vector<long> probe_indices;
  const Matrix* truth_y = nullptr;         // enables skill metrics
  const Matrix* posterior_mean = nullptr;  // filter or smoother mean
};

struct EnsembleSummary {
  std::vector<fs::path> exported;
  std::vector<ProbeMoments> probes;
  Matrix first_sample;
  /// Per component c (and c == l for all components together).
  std::vector<BiasVariance> bias_variance;
  std::vector<double> eta_mean;
  std::vector<double> corr_dominated_fraction;  // |corr(sample)| <= |corr(mean)|
  std::vector<double> corr_mean_over_samples;
};

EnsembleSummary stream_ensemble(const SamplerPlan& plan, const EnsembleRequest& req);

/// Per-probe comparison of ensemble moments against the posterior series.
nlohmann::json consistency_report(const std::vector<ProbeMoments>& probes,
                                  const PosteriorSeries& posterior, std::size_t m);

struct DiagnoseInputs {
  const CgnsModel* model = nullptr;
  const Trajectory* truth = nullptr;
  const PosteriorSeries* filter = nullptr;
  const PosteriorSeries* smoother = nullptr;
};

/// Runs samplers, metrics, ACF/PSD and uncertainty spectra, writing CSV/JSON
/// under cfg.out. Returns the manifest `files` entries it produced.
nlohmann::json run_diagnostics(const RunConfig& cfg, const DiagnoseInputs& in,
                               std::size_t export_count);

nlohmann::json metric_json(const MetricReport& r);
nlohmann::json spectrum_json(const SpectrumTrack& tr, double burn_in_time);

}  // namespace cgns::app
