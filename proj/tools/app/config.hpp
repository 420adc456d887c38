#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cgns/linear_model.hpp"
#include "cgns/sampler.hpp"
#include "cgns/triad.hpp"

namespace cgns::app {

struct GridConfig {
  double t0 = 0.0;
  double t_end = 60.0;
  double dt = 1e-3;
};

struct InitialConfig {
  std::optional<std::vector<double>> x0;           // default zeros
  std::optional<std::vector<double>> y0;           // default zeros
  std::optional<std::vector<double>> filter_mean;  // default zeros
  std::optional<std::vector<double>> filter_cov;   // row-major, default 0.01 I
  std::string sampler = "gaussian";                // or "point"
};

struct DiagnosticsConfig {
  double max_lag = 5.0;         // time units
  long segment_len = 8192;      // PSD segment length in steps
  double extreme_theta = 1.0;
  double burn_in = 10.0;        // time units
  long spectrum_stride = 10;    // steps between exported spectrum points
  std::vector<double> probe_times{10.0, 30.0, 50.0};
};

struct RunConfig {
  std::string model = "triad";
  TriadParams triad;
  /// Scalar observed/hidden pair with unit couplings; overridden by `linear`.
  LinearParams linear{Dimensions{1, 1, 1, 1}, {1.0}, {-1.0}, {0.0}, {0.0},
                      {1.0}, {0.0}, {0.0}, {1.0}};
  GridConfig grid;
  std::uint64_t seed = 0;
  std::size_t ensemble = 100;
  std::vector<SampleDirection> directions{SampleDirection::Forward, SampleDirection::Backward};
  InitialConfig initial;
  DiagnosticsConfig diagnostics;
  std::filesystem::path out = "out";
  unsigned threads = 0;
  std::optional<std::size_t> export_samples;
};

/// Applies a JSON document on top of `base`; every error names the offending
/// key, e.g. "grid.dt must be positive".
RunConfig apply_config_json(RunConfig base, const nlohmann::json& doc);

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Checks cross-field invariants (dt > 0, t_end > t0, m >= 1, shapes).
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

/// 64-bit FNV-1a of the canonical JSON dump, hex encoded.
std::string config_hash(const nlohmann::json& config);

CgnsModel build_model(const RunConfig& cfg);
TimeGrid build_grid(const RunConfig& cfg);
Vector initial_x(const RunConfig& cfg, int k);
Vector initial_y(const RunConfig& cfg, int l);
GaussianState filter_init(const RunConfig& cfg, int l);

std::vector<SampleDirection> parse_directions(const std::string& text);

}  // namespace cgns::app
