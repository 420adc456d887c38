#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace cgns::app {

namespace fs = std::filesystem;

/// Each command writes into cfg.out and returns the paths it wrote.
std::vector<fs::path> cmd_simulate(const RunConfig& cfg);

std::vector<fs::path> cmd_assimilate(const RunConfig& cfg, const fs::path& truth_csv);

struct SampleOptions {
  fs::path truth_csv;
  fs::path filter_csv;
  std::vector<double> probe_times;  // empty: no consistency report
};

std::vector<fs::path> cmd_sample(const RunConfig& cfg, const SampleOptions& opt);

struct DiagnoseOptions {
  fs::path truth_csv;
  fs::path filter_csv;
  std::optional<fs::path> smoother_csv;  // recomputed when absent
};

std::vector<fs::path> cmd_diagnose(const RunConfig& cfg, const DiagnoseOptions& opt);

std::vector<fs::path> cmd_case_study(const RunConfig& cfg);

/// Parses arguments, runs one command and maps errors to exit codes:
/// 0 success, 2 configuration or input errors, 3 numerical failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cgns::app
