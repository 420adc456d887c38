#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cgns/filter.hpp"
#include "cgns/simulate.hpp"

namespace cgns::io {

/// 17 significant digits, general format.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view context);

/// Header `t,x_0..x_{k-1},y_0..y_{l-1}`.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Header `t,mu_0..mu_{l-1},R_00,R_01,..,kind` with the upper triangle of R
/// in row-major order.
void write_posterior_csv(const std::filesystem::path& path, const PosteriorSeries& series);
PosteriorSeries read_posterior_csv(const std::filesystem::path& path);

/// Header `t,yhat_0..yhat_{l-1}`.
void write_sample_csv(const std::filesystem::path& path, const TimeGrid& grid,
                      const Matrix& sample);
Matrix read_sample_csv(const std::filesystem::path& path);

/// Two-column curve, e.g. `lag,value` or `freq,value`.
void write_curve_csv(const std::filesystem::path& path, const std::string& x_name,
                     const std::vector<double>& x, const std::vector<double>& y);

/// Rebuilds a uniform grid from a time column; throws InvalidInput when the
/// spacing is not uniform.
TimeGrid grid_from_times(const std::vector<double>& times);

}  // namespace cgns::io
