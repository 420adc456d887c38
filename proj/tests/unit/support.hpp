#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <cmath>
#include <string>

#include "cgns/cgns.hpp"
#include "kalman_oracles.hpp"

namespace testing {

namespace fs = std::filesystem;

inline oracle::LtiSystem scalar_system(double lx, double ly, double sx, double sy,
                                       double fx = 0.0, double fy = 0.0) {
  oracle::LtiSystem s;
  s.F = oracle::Mat::Constant(1, 1, ly);
  s.H = oracle::Mat::Constant(1, 1, lx);
  s.Q = oracle::Mat::Constant(1, 1, sy * sy);
  s.N = oracle::Mat::Constant(1, 1, sx * sx);
  s.u = oracle::Vec::Constant(1, fy);
  s.v = oracle::Vec::Constant(1, fx);
  return s;
}

inline double max_abs(const cgns::Matrix& a, const cgns::Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() /
            ("cgns_test_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// (J+1) x 1 matrix holding one column of a matrix series.
inline cgns::Matrix column(const cgns::Matrix& m, int c) { return m.col(c); }

}  // namespace testing

namespace testing {

/// |a - b| <= tol * |b|; unlike doctest::Approx there is no absolute floor.
inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace testing
