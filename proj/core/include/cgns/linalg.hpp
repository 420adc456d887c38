#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace cgns {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute eigenvalue tolerance for positive-semidefinite checks on the
/// l x l noise and covariance matrices.
inline constexpr double kTolPsd = 1e-10;

/// A filter covariance below this minimum eigenvalue is treated as singular.
inline constexpr double kTolPdStrict = 1e-12;

Matrix symmetrize(const Matrix& m);

/// Smallest eigenvalue of the symmetric part of `m`.
double min_eigenvalue(const Matrix& m);

struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme eigenvalues of the symmetric part of `m`.
EigenRange symmetric_eigen_range(const Matrix& m);

/// Extreme real parts of the (possibly complex) spectrum of a general matrix.
EigenRange real_part_range(const Matrix& m);

/// Symmetrizes `m` and clamps eigenvalues in [-tol, 0) to zero. Throws NotPsd
/// naming `what` when an eigenvalue lies below -tol. Returns the input
/// (symmetrized) untouched when it is already PSD, so no rounding is introduced
/// in the common case. `clamped` is set when a reconstruction happened.
Matrix clamp_psd(const Matrix& m, double tol, std::string_view what, double t,
                 bool* clamped = nullptr);

/// Symmetric square root S of a PSD matrix (S*S = m) via the symmetric
/// eigendecomposition. Eigenvalues in [-tol, 0) are clamped to zero.
Matrix psd_sqrt(const Matrix& m, double tol = kTolPsd, double t = 0.0);

bool all_finite(const Matrix& m);

}  // namespace cgns
