#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Cholesky>

#include "cgns/linalg.hpp"

namespace cgns {

/// k observed, l hidden, d and r noise dimensions (W1, W2).
struct Dimensions {
  int k = 1;
  int l = 1;
  int d = 0;
  int r = 1;
};

/// The eight coefficient arrays at one (t, x).
struct CoefficientSnapshot {
  Matrix lambda_x;  // k x l
  Matrix lambda_y;  // l x l
  Vector f_x;       // k
  Vector f_y;       // l
  Matrix sigma1_x;  // k x d
  Matrix sigma2_x;  // k x r
  Matrix sigma1_y;  // l x d
  Matrix sigma2_y;  // l x r
};

/// Row Gramians of the noise feedbacks.
struct GramianSet {
  Matrix sxx;  // k x k
  Matrix syy;  // l x l
  Matrix sxy;  // k x l
  Matrix syx;  // l x k, the transpose of sxy
};

struct AuxiliaryMatrices {
  Matrix a_mat;
  Matrix b_mat;
  Matrix gamma;
  std::optional<Matrix> kalman_gain;
};

/// Must be pure and reentrant.
using CoefficientFn = std::function<CoefficientSnapshot(double t, const Vector& x)>;

class CgnsModel {
 public:
  CgnsModel(std::string name, Dimensions dims, CoefficientFn coeffs);

  const std::string& name() const noexcept { return name_; }
  const Dimensions& dims() const noexcept { return dims_; }
  int k() const noexcept { return dims_.k; }
  int l() const noexcept { return dims_.l; }
  int d() const noexcept { return dims_.d; }
  int r() const noexcept { return dims_.r; }

  /// Evaluates and validates shapes (InvalidInput) and finiteness
  /// (NonFiniteCoefficient).
  CoefficientSnapshot evaluate(double t, const Vector& x) const;

 private:
  std::string name_;
  Dimensions dims_;
  CoefficientFn coeffs_;
};

inline CoefficientSnapshot evaluate(const CgnsModel& model, double t, const Vector& x) {
  return model.evaluate(t, x);
}

/// Throws SingularObservationGramian when sxx is not positive definite.
GramianSet gramians(const CoefficientSnapshot& snap, double t = 0.0);

/// A, B, Gamma and, if r_f is given, the Kalman gain. B and Gamma are
/// symmetrized and clamped at zero within kTolPsd.
AuxiliaryMatrices auxiliary(const CoefficientSnapshot& snap, const GramianSet& gr,
                            const std::optional<Matrix>& r_f = std::nullopt, double t = 0.0);

/// Everything a filter, smoother or sampler step needs at one (t, x).
struct LocalCoefficients {
  CoefficientSnapshot snap;
  GramianSet gr;
  Eigen::LLT<Matrix> sxx_llt;
  Matrix cross_gain;       // syx * sxx^-1, l x k
  Matrix sxx_inv_lambda;   // sxx^-1 * lambda_x, k x l
  Matrix a_mat;
  Matrix b_mat;
  Matrix gamma;

  /// K = (syx + R lambda_x^T) sxx^-1
  Matrix kalman_gain(const Matrix& r_f) const;
};

LocalCoefficients local_coefficients(const CgnsModel& model, double t, const Vector& x);

}  // namespace cgns
