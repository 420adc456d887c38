#include "cgns/linalg.hpp"

#include "cgns/errors.hpp"

#include <algorithm>
#include <string>

namespace cgns {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Matrix& m) { return symmetric_eigen_range(m).min; }

EigenRange symmetric_eigen_range(const Matrix& m) {
  if (m.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

EigenRange real_part_range(const Matrix& m) {
  if (m.size() == 0) return {};
  Eigen::EigenSolver<Matrix> es(m, false);
  const Eigen::VectorXd re = es.eigenvalues().real();
  return {re.minCoeff(), re.maxCoeff()};
}

Matrix clamp_psd(const Matrix& m, double tol, std::string_view what, double t,
                 bool* clamped) {
  Matrix s = symmetrize(m);
  if (clamped) *clamped = false;
  if (s.size() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  if (lo >= 0.0) return s;
  if (lo < -tol) throw NotPsd(std::string(what), lo, t);
  if (clamped) *clamped = true;
  const Vector pos = ev.cwiseMax(0.0);
  return es.eigenvectors() * pos.asDiagonal() * es.eigenvectors().transpose();
}

Matrix psd_sqrt(const Matrix& m, double tol, double t) {
  Matrix s = symmetrize(m);
  if (s.size() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  if (lo < -tol) throw NotPsd("matrix", lo, t);
  const Vector root = ev.cwiseMax(0.0).cwiseSqrt();
  Matrix out = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return symmetrize(out);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace cgns
