#include "cgns/model.hpp"

#include <sstream>

#include "cgns/errors.hpp"

namespace cgns {

namespace {

void check_shape(const char* name, const Matrix& m, int rows, int cols) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "coefficient " << name << " has shape " << m.rows() << "x" << m.cols()
       << ", expected " << rows << "x" << cols;
    throw InvalidInput(os.str());
  }
}

void check_shape(const char* name, const Vector& v, int n) {
  if (v.size() != n) {
    std::ostringstream os;
    os << "coefficient " << name << " has length " << v.size() << ", expected " << n;
    throw InvalidInput(os.str());
  }
}

void check_finite(const char* name, const Matrix& m, double t) {
  if (!m.allFinite()) throw NonFiniteCoefficient(t, name);
}

}  // namespace

CgnsModel::CgnsModel(std::string name, Dimensions dims, CoefficientFn coeffs)
    : name_(std::move(name)), dims_(dims), coeffs_(std::move(coeffs)) {
  if (dims_.k < 1 || dims_.l < 1 || dims_.d < 0 || dims_.r < 0 || dims_.d + dims_.r < 1) {
    std::ostringstream os;
    os << "invalid model dimensions k=" << dims_.k << " l=" << dims_.l << " d=" << dims_.d
       << " r=" << dims_.r;
    throw InvalidInput(os.str());
  }
  if (!coeffs_) throw InvalidInput("model '" + name_ + "' has no coefficient evaluator");
}

CoefficientSnapshot CgnsModel::evaluate(double t, const Vector& x) const {
  if (x.size() != dims_.k) {
    std::ostringstream os;
    os << "state x has length " << x.size() << ", model '" << name_ << "' expects " << dims_.k;
    throw InvalidInput(os.str());
  }
  CoefficientSnapshot s = coeffs_(t, x);
  const auto [k, l, d, r] = dims_;
  check_shape("lambda_x", s.lambda_x, k, l);
  check_shape("lambda_y", s.lambda_y, l, l);
  check_shape("f_x", s.f_x, k);
  check_shape("f_y", s.f_y, l);
  check_shape("sigma1_x", s.sigma1_x, k, d);
  check_shape("sigma2_x", s.sigma2_x, k, r);
  check_shape("sigma1_y", s.sigma1_y, l, d);
  check_shape("sigma2_y", s.sigma2_y, l, r);
  check_finite("lambda_x", s.lambda_x, t);
  check_finite("lambda_y", s.lambda_y, t);
  check_finite("f_x", s.f_x, t);
  check_finite("f_y", s.f_y, t);
  check_finite("sigma1_x", s.sigma1_x, t);
  check_finite("sigma2_x", s.sigma2_x, t);
  check_finite("sigma1_y", s.sigma1_y, t);
  check_finite("sigma2_y", s.sigma2_y, t);
  return s;
}

GramianSet gramians(const CoefficientSnapshot& snap, double t) {
  GramianSet g;
  g.sxx = snap.sigma1_x * snap.sigma1_x.transpose() + snap.sigma2_x * snap.sigma2_x.transpose();
  g.syy = snap.sigma1_y * snap.sigma1_y.transpose() + snap.sigma2_y * snap.sigma2_y.transpose();
  g.sxy = snap.sigma1_x * snap.sigma1_y.transpose() + snap.sigma2_x * snap.sigma2_y.transpose();
  g.sxx = symmetrize(g.sxx);
  g.syy = symmetrize(g.syy);
  g.syx = g.sxy.transpose();
  Eigen::LLT<Matrix> llt(g.sxx);
  if (llt.info() != Eigen::Success) throw SingularObservationGramian(t);
  return g;
}

AuxiliaryMatrices auxiliary(const CoefficientSnapshot& snap, const GramianSet& gr,
                            const std::optional<Matrix>& r_f, double t) {
  Eigen::LLT<Matrix> llt(gr.sxx);
  if (llt.info() != Eigen::Success) throw SingularObservationGramian(t);
  const Matrix g = llt.solve(gr.sxy).transpose();  // syx sxx^-1
  const Matrix inv_lx = llt.solve(snap.lambda_x);
  AuxiliaryMatrices aux;
  aux.a_mat = snap.lambda_y - g * snap.lambda_x;
  aux.b_mat = clamp_psd(gr.syy - g * gr.sxy, kTolPsd, "B", t);
  aux.gamma = clamp_psd(snap.lambda_x.transpose() * inv_lx, kTolPsd, "Gamma", t);
  if (r_f) aux.kalman_gain = g + *r_f * inv_lx.transpose();
  return aux;
}

Matrix LocalCoefficients::kalman_gain(const Matrix& r_f) const {
  return cross_gain + r_f * sxx_inv_lambda.transpose();
}

LocalCoefficients local_coefficients(const CgnsModel& model, double t, const Vector& x) {
  LocalCoefficients c;
  c.snap = model.evaluate(t, x);
  c.gr = gramians(c.snap, t);
  c.sxx_llt.compute(c.gr.sxx);
  c.cross_gain = c.sxx_llt.solve(c.gr.sxy).transpose();
  c.sxx_inv_lambda = c.sxx_llt.solve(c.snap.lambda_x);
  c.a_mat = c.snap.lambda_y - c.cross_gain * c.snap.lambda_x;
  c.b_mat = clamp_psd(c.gr.syy - c.cross_gain * c.gr.sxy, kTolPsd, "B", t);
  c.gamma = clamp_psd(c.snap.lambda_x.transpose() * c.sxx_inv_lambda, kTolPsd, "Gamma", t);
  return c;
}

}  // namespace cgns
