#include "cgns/linear_model.hpp"

#include <sstream>

#include "cgns/errors.hpp"

namespace cgns {

namespace {

Matrix from_flat(const std::vector<double>& v, int rows, int cols, const char* key) {
  Matrix m = Matrix::Zero(rows, cols);
  if (v.empty()) return m;
  if (static_cast<long>(v.size()) != static_cast<long>(rows) * cols) {
    std::ostringstream os;
    os << "linear." << key << " has " << v.size() << " entries, expected " << rows * cols;
    throw InvalidInput(os.str());
  }
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v[static_cast<std::size_t>(i * cols + j)];
  return m;
}

}  // namespace

CgnsModel linear_model(const LinearParams& p) {
  const auto [k, l, d, r] = p.dims;
  if (k < 1 || l < 1 || d < 0 || r < 0 || d + r < 1)
    throw InvalidInput("linear model dimensions must satisfy k>=1, l>=1, d+r>=1");
  CoefficientSnapshot s;
  s.lambda_x = from_flat(p.lambda_x, k, l, "lambda_x");
  s.lambda_y = from_flat(p.lambda_y, l, l, "lambda_y");
  s.f_x = from_flat(p.f_x, k, 1, "f_x");
  s.f_y = from_flat(p.f_y, l, 1, "f_y");
  s.sigma1_x = from_flat(p.sigma1_x, k, d, "sigma1_x");
  s.sigma2_x = from_flat(p.sigma2_x, k, r, "sigma2_x");
  s.sigma1_y = from_flat(p.sigma1_y, l, d, "sigma1_y");
  s.sigma2_y = from_flat(p.sigma2_y, l, r, "sigma2_y");
  return constant_model(s, "linear");
}

CgnsModel constant_model(const CoefficientSnapshot& snap, std::string name) {
  Dimensions dims{static_cast<int>(snap.lambda_x.rows()), static_cast<int>(snap.lambda_y.rows()),
                  static_cast<int>(snap.sigma1_x.cols()), static_cast<int>(snap.sigma2_x.cols())};
  return CgnsModel(std::move(name), dims, [snap](double, const Vector&) { return snap; });
}

CgnsModel scalar_linear_model(double lambda_x, double lambda_y, double sigma_x, double sigma_y,
                              double f_x, double f_y) {
  CoefficientSnapshot s;
  s.lambda_x = Matrix::Constant(1, 1, lambda_x);
  s.lambda_y = Matrix::Constant(1, 1, lambda_y);
  s.f_x = Vector::Constant(1, f_x);
  s.f_y = Vector::Constant(1, f_y);
  s.sigma1_x = Matrix::Constant(1, 1, sigma_x);
  s.sigma2_x = Matrix::Zero(1, 1);
  s.sigma1_y = Matrix::Zero(1, 1);
  s.sigma2_y = Matrix::Constant(1, 1, sigma_y);
  return constant_model(s, "linear");
}

}  // namespace cgns
