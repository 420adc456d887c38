#include "cgns/triad.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "cgns/errors.hpp"

namespace cgns {

void TriadParams::validate() const {
  std::vector<std::string> bad;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0)) bad.push_back(std::string(name) + " must be > 0");
  };
  positive("gamma2", gamma2);
  positive("gamma3", gamma3);
  positive("sigma1", sigma1);
  positive("sigma2", sigma2);
  positive("sigma3", sigma3);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) bad.push_back("epsilon must be in (0, 1]");
  for (double v : {gamma1, I12, I13, L12, L13, L23, F1, F2, F3})
    if (!std::isfinite(v)) {
      bad.push_back("all triad parameters must be finite");
      break;
    }
  if (bad.empty()) return;
  std::ostringstream os;
  os << "invalid triad parameters:";
  for (const auto& b : bad) os << " triad." << b << ";";
  throw InvalidParams(os.str());
}

TriadParams default_params() { return TriadParams{}; }

TimeGrid triad_default_grid() { return TimeGrid::make(0.0, 60.0, 1e-3); }

CgnsModel triad_model(const TriadParams& p) {
  p.validate();
  const double c = p.c();
  const double se = std::sqrt(p.epsilon);
  return CgnsModel("triad", Dimensions{1, 2, 1, 2}, [p, c, se](double, const Vector& x) {
    const double u = x(0);
    CoefficientSnapshot s;
    s.lambda_x.resize(1, 2);
    s.lambda_x << p.I12 * u + p.L12, p.I13 * u + p.L13;
    s.f_x.resize(1);
    s.f_x << p.gamma1 * u - c * u * u * u + p.F1;
    s.sigma1_x = Matrix::Constant(1, 1, p.sigma1);
    s.sigma2_x.resize(1, 2);
    s.sigma2_x << (p.sigma2 / p.gamma2) * (p.L12 - p.I12 * u),
        (p.sigma3 / p.gamma3) * (p.L13 - p.I13 * u);
    s.lambda_y.resize(2, 2);
    s.lambda_y << -p.gamma2 / p.epsilon, p.L23, -p.L23, -p.gamma3 / p.epsilon;
    s.f_y.resize(2);
    s.f_y << -p.L12 * u - p.I12 * u * u + p.F2, -p.L13 * u - p.I13 * u * u + p.F3;
    s.sigma1_y = Matrix::Zero(2, 1);
    s.sigma2_y = Matrix::Zero(2, 2);
    s.sigma2_y(0, 0) = p.sigma2 / se;
    s.sigma2_y(1, 1) = p.sigma3 / se;
    return s;
  });
}

}  // namespace cgns
