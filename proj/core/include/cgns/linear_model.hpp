#pragma once

#include <vector>

#include "cgns/model.hpp"

namespace cgns {

/// Constant-coefficient model given as flat row-major arrays. Empty arrays
/// mean zero of the right shape; sigma arrays default to zero too, so at least
/// one observation noise must be supplied for sxx to be invertible.
struct LinearParams {
  Dimensions dims;
  std::vector<double> lambda_x;
  std::vector<double> lambda_y;
  std::vector<double> f_x;
  std::vector<double> f_y;
  std::vector<double> sigma1_x;
  std::vector<double> sigma2_x;
  std::vector<double> sigma1_y;
  std::vector<double> sigma2_y;
};

CgnsModel linear_model(const LinearParams& params);

CgnsModel constant_model(const CoefficientSnapshot& snap, std::string name = "linear");

/// Scalar k = l = 1 model with independent noises: sigma_x drives x through W1
/// and sigma_y drives y through W2.
CgnsModel scalar_linear_model(double lambda_x, double lambda_y, double sigma_x, double sigma_y,
                              double f_x = 0.0, double f_y = 0.0);

}  // namespace cgns
