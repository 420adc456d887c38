#pragma once

#include <vector>

namespace cgns::detail {

/// s -> sum_j x[j] * x[j + s] for s = 0..max_lag, via a zero-padded FFT.
std::vector<double> lagged_products(const std::vector<double>& x, long max_lag);

/// |X_k|^2 for k = 0..n/2 of the real FFT of x.
std::vector<double> periodogram_raw(const std::vector<double>& x);

}  // namespace cgns::detail
