#pragma once

#include <string>

namespace cgns {

std::string version();
std::string eigen_version();
std::string fftw_version();

}  // namespace cgns
