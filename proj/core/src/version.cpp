#include "cgns/version.hpp"

#include <Eigen/Core>
#include <fftw3.h>

namespace cgns {

std::string version() { return CGNS_VERSION_STRING; }

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

std::string fftw_version() { return ::fftw_version; }

}  // namespace cgns
