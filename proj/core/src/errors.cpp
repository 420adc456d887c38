#include "cgns/errors.hpp"

#include <sstream>

namespace cgns {

namespace {

std::string at_time(const std::string& what, double t) {
  std::ostringstream os;
  os << what << " at t=" << t;
  return os.str();
}

}  // namespace

NumericError::NumericError(const std::string& what, double t)
    : Error(at_time(what, t)), t_(t) {}

NonFiniteCoefficient::NonFiniteCoefficient(double t, const std::string& detail)
    : NumericError("non-finite coefficient" + (detail.empty() ? "" : " (" + detail + ")"), t) {}

SingularObservationGramian::SingularObservationGramian(double t)
    : NumericError("observation noise Gramian is not positive definite", t) {}

NotPsd::NotPsd(const std::string& matrix_name, double min_eigenvalue, double t)
    : NumericError(matrix_name + " is not positive semidefinite (min eigenvalue " +
                       std::to_string(min_eigenvalue) + ")",
                   t),
      min_eig_(min_eigenvalue) {}

NonFiniteState::NonFiniteState(double t, const std::string& detail)
    : NumericError("state blow-up" + (detail.empty() ? "" : " (" + detail + ")"), t) {}

CovarianceBlowup::CovarianceBlowup(double t, double trace)
    : NumericError("posterior covariance blow-up (trace " + std::to_string(trace) + ")", t) {}

FilterCovSingular::FilterCovSingular(double t, double min_eigenvalue)
    : NumericError("filter covariance is singular (min eigenvalue " +
                       std::to_string(min_eigenvalue) + ")",
                   t) {}

}  // namespace cgns
