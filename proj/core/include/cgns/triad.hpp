#pragma once

#include "cgns/model.hpp"
#include "cgns/simulate.hpp"

namespace cgns {

/// Physics-constrained triad model: u1 is observed, (u2, u3) are hidden and
/// act on u1 through energy-conserving dyad interactions. Defaults are the
/// published case-study values.
struct TriadParams {
  double gamma1 = 1.0;
  double gamma2 = 1.2;
  double gamma3 = 0.5;
  double I12 = 0.5;
  double I13 = 0.5;
  double L12 = 0.5;
  double L13 = 0.5;
  double L23 = 2.0;
  double F1 = 3.0;
  double F2 = 0.0;
  double F3 = 0.0;
  double sigma1 = 0.5;
  double sigma2 = 1.2;
  double sigma3 = 0.8;
  double epsilon = 1.0;

  /// Cubic damping coefficient I12^2/gamma2 + I13^2/gamma3.
  double c() const noexcept { return I12 * I12 / gamma2 + I13 * I13 / gamma3; }

  /// Throws InvalidParams listing every violated bound.
  void validate() const;
};

TriadParams default_params();

/// T = 60, dt = 1e-3.
TimeGrid triad_default_grid();

/// k = 1, l = 2, d = 1 (noise on u1), r = 2 (noise on u2, u3).
CgnsModel triad_model(const TriadParams& params = default_params());

}  // namespace cgns
