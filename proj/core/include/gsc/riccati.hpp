#pragma once

#include <vector>

namespace gsc {

/// Backward solution table of dP/ds = -(5P^2 + 10P + 1)/(1 + P), P(T) = 1,
/// on the uniform grid s_j = j * dt, j = 0..n.
struct RiccatiTable {
  double T = 0.0;
  double dt = 0.0;
  std::vector<double> p;

  /// Linear interpolation in s; clamps to [0, T].
  double at(double s) const;
};

/// Classical one-step fourth-order integration backward from s = T.
/// Throws NumericalError when the divergence monitor trips (|P| > 1e6).
RiccatiTable riccati_solve(double T, double dt);

/// Closed-form solution used as the independent check:
/// P(s) = sqrt(16/5 * e^{10 (T - s)} + 4/5) - 1.
double riccati_closed_form(double s, double T);

}  // namespace gsc
