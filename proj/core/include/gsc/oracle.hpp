#pragma once

#include <functional>

#include "gsc/scenario.hpp"

namespace gsc {

using TxFn = std::function<double(double t, double x)>;

/// Uniform evaluator bundle over a value function: shared by closed-form
/// oracles and solved surfaces so path diagnostics run against either.
/// vt / vsx / vxxx may be absent for sources that cannot supply them.
struct ValueView {
  TxFn v, vx, vxx;
  TxFn vt, vsx, vxxx;
};

/// Closed-form solution data attached to a built-in example: the value
/// surface, its derivatives, the optimal feedback, the reference scenario,
/// and example-specific auxiliaries.
struct ClosedFormOracle {
  TxFn value, dx, dxx;
  TxFn dt, dsx, dxxx;
  TxFn feedback;  // ubar(s, x)

  ScenarioMeasure reference = ScenarioMeasure::constant(1.0);

  // auxiliaries
  std::function<double(double s)> riccati;                    // P(s)
  std::function<double(double s, double xp)> aux_phi;         // phi(s, x')
  std::function<double(double s, double xp)> aux_phi_dx;
  std::function<double(double s, double xp)> aux_phi_ds;
  /// Independent cost candidate along a path: (s, X_s, x0) -> Y_s.
  std::function<double(double s, double X, double x0)> y_independent;
};

ValueView view_of(const ClosedFormOracle& oracle);

}  // namespace gsc
