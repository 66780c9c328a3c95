#pragma once

namespace gsc {

/// Volatility-uncertainty interval in variance units: the quadratic
/// variation density of the driving noise lives in
/// [sigma_lo_sq, sigma_hi_sq] with 0 < sigma_lo_sq <= sigma_hi_sq.
struct VolBounds {
  double sigma_lo_sq = 0.0;
  double sigma_hi_sq = 0.0;

  bool valid() const { return sigma_lo_sq > 0.0 && sigma_lo_sq <= sigma_hi_sq; }
  void require_valid() const;  // throws ConfigError when invalid
};

/// Scalar sublinear generator G(a) = (sigma_hi_sq*a+ - sigma_lo_sq*a-)/2.
/// Equals sup over gamma in [lo, hi] of gamma*a/2.
double g_scalar(double a, const VolBounds& b);

/// Argmax of gamma*a/2 over [lo, hi]: hi for a > 0, lo for a < 0.
/// The a = 0 tie goes to hi, so downstream worst-case feedback stays on the
/// branch that keeps the mixed-derivative condition testable.
double g_maximizer(double a, const VolBounds& b);

}  // namespace gsc
