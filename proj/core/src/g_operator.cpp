#include "gsc/g_operator.hpp"

#include <string>

#include "gsc/errors.hpp"

namespace gsc {

void VolBounds::require_valid() const {
  if (!valid())
    throw ConfigError("invalid volatility bounds: need 0 < sigma_lo_sq <= sigma_hi_sq, got [" +
                      std::to_string(sigma_lo_sq) + ", " + std::to_string(sigma_hi_sq) + "]");
}

double g_scalar(double a, const VolBounds& b) {
  const double pos = a > 0.0 ? a : 0.0;
  const double neg = a < 0.0 ? -a : 0.0;
  return 0.5 * (b.sigma_hi_sq * pos - b.sigma_lo_sq * neg);
}

double g_maximizer(double a, const VolBounds& b) {
  return a >= 0.0 ? b.sigma_hi_sq : b.sigma_lo_sq;
}

}  // namespace gsc
