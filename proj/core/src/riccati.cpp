#include "gsc/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsc/errors.hpp"

namespace gsc {

double RiccatiTable::at(double s) const {
  if (p.empty()) throw NumericalError("riccati table: empty");
  const double clamped = std::min(T, std::max(0.0, s));
  const double pos = clamped / dt;
  const auto j = static_cast<std::size_t>(pos);
  if (j + 1 >= p.size()) return p.back();
  const double w = pos - static_cast<double>(j);
  return (1.0 - w) * p[j] + w * p[j + 1];
}

RiccatiTable riccati_solve(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw ConfigError("riccati_solve: need T > 0 and dt > 0");
  if (dt > T) throw ConfigError("riccati_solve: dt larger than T");
  const auto n = static_cast<std::size_t>(std::llround(T / dt));

  RiccatiTable table;
  table.T = T;
  table.dt = T / static_cast<double>(n);
  table.p.assign(n + 1, 0.0);
  table.p[n] = 1.0;

  const auto f = [](double p) { return -(5.0 * p * p + 10.0 * p + 1.0) / (1.0 + p); };
  const double h = -table.dt;  // backward step
  for (std::size_t j = n; j > 0; --j) {
    const double p = table.p[j];
    const double k1 = f(p);
    const double k2 = f(p + 0.5 * h * k1);
    const double k3 = f(p + 0.5 * h * k2);
    const double k4 = f(p + h * k3);
    const double next = p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(next) || std::abs(next) > 1e6)
      throw NumericalError("riccati_solve: divergence at s = " +
                           std::to_string(static_cast<double>(j - 1) * table.dt) +
                           " (step too large?)");
    table.p[j - 1] = next;
  }
  return table;
}

double riccati_closed_form(double s, double T) {
  return std::sqrt(16.0 / 5.0 * std::exp(10.0 * (T - s)) + 4.0 / 5.0) - 1.0;
}

}  // namespace gsc
