#include "gsc/scenario.hpp"

#include <algorithm>
#include <sstream>

#include "gsc/errors.hpp"

namespace gsc {

ScenarioMeasure ScenarioMeasure::constant(double gamma) {
  ScenarioMeasure m;
  m.kind_ = ScenarioKind::Constant;
  m.levels_ = {gamma};
  std::ostringstream os;
  os << "constant:" << gamma;
  m.label_ = os.str();
  return m;
}

ScenarioMeasure ScenarioMeasure::piecewise(std::vector<double> levels,
                                           std::vector<double> breaks) {
  if (levels.empty() || levels.size() != breaks.size() + 1)
    throw ConfigError("piecewise scenario: need k+1 levels for k breakpoints");
  ScenarioMeasure m;
  m.kind_ = ScenarioKind::Piecewise;
  m.levels_ = std::move(levels);
  m.breaks_ = std::move(breaks);
  std::ostringstream os;
  os << "piecewise:";
  for (std::size_t i = 0; i < m.levels_.size(); ++i) {
    if (i) os << ",";
    os << m.levels_[i];
    if (i < m.breaks_.size()) os << "@" << m.breaks_[i];
  }
  m.label_ = os.str();
  return m;
}

ScenarioMeasure ScenarioMeasure::feedback(std::function<double(double, double)> gamma_tx,
                                          std::string label) {
  ScenarioMeasure m;
  m.kind_ = ScenarioKind::Feedback;
  m.fn_ = std::move(gamma_tx);
  m.label_ = "feedback:" + label;
  return m;
}

double ScenarioMeasure::gamma(double s, double x) const {
  switch (kind_) {
    case ScenarioKind::Constant:
      return levels_[0];
    case ScenarioKind::Piecewise: {
      // right-continuous: level j on [break_{j-1}, break_j)
      const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
      return levels_[static_cast<std::size_t>(it - breaks_.begin())];
    }
    case ScenarioKind::Feedback:
      return fn_(s, x);
  }
  return levels_[0];
}

void ScenarioMeasure::validate(const VolBounds& bounds, double t0, double T) const {
  bounds.require_valid();
  const double tol = 1e-12 * std::max(1.0, bounds.sigma_hi_sq);
  for (double g : levels_) {
    if (g < bounds.sigma_lo_sq - tol || g > bounds.sigma_hi_sq + tol)
      throw ConfigError("scenario level " + std::to_string(g) +
                        " outside volatility bounds");
  }
  if (kind_ == ScenarioKind::Piecewise) {
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      if (i > 0 && !(breaks_[i] > breaks_[i - 1]))
        throw ConfigError("piecewise scenario: breakpoints must be strictly increasing");
      if (breaks_[i] <= t0 || breaks_[i] >= T)
        throw ConfigError("piecewise scenario: breakpoints must lie strictly inside [t0, T]");
    }
  }
}

std::vector<double> quadratic_variation(const ScenarioMeasure& scenario,
                                        std::span<const double> times,
                                        std::span<const double> x_path) {
  if (times.size() < 2) throw ConfigError("quadratic_variation: need at least two times");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ConfigError("quadratic_variation: times must be strictly increasing");
  if (scenario.needs_state() && x_path.size() != times.size())
    throw DomainError("quadratic_variation: feedback scenario needs an x sample per time");

  std::vector<double> qv(times.size());
  qv[0] = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double x = scenario.needs_state() ? x_path[i] : 0.0;
    qv[i + 1] = qv[i] + scenario.gamma(times[i], x) * (times[i + 1] - times[i]);
  }
  return qv;
}

}  // namespace gsc
