#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gsc/g_operator.hpp"

namespace gsc {

enum class ScenarioKind { Constant, Piecewise, Feedback };

/// One explicit volatility scenario: a process gamma_s in variance units
/// identifying a single classical measure under which d<B> = gamma ds.
/// The abstract measure family is never materialized; every computation in
/// this library runs under one of these.
class ScenarioMeasure {
 public:
  static ScenarioMeasure constant(double gamma);
  /// levels.size() == breaks.size() + 1; level j applies on
  /// [break_{j-1}, break_j) (right-continuous), level 0 before the first
  /// break, the last level from the last break on.
  static ScenarioMeasure piecewise(std::vector<double> levels, std::vector<double> breaks);
  static ScenarioMeasure feedback(std::function<double(double, double)> gamma_tx,
                                  std::string label);

  ScenarioKind kind() const { return kind_; }
  bool needs_state() const { return kind_ == ScenarioKind::Feedback; }
  double gamma(double s, double x = 0.0) const;
  const std::string& describe() const { return label_; }

  /// Checks level containment in [lo, hi] and breakpoint ordering within
  /// [t0, T]. Feedback scenarios are checked pointwise at use sites.
  void validate(const VolBounds& bounds, double t0, double T) const;

  const std::vector<double>& levels() const { return levels_; }
  const std::vector<double>& breaks() const { return breaks_; }

 private:
  ScenarioKind kind_ = ScenarioKind::Constant;
  std::vector<double> levels_;
  std::vector<double> breaks_;
  std::function<double(double, double)> fn_;
  std::string label_;
};

/// Cumulative quadratic variation sampled on `times`: QV[0] = 0 and
/// QV[i+1] = QV[i] + gamma(t_i, x_i) * (t_{i+1} - t_i)  (left endpoint,
/// matching the forward Euler scheme). x_path is required for feedback
/// scenarios and must have times.size() entries.
std::vector<double> quadratic_variation(const ScenarioMeasure& scenario,
                                        std::span<const double> times,
                                        std::span<const double> x_path = {});

}  // namespace gsc
