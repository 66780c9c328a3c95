#pragma once

#include <optional>
#include <span>

#include "gsc/adjoint.hpp"

namespace gsc {

struct OneSided {
  double d_minus = 0.0;  // limit from the left
  double d_plus = 0.0;   // limit from the right
};

/// One-sided x-derivatives of V(t, .) by Richardson-extrapolated one-sided
/// difference quotients with steps h0, h0/2, h0/4.
OneSided one_sided_dx(const std::function<double(double, double)>& value, double t, double x,
                      double h0 = 1e-2);

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool contains(double a, double tol = 0.0) const { return a >= lo - tol && a <= hi + tol; }
};

/// First-order jet intervals in 1-D: the sub-jet is [d-, d+] when
/// d- <= d+ (else empty), the super-jet is the mirror case. Within tie_tol
/// the point is treated as differentiable and both are the singleton.
struct JetReport {
  double d_minus = 0.0, d_plus = 0.0;
  std::optional<Interval> sub;    // D^{1,-}
  std::optional<Interval> super;  // D^{1,+}
};

JetReport jet_intervals(double d_minus, double d_plus, double tie_tol = 1e-9);

struct CandidateResult {
  std::string scenario;
  double k_T = 0.0;   // path mean of K_T
  bool member = false;
  McEstimate p;
};

struct PBoundsOptions {
  int n_steps = 1000;
  int n_paths = 2;
  std::uint64_t seed = 1;
  double membership_tol = 1e-6;
  /// strict: a failing candidate throws DomainError; otherwise it is
  /// dropped and recorded with member = false.
  bool strict = true;
  int n_threads = 0;
};

struct PBounds {
  double p_tilde = 0.0;
  double p_bar = 0.0;
  std::vector<CandidateResult> candidates;
};

/// Adjoint value extremes over certified reference scenarios: each
/// candidate must pass the K_T = 0 membership test (via the problem's
/// closed-form K integrand) before its Monte Carlo p_t enters the min/max.
PBounds p_bounds(const ControlProblem& p, std::span<const ScenarioMeasure> candidates,
                 const FeedbackFn& u_feedback, double t, double x,
                 const PBoundsOptions& opt = {});

}  // namespace gsc
