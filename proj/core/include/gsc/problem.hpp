#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gsc/g_operator.hpp"

namespace gsc {

using Coef3 = std::function<double(double s, double x, double u)>;
using Coef5 = std::function<double(double s, double x, double y, double z, double u)>;
using Fn1 = std::function<double(double x)>;

/// Admissible control values. Interval and finite sets are meshable; the
/// real line is only usable together with a per-point argmin oracle on the
/// problem, plus a clamp radius so mesh-based code and CFL precomputation
/// have something finite to sample.
struct ControlSet {
  enum class Kind { Interval, Finite, Real };

  Kind kind = Kind::Interval;
  double lo = 0.0, hi = 0.0;
  std::vector<double> values;  // Finite, kept sorted
  double clamp_radius = 6.0;   // Real

  static ControlSet interval(double lo, double hi);
  static ControlSet finite(std::vector<double> values);
  static ControlSet real_line(double clamp_radius);

  bool contains(double u, double tol = 1e-9) const;
  double clamp(double u) const;
  /// Ascending candidate mesh: n points for Interval (n >= 2 unless the
  /// interval is a point), the stored values for Finite, a clamped interval
  /// mesh for Real. Ascending order makes "ties break toward the smallest
  /// u" fall out of a strict-improvement argmin loop.
  std::vector<double> mesh(int n) const;
};

/// Coefficients and terminal data of one control problem, with optional
/// analytic derivatives. Missing derivatives fall back to central finite
/// differences with relative step 1e-6 * max(1, |arg|). Evaluators must be
/// pure; they are called concurrently.
struct ControlProblem {
  std::string name;
  double horizon = 1.0;  // T
  VolBounds bounds;
  ControlSet control_set;

  Coef3 h, sigma;
  Coef5 g;
  Fn1 terminal;  // Phi

  // optional analytic derivatives
  Coef3 h_x, h_u, sigma_x, sigma_u;
  Coef5 g_x, g_y, g_z, g_u;
  Fn1 terminal_d;  // Phi'

  /// Optional per-node argmin of F over u: (t, x, a1, a2, a3) -> u.
  /// Required when control_set.kind == Real.
  std::function<double(double, double, double, double, double)> argmin_F;

  /// Optional closed-form integrand of the non-increasing martingale K per
  /// unit time: (s, X_s, x0, gamma_s) -> dK/ds. Supplied by the built-in
  /// examples; enables the reference-measure membership test.
  std::function<double(double, double, double, double)> k_integrand;

  /// True when sigma vanishes identically; simulation then collapses to a
  /// single deterministic path.
  bool sigma_is_zero = false;

  // derivative access with finite-difference fallback
  double dh_dx(double s, double x, double u) const;
  double dh_du(double s, double x, double u) const;
  double dsigma_dx(double s, double x, double u) const;
  double dsigma_du(double s, double x, double u) const;
  double dg_dx(double s, double x, double y, double z, double u) const;
  double dg_dy(double s, double x, double y, double z, double u) const;
  double dg_dz(double s, double x, double y, double z, double u) const;
  double dg_du(double s, double x, double y, double z, double u) const;
  double dterminal(double x) const;

  void require_valid() const;  // bounds, coefficient presence, Real => argmin_F
};

/// Driver of the fully nonlinear equation:
/// F(t, x, a1, a2, a3, u) = sigma^2 a3 + 2 h a2 + 2 g(t, x, a1, sigma a2, u).
/// Throws DomainError when u is outside the control set.
double driver_F(const ControlProblem& p, double t, double x, double a1, double a2, double a3,
                double u);

/// H(x,y,z,u,v,p,q,s) = h(s,x,u) p + sigma(s,x,u) q
///                      + g_z(s,x,y,z,v) sigma(s,x,u) p + g(s,x,y,z,u).
double hamiltonian(const ControlProblem& p, double x, double y, double z, double u, double v,
                   double pp, double qq, double s);

/// dH/du at v = u held fixed in the g_z slot.
double hamiltonian_u(const ControlProblem& p, double x, double y, double z, double u, double pp,
                     double qq, double s);

/// Sampled check of the Lipschitz/growth bounds: first-order coefficient
/// derivatives bounded by L, data-growth derivatives by L(1+|x|+|u|), on a
/// lattice of roughly `points` samples over [0,T] x [-x_span, x_span] x U.
struct GrowthCheckReport {
  int samples = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max over samples of |derivative| / allowed
  bool pass() const { return violations == 0; }
};
GrowthCheckReport check_growth_bounds(const ControlProblem& p, double L, double x_span,
                                      int points = 1000);

}  // namespace gsc
