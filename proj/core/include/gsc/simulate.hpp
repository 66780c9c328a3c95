#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "gsc/oracle.hpp"
#include "gsc/problem.hpp"
#include "gsc/scenario.hpp"
#include "gsc/util.hpp"

namespace gsc {

/// Simulated trajectories under one explicit scenario measure. Matrices are
/// [path][step] with n_steps + 1 columns. Y/Z/K/Ktilde stay empty until the
/// corresponding fill pass runs.
struct PathBundle {
  std::vector<double> times;
  Matrix X, B, QV, gamma, U;
  Matrix Y, Z, K, Ktilde;
  std::uint64_t seed = 0;
  std::string scenario;
  double t0 = 0.0, x0 = 0.0;
  int n_paths = 0, n_steps = 0;

  bool has_candidates() const { return !Y.empty(); }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct SimulateOptions {
  int n_threads = 0;
  /// Collapse to one path when sigma vanishes identically (the paths would
  /// all coincide).
  bool dedupe_deterministic = true;
  /// Global index of the first path; lets callers generate an ensemble in
  /// batches that match a single monolithic run bitwise.
  std::uint64_t path_offset = 0;
};

using FeedbackFn = std::function<double(double s, double x)>;

/// Forward Euler under the scenario's classical measure:
///   dX = h gamma dt + sigma sqrt(gamma) dW,  dB = sqrt(gamma) dW,
///   d<B> = gamma dt,
/// with gamma, the control and the noise all sampled at the left endpoint.
/// Throws DomainError when the feedback leaves U or a scenario level leaves
/// the bounds; NumericalError on non-finite states.
PathBundle simulate_forward(const ControlProblem& p, const FeedbackFn& u_feedback,
                            const ScenarioMeasure& scenario, double t0, double x0, int n_steps,
                            int n_paths, std::uint64_t seed, const SimulateOptions& opt = {});

/// Y_s := V(s, X_s), Z_s := sigma(s, X_s, u_s) * Vx(s, X_s).
void bsde_candidates(PathBundle& bundle, const ValueView& view, const ControlProblem& p);

/// Y from an independent closed form (s, X_s, x0) -> Y_s.
void fill_y_independent(PathBundle& bundle,
                        const std::function<double(double, double, double)>& y_fn);

enum class QuadratureRule { LeftEndpoint, Trapezoid };

/// Ktilde_s = int (F/2) d<B> - int G(F) dr along each path, F evaluated from
/// the view at (s, X_s) with the stored control. Increments are <= 0 by the
/// two-point representation of G.
void ktilde_accumulate(PathBundle& bundle, const ValueView& view, const ControlProblem& p,
                       QuadratureRule rule = QuadratureRule::LeftEndpoint);

/// K from the problem's closed-form integrand; K_t = 0.
void k_accumulate(PathBundle& bundle, const ControlProblem& p,
                  QuadratureRule rule = QuadratureRule::LeftEndpoint);

struct RelationReport {
  // |Y - V(s, X_s)|
  double max_y_resid = 0.0, mean_y_resid = 0.0;
  // |dV/ds + G(F)| along the path
  double max_hjb_resid = 0.0, mean_hjb_resid = 0.0;
  // |dV/ds + min_u G(F(u))|
  double max_min_resid = 0.0, mean_min_resid = 0.0;
};

/// Residuals of the value/driver relations along every path. Requires Y
/// filled (either fill pass). The min over u uses the problem's argmin
/// oracle or a mesh of u_mesh_n candidates.
RelationReport relation_report(const PathBundle& bundle, const ValueView& view,
                               const ControlProblem& p, int u_mesh_n = 65);

struct MixedDerivativeReport {
  /// max |Vsx + gamma/2 * dF/dx| over steps with |F| > threshold
  double max_resid = 0.0;
  int n_checked = 0;
  /// steps with |F| <= threshold and dF/dx != 0: implied v = -2 Vsx / dFdx
  double implied_v_min = 0.0, implied_v_max = 0.0;
  int n_tie = 0;
  int n_undetermined = 0;  // |F| <= threshold and dF/dx ~ 0
  double threshold = 0.0;
};

/// Checks the mixed-derivative relation along the bundle. dF/dx expands the
/// chain rule through (V, Vx, Vxx) and needs the view's third derivative.
MixedDerivativeReport mixed_derivative_check(const ValueView& view, const ControlProblem& p,
                                             const PathBundle& bundle);

/// One path as CSV: `s,X,B,QV,gamma,Y,Z,K,Ktilde` (empty fields when a
/// column was never filled).
void write_path_csv(const PathBundle& bundle, int path, std::ostream& out);

}  // namespace gsc
