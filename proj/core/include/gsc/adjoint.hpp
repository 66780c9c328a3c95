#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "gsc/simulate.hpp"

namespace gsc {

/// Adjoint triple along simulated paths plus the exponential weights.
/// In feedback mode N vanishes identically; the residual of the discrete
/// adjoint identity is reported as a diagnostic instead of being
/// decomposed.
struct AdjointSolution {
  std::vector<double> times;
  Matrix p, q, lambda;
  double p_t = 0.0;       // value at the initial time (path mean)
  double p_t_stderr = 0.0;
  std::string scenario;
  int n_masked = 0;              // steps masked by the kink predicate
  double adjoint_residual_max = 0.0;
};

/// Exponential weights lambda_s = exp(sum beta dB + sum (alpha - beta^2/2)
/// gamma dt) with alpha = h_x + g_y + g_z sigma_x, beta = g_z + sigma_x,
/// all evaluated along the bundle. Accumulated in log space; lambda_t = 1.
Matrix adjoint_weights(const PathBundle& bundle, const ControlProblem& p);

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int n_paths = 0;
};

/// Monte Carlo evaluation of
///   p_t = E[ lambda_T Phi'(X_T) + int lambda_s g_x(s) d<B>_s ]
/// under the scenario measure, with a fixed-order pairwise reduction.
/// `view`, when given, supplies Y and Z for coefficient evaluation.
McEstimate adjoint_p_mc(const ControlProblem& p, const ScenarioMeasure& scenario,
                        const FeedbackFn& u_feedback, double t, double x, int n_paths,
                        int n_steps, std::uint64_t seed, const ValueView* view = nullptr,
                        const SimulateOptions& opt = {});

/// p_s = Vx(s, X_s), q_s = sigma(s, X_s, u_s) Vxx(s, X_s), N = 0, with an
/// optional mask for kink regions (masked samples are set to NaN and
/// excluded from p_t / the residual diagnostic).
AdjointSolution adjoint_feedback(const ValueView& view, const ControlProblem& p,
                                 const PathBundle& bundle,
                                 const std::function<bool(double, double)>& kink_mask = {});

struct ConsistencyReport {
  double p_feedback = 0.0;
  double p_mc = 0.0;
  double stderr_ = 0.0;
  double discrepancy = 0.0;
  double tol = 0.0;  // grid_tol + 3 stderr
  bool pass = false;
};

ConsistencyReport adjoint_consistency(const AdjointSolution& feedback, const McEstimate& mc,
                                      double grid_tol);

struct MpReport {
  double min_inner = 0.0;  // min over steps and mesh of H_u * (u - ubar)
  double tol = 0.0;
  bool pass = false;
  double t_at_min = 0.0;
  double u_at_min = 0.0;
};

/// First-order optimality sweep along the bundle: H_u evaluated with the
/// adjoint samples, inner product against every mesh direction.
MpReport mp_check(const ControlProblem& p, const PathBundle& bundle,
                  const AdjointSolution& adjoint, std::span<const double> u_mesh,
                  double tol = 1e-9);

}  // namespace gsc
