#include "gsc/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsc/errors.hpp"

namespace gsc {

Matrix adjoint_weights(const PathBundle& bundle, const ControlProblem& p) {
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;
  Matrix lambda(rows, cols);
  const double dt = bundle.dt();
  const bool have_yz = bundle.has_candidates();
  for (std::size_t j = 0; j < rows; ++j) {
    double loglam = 0.0;
    lambda(j, 0) = 1.0;
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      const double s = bundle.times[i];
      const double X = bundle.X(j, i);
      const double u = bundle.U(j, i);
      const double y = have_yz ? bundle.Y(j, i) : 0.0;
      const double z = have_yz ? bundle.Z(j, i) : 0.0;
      const double gy = p.dg_dy(s, X, y, z, u);
      const double gz = p.dg_dz(s, X, y, z, u);
      const double sx = p.dsigma_dx(s, X, u);
      const double alpha = p.dh_dx(s, X, u) + gy + gz * sx;
      const double beta = gz + sx;
      const double dB = bundle.B(j, i + 1) - bundle.B(j, i);
      const double dqv = bundle.gamma(j, i) * dt;
      loglam += beta * dB + (alpha - 0.5 * beta * beta) * dqv;
      lambda(j, i + 1) = std::exp(loglam);
    }
  }
  return lambda;
}

McEstimate adjoint_p_mc(const ControlProblem& p, const ScenarioMeasure& scenario,
                        const FeedbackFn& u_feedback, double t, double x, int n_paths,
                        int n_steps, std::uint64_t seed, const ValueView* view,
                        const SimulateOptions& opt) {
  if (n_paths < 2) throw ConfigError(p.name + ": adjoint_p_mc needs n_paths >= 2");

  // Batched over paths to keep the bundle footprint bounded; the global
  // path offset makes the batched ensemble identical to a monolithic one.
  constexpr int kBatch = 2048;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(n_paths));
  for (int done = 0; done < n_paths; done += kBatch) {
    const int batch = std::min(kBatch, n_paths - done);
    SimulateOptions batch_opt = opt;
    batch_opt.path_offset = opt.path_offset + static_cast<std::uint64_t>(done);
    PathBundle bundle =
        simulate_forward(p, u_feedback, scenario, t, x, n_steps, batch, seed, batch_opt);
    if (view) bsde_candidates(bundle, *view, p);
    const Matrix lambda = adjoint_weights(bundle, p);

    const auto rows = static_cast<std::size_t>(bundle.n_paths);
    const auto n = static_cast<std::size_t>(bundle.n_steps);
    const double dt = bundle.dt();
    const bool have_yz = bundle.has_candidates();
    for (std::size_t j = 0; j < rows; ++j) {
      double integral = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = bundle.times[i];
        const double X = bundle.X(j, i);
        const double u = bundle.U(j, i);
        const double y = have_yz ? bundle.Y(j, i) : 0.0;
        const double z = have_yz ? bundle.Z(j, i) : 0.0;
        integral += lambda(j, i) * p.dg_dx(s, X, y, z, u) * bundle.gamma(j, i) * dt;
      }
      samples.push_back(lambda(j, n) * p.dterminal(bundle.X(j, n)) + integral);
    }
    if (bundle.n_paths < batch) break;  // deterministic collapse
  }

  McEstimate est;
  est.n_paths = static_cast<int>(samples.size());
  est.value = mean(samples);
  est.stderr_ = samples.size() > 1
                    ? sample_stddev(samples) / std::sqrt(static_cast<double>(samples.size()))
                    : 0.0;
  return est;
}

AdjointSolution adjoint_feedback(const ValueView& view, const ControlProblem& p,
                                 const PathBundle& bundle,
                                 const std::function<bool(double, double)>& kink_mask) {
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;
  AdjointSolution sol;
  sol.times = bundle.times;
  sol.scenario = bundle.scenario;
  sol.p = Matrix(rows, cols);
  sol.q = Matrix(rows, cols);
  sol.lambda = adjoint_weights(bundle, p);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      const double s = bundle.times[i];
      const double X = bundle.X(j, i);
      if (kink_mask && kink_mask(s, X)) {
        sol.p(j, i) = nan;
        sol.q(j, i) = nan;
        ++sol.n_masked;
        continue;
      }
      sol.p(j, i) = view.vx(s, X);
      sol.q(j, i) = p.sigma(s, X, bundle.U(j, i)) * view.vxx(s, X);
    }
  }

  // p_t: mean over paths of the initial sample
  std::vector<double> head;
  head.reserve(rows);
  for (std::size_t j = 0; j < rows; ++j)
    if (std::isfinite(sol.p(j, 0))) head.push_back(sol.p(j, 0));
  sol.p_t = mean(head);
  sol.p_t_stderr =
      head.size() > 1 ? sample_stddev(head) / std::sqrt(static_cast<double>(head.size())) : 0.0;

  // Diagnostic: residual of the discrete adjoint identity
  //   dp + {alpha p + beta q + g_x} d<B> - q dB = dN  (zero in feedback mode).
  const double dt = bundle.dt();
  const bool have_yz = bundle.has_candidates();
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      if (!std::isfinite(sol.p(j, i)) || !std::isfinite(sol.p(j, i + 1))) continue;
      const double s = bundle.times[i];
      const double X = bundle.X(j, i);
      const double u = bundle.U(j, i);
      const double y = have_yz ? bundle.Y(j, i) : 0.0;
      const double z = have_yz ? bundle.Z(j, i) : 0.0;
      const double gy = p.dg_dy(s, X, y, z, u);
      const double gz = p.dg_dz(s, X, y, z, u);
      const double sx = p.dsigma_dx(s, X, u);
      const double alpha = p.dh_dx(s, X, u) + gy + gz * sx;
      const double beta = gz + sx;
      const double dB = bundle.B(j, i + 1) - bundle.B(j, i);
      const double dqv = bundle.gamma(j, i) * dt;
      const double resid = (sol.p(j, i + 1) - sol.p(j, i)) +
                           (alpha * sol.p(j, i) + beta * sol.q(j, i) +
                            p.dg_dx(s, X, y, z, u)) *
                               dqv -
                           sol.q(j, i) * dB;
      sol.adjoint_residual_max = std::max(sol.adjoint_residual_max, std::abs(resid));
    }
  }
  return sol;
}

ConsistencyReport adjoint_consistency(const AdjointSolution& feedback, const McEstimate& mc,
                                      double grid_tol) {
  ConsistencyReport rep;
  rep.p_feedback = feedback.p_t;
  rep.p_mc = mc.value;
  rep.stderr_ = mc.stderr_;
  rep.discrepancy = std::abs(feedback.p_t - mc.value);
  rep.tol = grid_tol + 3.0 * mc.stderr_;
  rep.pass = rep.discrepancy <= rep.tol;
  return rep;
}

MpReport mp_check(const ControlProblem& p, const PathBundle& bundle,
                  const AdjointSolution& adjoint, std::span<const double> u_mesh, double tol) {
  if (u_mesh.empty()) throw ConfigError(p.name + ": mp_check needs a control mesh");
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;
  const bool have_yz = bundle.has_candidates();

  MpReport rep;
  rep.tol = tol;
  rep.min_inner = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      const double ps = adjoint.p(j, i), qs = adjoint.q(j, i);
      if (!std::isfinite(ps) || !std::isfinite(qs)) continue;
      const double s = bundle.times[i];
      const double X = bundle.X(j, i);
      const double ubar = bundle.U(j, i);
      const double y = have_yz ? bundle.Y(j, i) : 0.0;
      const double z = have_yz ? bundle.Z(j, i) : 0.0;
      const double hu = hamiltonian_u(p, X, y, z, ubar, ps, qs, s);
      for (double u : u_mesh) {
        const double inner = hu * (u - ubar);
        if (inner < rep.min_inner) {
          rep.min_inner = inner;
          rep.t_at_min = s;
          rep.u_at_min = u;
        }
      }
    }
  }
  if (!std::isfinite(rep.min_inner)) rep.min_inner = 0.0;
  rep.pass = rep.min_inner >= -tol;
  return rep;
}

}  // namespace gsc
