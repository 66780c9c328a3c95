#include "gsc/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>

#include "gsc/errors.hpp"
#include "gsc/noise.hpp"
#include "gsc/parallel.hpp"

namespace gsc {

PathBundle simulate_forward(const ControlProblem& p, const FeedbackFn& u_feedback,
                            const ScenarioMeasure& scenario, double t0, double x0, int n_steps,
                            int n_paths, std::uint64_t seed, const SimulateOptions& opt) {
  p.require_valid();
  if (!(t0 < p.horizon)) throw ConfigError(p.name + ": t0 must be < horizon");
  if (n_steps < 1 || n_paths < 1) throw ConfigError(p.name + ": need n_steps, n_paths >= 1");
  scenario.validate(p.bounds, t0, p.horizon);

  PathBundle bundle;
  bundle.t0 = t0;
  bundle.x0 = x0;
  bundle.seed = seed;
  bundle.scenario = scenario.describe();
  bundle.n_steps = n_steps;
  bundle.n_paths = (p.sigma_is_zero && opt.dedupe_deterministic) ? 1 : n_paths;

  const double dt = (p.horizon - t0) / n_steps;
  bundle.times.resize(static_cast<std::size_t>(n_steps) + 1);
  for (int i = 0; i <= n_steps; ++i) bundle.times[static_cast<std::size_t>(i)] = t0 + dt * i;

  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(n_steps) + 1;
  bundle.X = Matrix(rows, cols);
  bundle.B = Matrix(rows, cols);
  bundle.QV = Matrix(rows, cols);
  bundle.gamma = Matrix(rows, cols);
  bundle.U = Matrix(rows, cols);

  const double lo = p.bounds.sigma_lo_sq, hi = p.bounds.sigma_hi_sq;
  const double gamma_tol = 1e-12 * std::max(1.0, hi);
  std::atomic<int> error_kind{0};  // 1 = control outside U, 2 = gamma outside, 3 = non-finite

  parallel_for(rows, opt.n_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      NoiseStream noise(seed, opt.path_offset + j);
      double X = x0, B = 0.0, QV = 0.0;
      for (int i = 0; i <= n_steps; ++i) {
        const double s = bundle.times[static_cast<std::size_t>(i)];
        const double g = scenario.gamma(s, X);
        const double u = u_feedback(s, X);
        bundle.X(j, static_cast<std::size_t>(i)) = X;
        bundle.B(j, static_cast<std::size_t>(i)) = B;
        bundle.QV(j, static_cast<std::size_t>(i)) = QV;
        bundle.gamma(j, static_cast<std::size_t>(i)) = g;
        bundle.U(j, static_cast<std::size_t>(i)) = u;
        if (i == n_steps) break;
        if (!p.control_set.contains(u)) {
          error_kind.store(1, std::memory_order_relaxed);
          return;
        }
        if (g < lo - gamma_tol || g > hi + gamma_tol) {
          error_kind.store(2, std::memory_order_relaxed);
          return;
        }
        const double dW = noise.gaussian(static_cast<std::uint64_t>(i), dt);
        const double sg = std::sqrt(g);
        X += p.h(s, X, u) * g * dt + p.sigma(s, X, u) * sg * dW;
        B += sg * dW;
        QV += g * dt;
        if (!std::isfinite(X)) {
          error_kind.store(3, std::memory_order_relaxed);
          return;
        }
      }
    }
  });

  switch (error_kind.load()) {
    case 1:
      throw DomainError(p.name + ": feedback control left U");
    case 2:
      throw DomainError(p.name + ": scenario gamma left the volatility bounds");
    case 3:
      throw NumericalError(p.name + ": state became non-finite during simulation");
    default:
      break;
  }
  return bundle;
}

void bsde_candidates(PathBundle& bundle, const ValueView& view, const ControlProblem& p) {
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;
  bundle.Y = Matrix(rows, cols);
  bundle.Z = Matrix(rows, cols);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      const double s = bundle.times[i];
      const double X = bundle.X(j, i);
      const double u = bundle.U(j, i);
      bundle.Y(j, i) = view.v(s, X);
      bundle.Z(j, i) = p.sigma(s, X, u) * view.vx(s, X);
    }
  }
}

void fill_y_independent(PathBundle& bundle,
                        const std::function<double(double, double, double)>& y_fn) {
  if (!y_fn) throw ConfigError("fill_y_independent: missing evaluator");
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;
  if (bundle.Y.empty()) bundle.Y = Matrix(rows, cols);
  for (std::size_t j = 0; j < rows; ++j)
    for (std::size_t i = 0; i < cols; ++i)
      bundle.Y(j, i) = y_fn(bundle.times[i], bundle.X(j, i), bundle.x0);
}

namespace {

double path_F(const ValueView& view, const ControlProblem& p, const PathBundle& bundle,
              std::size_t j, std::size_t i) {
  const double s = bundle.times[i];
  const double X = bundle.X(j, i);
  return driver_F(p, s, X, view.v(s, X), view.vx(s, X), view.vxx(s, X), bundle.U(j, i));
}

}  // namespace

void ktilde_accumulate(PathBundle& bundle, const ValueView& view, const ControlProblem& p,
                       QuadratureRule rule) {
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;
  bundle.Ktilde = Matrix(rows, cols);
  const double dt = bundle.dt();
  for (std::size_t j = 0; j < rows; ++j) {
    double acc = 0.0;
    bundle.Ktilde(j, 0) = 0.0;
    double f_prev = path_F(view, p, bundle, j, 0);
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      const double integrand_l =
          0.5 * f_prev * bundle.gamma(j, i) - g_scalar(f_prev, p.bounds);
      double incr;
      if (rule == QuadratureRule::LeftEndpoint) {
        incr = integrand_l * dt;
        f_prev = path_F(view, p, bundle, j, i + 1);
      } else {
        const double f_next = path_F(view, p, bundle, j, i + 1);
        const double integrand_r =
            0.5 * f_next * bundle.gamma(j, i + 1) - g_scalar(f_next, p.bounds);
        incr = 0.5 * (integrand_l + integrand_r) * dt;
        f_prev = f_next;
      }
      acc += incr;
      bundle.Ktilde(j, i + 1) = acc;
    }
  }
}

void k_accumulate(PathBundle& bundle, const ControlProblem& p, QuadratureRule rule) {
  if (!p.k_integrand)
    throw ConfigError(p.name + ": no closed-form K integrand available");
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;
  bundle.K = Matrix(rows, cols);
  const double dt = bundle.dt();
  for (std::size_t j = 0; j < rows; ++j) {
    double acc = 0.0;
    bundle.K(j, 0) = 0.0;
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      const double fl =
          p.k_integrand(bundle.times[i], bundle.X(j, i), bundle.x0, bundle.gamma(j, i));
      double incr;
      if (rule == QuadratureRule::LeftEndpoint) {
        incr = fl * dt;
      } else {
        const double fr = p.k_integrand(bundle.times[i + 1], bundle.X(j, i + 1), bundle.x0,
                                        bundle.gamma(j, i + 1));
        incr = 0.5 * (fl + fr) * dt;
      }
      acc += incr;
      bundle.K(j, i + 1) = acc;
    }
  }
}

RelationReport relation_report(const PathBundle& bundle, const ValueView& view,
                               const ControlProblem& p, int u_mesh_n) {
  if (bundle.Y.empty()) throw ConfigError("relation_report: Y not filled");
  if (!view.vt) throw ConfigError("relation_report: view lacks a time derivative");
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;
  const auto mesh = p.argmin_F ? std::vector<double>{} : p.control_set.mesh(u_mesh_n);

  RelationReport rep;
  double sum_y = 0.0, sum_hjb = 0.0, sum_min = 0.0;
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      const double s = bundle.times[i];
      const double X = bundle.X(j, i);
      const double a1 = view.v(s, X), a2 = view.vx(s, X), a3 = view.vxx(s, X);
      const double vt = view.vt(s, X);

      const double ry = std::abs(bundle.Y(j, i) - a1);
      const double F = driver_F(p, s, X, a1, a2, a3, bundle.U(j, i));
      const double rh = std::abs(vt + g_scalar(F, p.bounds));
      double best;
      if (p.argmin_F) {
        best = g_scalar(driver_F(p, s, X, a1, a2, a3, p.argmin_F(s, X, a1, a2, a3)), p.bounds);
      } else {
        best = g_scalar(driver_F(p, s, X, a1, a2, a3, mesh[0]), p.bounds);
        for (std::size_t m = 1; m < mesh.size(); ++m)
          best = std::min(best, g_scalar(driver_F(p, s, X, a1, a2, a3, mesh[m]), p.bounds));
      }
      const double rm = std::abs(vt + best);

      rep.max_y_resid = std::max(rep.max_y_resid, ry);
      rep.max_hjb_resid = std::max(rep.max_hjb_resid, rh);
      rep.max_min_resid = std::max(rep.max_min_resid, rm);
      sum_y += ry;
      sum_hjb += rh;
      sum_min += rm;
    }
  }
  const double n = static_cast<double>(rows * cols);
  rep.mean_y_resid = sum_y / n;
  rep.mean_hjb_resid = sum_hjb / n;
  rep.mean_min_resid = sum_min / n;
  return rep;
}

MixedDerivativeReport mixed_derivative_check(const ValueView& view, const ControlProblem& p,
                                             const PathBundle& bundle) {
  if (!view.vsx || !view.vxxx)
    throw ConfigError("mixed_derivative_check: view lacks vsx or vxxx");
  const auto rows = static_cast<std::size_t>(bundle.n_paths);
  const auto cols = static_cast<std::size_t>(bundle.n_steps) + 1;

  // chain rule through (x, V, Vx, Vxx) with the control frozen
  auto dF_dx = [&](double s, double X, double u) {
    const double a2 = view.vx(s, X), a3 = view.vxx(s, X), a4 = view.vxxx(s, X);
    const double sig = p.sigma(s, X, u);
    const double sig_x = p.dsigma_dx(s, X, u);
    const double y = view.v(s, X), z = sig * a2;
    return 2.0 * sig * sig_x * a3 + sig * sig * a4 + 2.0 * p.dh_dx(s, X, u) * a2 +
           2.0 * p.h(s, X, u) * a3 +
           2.0 * (p.dg_dx(s, X, y, z, u) + p.dg_dy(s, X, y, z, u) * a2 +
                  p.dg_dz(s, X, y, z, u) * (sig_x * a2 + sig * a3));
  };

  // |F| scale over the bundle sets the tie band
  double f_scale = 0.0;
  for (std::size_t j = 0; j < rows; ++j)
    for (std::size_t i = 0; i < cols; ++i)
      f_scale = std::max(f_scale, std::abs(path_F(view, p, bundle, j, i)));

  MixedDerivativeReport rep;
  rep.threshold = 1e-6 * (1.0 + f_scale);
  rep.implied_v_min = std::numeric_limits<double>::infinity();
  rep.implied_v_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      const double s = bundle.times[i];
      const double X = bundle.X(j, i);
      const double u = bundle.U(j, i);
      const double F = path_F(view, p, bundle, j, i);
      const double fx = dF_dx(s, X, u);
      const double vsx = view.vsx(s, X);
      if (std::abs(F) > rep.threshold) {
        rep.max_resid = std::max(rep.max_resid, std::abs(vsx + 0.5 * bundle.gamma(j, i) * fx));
        ++rep.n_checked;
      } else if (std::abs(fx) > rep.threshold) {
        const double v = -2.0 * vsx / fx;
        rep.implied_v_min = std::min(rep.implied_v_min, v);
        rep.implied_v_max = std::max(rep.implied_v_max, v);
        ++rep.n_tie;
      } else {
        ++rep.n_undetermined;
      }
    }
  }
  if (rep.n_tie == 0) {
    rep.implied_v_min = 0.0;
    rep.implied_v_max = 0.0;
  }
  return rep;
}

void write_path_csv(const PathBundle& bundle, int path, std::ostream& out) {
  if (path < 0 || path >= bundle.n_paths) throw ConfigError("write_path_csv: bad path index");
  const auto j = static_cast<std::size_t>(path);
  out << "s,X,B,QV,gamma,Y,Z,K,Ktilde\n";
  for (std::size_t i = 0; i < bundle.times.size(); ++i) {
    out << format_double(bundle.times[i]) << ',' << format_double(bundle.X(j, i)) << ','
        << format_double(bundle.B(j, i)) << ',' << format_double(bundle.QV(j, i)) << ','
        << format_double(bundle.gamma(j, i)) << ',';
    if (!bundle.Y.empty()) out << format_double(bundle.Y(j, i));
    out << ',';
    if (!bundle.Z.empty()) out << format_double(bundle.Z(j, i));
    out << ',';
    if (!bundle.K.empty()) out << format_double(bundle.K(j, i));
    out << ',';
    if (!bundle.Ktilde.empty()) out << format_double(bundle.Ktilde(j, i));
    out << '\n';
  }
}

}  // namespace gsc
