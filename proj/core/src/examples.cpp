#include "gsc/examples.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gsc/errors.hpp"
#include "gsc/problem_io.hpp"
#include "gsc/riccati.hpp"

namespace gsc {

namespace {

// Residual self-check of an oracle against the dynamic programming
// equation at sampled smooth points.
void verify_oracle(const ExampleProblem& ex, double x_lo, double x_hi,
                   const std::function<bool(double, double)>& skip = {}) {
  const auto& p = ex.problem;
  const auto& o = ex.oracle;
  const auto u_mesh = p.control_set.mesh(65);
  const int nt = 11, nx = 41;
  for (int k = 0; k < nt; ++k) {
    const double t = p.horizon * (static_cast<double>(k) / nt);  // strictly below T
    for (int i = 0; i < nx; ++i) {
      const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / (nx - 1);
      if (skip && skip(t, x)) continue;
      const double a1 = o.value(t, x), a2 = o.dx(t, x), a3 = o.dxx(t, x);
      double best;
      if (p.argmin_F) {
        best = g_scalar(driver_F(p, t, x, a1, a2, a3, p.argmin_F(t, x, a1, a2, a3)), p.bounds);
      } else {
        best = g_scalar(driver_F(p, t, x, a1, a2, a3, u_mesh[0]), p.bounds);
        for (std::size_t j = 1; j < u_mesh.size(); ++j)
          best = std::min(best,
                          g_scalar(driver_F(p, t, x, a1, a2, a3, u_mesh[j]), p.bounds));
      }
      const double resid = o.dt(t, x) + best;
      const double scale = 1.0 + std::abs(a1) + std::abs(best);
      if (!(std::abs(resid) <= 1e-8 * scale))
        throw NumericalError(p.name + ": oracle residual " + std::to_string(resid) + " at (t,x)=(" +
                             std::to_string(t) + "," + std::to_string(x) + ")");
    }
  }
}

}  // namespace

ExampleProblem example1(double T) {
  if (!(T > 0.0)) throw ConfigError("example1: T must be > 0");

  AffineQuadraticSpec c;
  c.name = "example1";
  c.T = T;
  c.bounds = {0.2, 1.0};
  c.control = ControlSet::finite({1.0});
  c.hu = 1.0;   // h = u
  c.pxx = 2.0;  // Phi = x^2

  ExampleProblem ex;
  ex.problem = make_affine_quadratic(c);

  // Branch switch along x = -0.6 (T - t); gamma_branch is the maximizing
  // constant volatility on each side.
  auto branch_gamma = [T](double t, double x) {
    return x >= -0.6 * (T - t) ? 1.0 : 0.2;
  };

  auto& o = ex.oracle;
  o.value = [T, branch_gamma](double t, double x) {
    const double tau = T - t, g = branch_gamma(t, x);
    const double w = x + g * tau;
    return w * w;
  };
  o.dx = [T, branch_gamma](double t, double x) {
    const double tau = T - t, g = branch_gamma(t, x);
    return 2.0 * (x + g * tau);
  };
  o.dxx = [](double, double) { return 2.0; };
  o.dt = [T, branch_gamma](double t, double x) {
    const double tau = T - t, g = branch_gamma(t, x);
    return -2.0 * g * (x + g * tau);
  };
  o.dsx = [T, branch_gamma](double t, double x) { return -2.0 * branch_gamma(t, x); };
  o.dxxx = [](double, double) { return 0.0; };
  o.feedback = [](double, double) { return 1.0; };
  o.reference = ScenarioMeasure::constant(1.0);
  o.y_independent = [value = o.value](double s, double X, double) { return value(s, X); };

  // dK/ds = F gamma / 2 - G(F) with F = 2 V_x along the path. Exactly on
  // the branch line V_x is one-sided; take the branch the path is entering
  // (gamma above/below the line's speed 0.6) so the left-endpoint rule sees
  // the value that holds on the following interval.
  const VolBounds bounds = ex.problem.bounds;
  ex.problem.k_integrand = [T, bounds](double s, double X, double, double gamma) {
    const double line = -0.6 * (T - s);
    const double tie = 1e-12 * (1.0 + std::abs(X));
    double g_br;
    if (std::abs(X - line) <= tie)
      g_br = gamma > 0.6 ? 1.0 : 0.2;
    else
      g_br = X > line ? 1.0 : 0.2;
    const double vx = 2.0 * (X + g_br * (T - s));
    const double F = 2.0 * vx;
    return 0.5 * F * gamma - g_scalar(F, bounds);
  };

  verify_oracle(ex, -2.0, 2.0, [T](double t, double x) {
    return std::abs(x + 0.6 * (T - t)) < 0.05;  // kink band
  });
  return ex;
}

ExampleProblem example2(double T) {
  if (!(T > 0.0)) throw ConfigError("example2: T must be > 0");

  AffineQuadraticSpec c;
  c.name = "example2";
  c.T = T;
  c.bounds = {0.2, 1.0};
  c.control = ControlSet::real_line(4.0);
  c.hx = 4.0;
  c.hu = 1.0;  // h = 4x + u
  c.sx = 1.0;
  c.su = 1.0;  // sigma = x + u
  c.gxx = 1.0;
  c.guu = 1.0;  // g = (x^2 + u^2)/2
  c.pxx = 1.0;  // Phi = x^2/2

  ExampleProblem ex;
  ex.problem = make_affine_quadratic(c);

  auto P = [T](double s) { return riccati_closed_form(s, T); };
  auto Pdot = [P](double s) {
    const double p = P(s);
    return -(5.0 * p * p + 10.0 * p + 1.0) / (1.0 + p);
  };

  auto& o = ex.oracle;
  o.value = [P](double t, double x) { return 0.5 * P(t) * x * x; };
  o.dx = [P](double t, double x) { return P(t) * x; };
  o.dxx = [P](double t, double) { return P(t); };
  o.dt = [Pdot](double t, double x) { return 0.5 * Pdot(t) * x * x; };
  o.dsx = [Pdot](double t, double x) { return Pdot(t) * x; };
  o.dxxx = [](double, double) { return 0.0; };
  o.feedback = [P](double s, double x) {
    const double p = P(s);
    return -2.0 * p / (1.0 + p) * x;
  };
  o.reference = ScenarioMeasure::constant(1.0);
  o.riccati = P;
  o.y_independent = [P](double s, double X, double) { return 0.5 * P(s) * X * X; };

  ex.problem.k_integrand = [P](double s, double X, double, double gamma) {
    const double p = P(s);
    return (5.0 * p * p + 10.0 * p + 1.0) / (2.0 * (1.0 + p)) * X * X * (gamma - 1.0);
  };

  verify_oracle(ex, -2.0, 2.0);
  return ex;
}

ExampleProblem example3(double T, double v) {
  if (!(T > 1.0)) throw ConfigError("example3: requires T > 1");
  if (!(v > 1.0 && v < 2.0)) throw ConfigError("example3: requires v in (1, 2)");

  AffineQuadraticSpec c;
  c.name = "example3";
  c.T = T;
  c.bounds = {0.5, 1.0};
  c.control = ControlSet::interval(1.0, 2.0);
  c.hu = 1.0;   // h = u
  c.p0 = -1.0;  // Phi = -(x-1)^2
  c.px = 2.0;
  c.pxx = -2.0;

  ExampleProblem ex;
  ex.problem = make_affine_quadratic(c);

  auto& o = ex.oracle;
  o.value = [T](double t, double x) {
    const double w = x + T - t - 1.0;
    return -w * w;
  };
  o.dx = [T](double t, double x) { return -2.0 * (x + T - t - 1.0); };
  o.dxx = [](double, double) { return -2.0; };
  o.dt = [T](double t, double x) { return 2.0 * (x + T - t - 1.0); };
  o.dsx = [](double, double) { return 2.0; };
  o.dxxx = [](double, double) { return 0.0; };
  o.feedback = [v](double, double) { return v; };
  o.reference = ScenarioMeasure::constant(1.0 / v);

  // phi(s, x'): conditional cost as a function of the centered state
  // x' = v(<B>_s - <B>_t) - 1, flat on [-v(T-s), -v(T-s)/2].
  o.aux_phi = [T, v](double s, double xp) {
    const double a = -v * (T - s), b = -0.5 * v * (T - s);
    if (xp > b) return -(xp - b) * (xp - b);
    if (xp < a) return -(xp - a) * (xp - a);
    return 0.0;
  };
  o.aux_phi_dx = [T, v](double s, double xp) {
    const double a = -v * (T - s), b = -0.5 * v * (T - s);
    if (xp > b) return -2.0 * (xp - b);
    if (xp < a) return -2.0 * (xp - a);
    return 0.0;
  };
  // d phi/ds = 2 (xp - edge) * edge'(s); the edges move at v/2 and v.
  o.aux_phi_ds = [T, v](double s, double xp) {
    const double a = -v * (T - s), b = -0.5 * v * (T - s);
    if (xp > b) return v * (xp - b);
    if (xp < a) return 2.0 * v * (xp - a);
    return 0.0;
  };
  o.y_independent = [phi = o.aux_phi](double s, double X, double x0) {
    return phi(s, X - x0 - 1.0);
  };

  ex.problem.k_integrand = [phi_dx = o.aux_phi_dx, phi_ds = o.aux_phi_ds, v](
                               double s, double X, double x0, double gamma) {
    const double xp = X - x0 - 1.0;
    return phi_dx(s, xp) * v * gamma + phi_ds(s, xp);
  };

  // C^1 matching of phi at the branch joins
  for (double s : {0.0, 0.5 * T, T - 0.25}) {
    const double eps = 1e-7;
    for (double join : {-v * (T - s), -0.5 * v * (T - s)}) {
      const double jump_v = std::abs(o.aux_phi(s, join + eps) - o.aux_phi(s, join - eps));
      const double jump_d = std::abs(o.aux_phi_dx(s, join + eps) - o.aux_phi_dx(s, join - eps));
      if (jump_v > 1e-12 || jump_d > 1e-5)
        throw NumericalError("example3: phi branches fail to match at join");
    }
  }

  verify_oracle(ex, -3.0, 3.0);
  return ex;
}

ExampleProblem example_by_name(const std::string& name, double T, double v) {
  if (name == "example1" || name == "1") return example1(T);
  if (name == "example2" || name == "2") return example2(T);
  if (name == "example3" || name == "3") return example3(T, v);
  throw ConfigError("unknown example: " + name);
}

}  // namespace gsc
