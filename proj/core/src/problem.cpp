#include "gsc/problem.hpp"

#include <algorithm>
#include <cmath>

#include "gsc/errors.hpp"

namespace gsc {

ControlSet ControlSet::interval(double lo, double hi) {
  if (!(lo <= hi)) throw ConfigError("control interval: lo must be <= hi");
  ControlSet u;
  u.kind = Kind::Interval;
  u.lo = lo;
  u.hi = hi;
  return u;
}

ControlSet ControlSet::finite(std::vector<double> values) {
  if (values.empty()) throw ConfigError("finite control set: empty");
  std::sort(values.begin(), values.end());
  ControlSet u;
  u.kind = Kind::Finite;
  u.values = std::move(values);
  u.lo = u.values.front();
  u.hi = u.values.back();
  return u;
}

ControlSet ControlSet::real_line(double clamp_radius) {
  if (!(clamp_radius > 0.0)) throw ConfigError("real control set: clamp radius must be > 0");
  ControlSet u;
  u.kind = Kind::Real;
  u.clamp_radius = clamp_radius;
  u.lo = -clamp_radius;
  u.hi = clamp_radius;
  return u;
}

bool ControlSet::contains(double u, double tol) const {
  switch (kind) {
    case Kind::Interval:
      return u >= lo - tol && u <= hi + tol;
    case Kind::Finite:
      for (double v : values)
        if (std::abs(u - v) <= tol) return true;
      return false;
    case Kind::Real:
      return std::isfinite(u);
  }
  return false;
}

double ControlSet::clamp(double u) const {
  switch (kind) {
    case Kind::Interval:
      return std::min(hi, std::max(lo, u));
    case Kind::Finite: {
      double best = values.front();
      for (double v : values)
        if (std::abs(u - v) < std::abs(u - best)) best = v;
      return best;
    }
    case Kind::Real:
      return std::min(clamp_radius, std::max(-clamp_radius, u));
  }
  return u;
}

std::vector<double> ControlSet::mesh(int n) const {
  if (kind == Kind::Finite) return values;
  const double a = (kind == Kind::Real) ? -clamp_radius : lo;
  const double b = (kind == Kind::Real) ? clamp_radius : hi;
  if (a == b) return {a};
  n = std::max(n, 2);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return out;
}

namespace {

inline double fd_step(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

}  // namespace

double ControlProblem::dh_dx(double s, double x, double u) const {
  if (h_x) return h_x(s, x, u);
  const double e = fd_step(x);
  return (h(s, x + e, u) - h(s, x - e, u)) / (2.0 * e);
}

double ControlProblem::dh_du(double s, double x, double u) const {
  if (h_u) return h_u(s, x, u);
  const double e = fd_step(u);
  return (h(s, x, u + e) - h(s, x, u - e)) / (2.0 * e);
}

double ControlProblem::dsigma_dx(double s, double x, double u) const {
  if (sigma_x) return sigma_x(s, x, u);
  const double e = fd_step(x);
  return (sigma(s, x + e, u) - sigma(s, x - e, u)) / (2.0 * e);
}

double ControlProblem::dsigma_du(double s, double x, double u) const {
  if (sigma_u) return sigma_u(s, x, u);
  const double e = fd_step(u);
  return (sigma(s, x, u + e) - sigma(s, x, u - e)) / (2.0 * e);
}

double ControlProblem::dg_dx(double s, double x, double y, double z, double u) const {
  if (g_x) return g_x(s, x, y, z, u);
  const double e = fd_step(x);
  return (g(s, x + e, y, z, u) - g(s, x - e, y, z, u)) / (2.0 * e);
}

double ControlProblem::dg_dy(double s, double x, double y, double z, double u) const {
  if (g_y) return g_y(s, x, y, z, u);
  const double e = fd_step(y);
  return (g(s, x, y + e, z, u) - g(s, x, y - e, z, u)) / (2.0 * e);
}

double ControlProblem::dg_dz(double s, double x, double y, double z, double u) const {
  if (g_z) return g_z(s, x, y, z, u);
  const double e = fd_step(z);
  return (g(s, x, y, z + e, u) - g(s, x, y, z - e, u)) / (2.0 * e);
}

double ControlProblem::dg_du(double s, double x, double y, double z, double u) const {
  if (g_u) return g_u(s, x, y, z, u);
  const double e = fd_step(u);
  return (g(s, x, y, z, u + e) - g(s, x, y, z, u - e)) / (2.0 * e);
}

double ControlProblem::dterminal(double x) const {
  if (terminal_d) return terminal_d(x);
  const double e = fd_step(x);
  return (terminal(x + e) - terminal(x - e)) / (2.0 * e);
}

void ControlProblem::require_valid() const {
  bounds.require_valid();
  if (!(horizon > 0.0)) throw ConfigError(name + ": horizon must be > 0");
  if (!h || !sigma || !g || !terminal) throw ConfigError(name + ": missing coefficient evaluator");
  if (control_set.kind == ControlSet::Kind::Real && !argmin_F)
    throw ConfigError(name + ": unbounded control set requires an argmin oracle");
}

double driver_F(const ControlProblem& p, double t, double x, double a1, double a2, double a3,
                double u) {
  if (!p.control_set.contains(u))
    throw DomainError(p.name + ": control value " + std::to_string(u) + " outside U");
  const double sig = p.sigma(t, x, u);
  return sig * sig * a3 + 2.0 * p.h(t, x, u) * a2 + 2.0 * p.g(t, x, a1, sig * a2, u);
}

double hamiltonian(const ControlProblem& p, double x, double y, double z, double u, double v,
                   double pp, double qq, double s) {
  if (!p.control_set.contains(u) || !p.control_set.contains(v))
    throw DomainError(p.name + ": control value outside U");
  const double sig = p.sigma(s, x, u);
  return p.h(s, x, u) * pp + sig * qq + p.dg_dz(s, x, y, z, v) * sig * pp + p.g(s, x, y, z, u);
}

double hamiltonian_u(const ControlProblem& p, double x, double y, double z, double u, double pp,
                     double qq, double s) {
  if (!p.control_set.contains(u))
    throw DomainError(p.name + ": control value outside U");
  const bool analytic = p.h_u && p.sigma_u && p.g_u;
  if (analytic) {
    const double gz = p.dg_dz(s, x, y, z, u);
    return p.h_u(s, x, u) * pp + p.sigma_u(s, x, u) * qq + gz * p.sigma_u(s, x, u) * pp +
           p.g_u(s, x, y, z, u);
  }
  // finite difference in the u slot with v frozen at u
  const double e = fd_step(u);
  const double gz = p.dg_dz(s, x, y, z, u);
  auto H = [&](double uu) {
    const double sig = p.sigma(s, x, uu);
    return p.h(s, x, uu) * pp + sig * qq + gz * sig * pp + p.g(s, x, y, z, uu);
  };
  return (H(u + e) - H(u - e)) / (2.0 * e);
}

GrowthCheckReport check_growth_bounds(const ControlProblem& p, double L, double x_span,
                                      int points) {
  GrowthCheckReport rep;
  const int n = std::max(2, static_cast<int>(std::cbrt(static_cast<double>(points))));
  const auto u_mesh = p.control_set.mesh(n);
  auto ratio = [&](double value, double allowed) { return std::abs(value) / allowed; };
  for (int is = 0; is < n; ++is) {
    const double s = p.horizon * static_cast<double>(is) / (n - 1);
    for (int ix = 0; ix < n; ++ix) {
      const double x = -x_span + 2.0 * x_span * static_cast<double>(ix) / (n - 1);
      for (double u : u_mesh) {
        ++rep.samples;
        const double grow = L * (1.0 + std::abs(x) + std::abs(u));
        const double bounded[] = {p.dh_dx(s, x, u),      p.dh_du(s, x, u),
                                  p.dsigma_dx(s, x, u),  p.dsigma_du(s, x, u),
                                  p.dg_dy(s, x, 0, 0, u), p.dg_dz(s, x, 0, 0, u)};
        const double growing[] = {p.dg_dx(s, x, 0, 0, u), p.dg_du(s, x, 0, 0, u),
                                  p.dterminal(x)};
        bool bad = false;
        for (double d : bounded) {
          rep.worst_ratio = std::max(rep.worst_ratio, ratio(d, L));
          if (std::abs(d) > L * (1.0 + 1e-9)) bad = true;
        }
        for (double d : growing) {
          rep.worst_ratio = std::max(rep.worst_ratio, ratio(d, grow));
          if (std::abs(d) > grow * (1.0 + 1e-9)) bad = true;
        }
        if (bad) ++rep.violations;
      }
    }
  }
  return rep;
}

}  // namespace gsc
