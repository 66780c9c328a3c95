#include "gsc/value_surface.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "gsc/errors.hpp"

namespace gsc {

ValueSurface::ValueSurface(Grid grid) : grid_(grid) {
  grid_.require_valid();
  values_ = Matrix(static_cast<std::size_t>(grid_.nt) + 1, static_cast<std::size_t>(grid_.nx));
}

double ValueSurface::vx_node(int k, int i) const {
  const double dx = grid_.dx();
  if (i == 0) return (at(k, 1) - at(k, 0)) / dx;
  if (i == grid_.nx - 1) return (at(k, i) - at(k, i - 1)) / dx;
  return (at(k, i + 1) - at(k, i - 1)) / (2.0 * dx);
}

double ValueSurface::vxx_node(int k, int i) const {
  const double dx = grid_.dx();
  const int j = std::clamp(i, 1, grid_.nx - 2);  // one-sided: shift stencil inward
  return (at(k, j + 1) - 2.0 * at(k, j) + at(k, j - 1)) / (dx * dx);
}

double ValueSurface::vt_node(int k, int i) const {
  const double dt = grid_.dt();
  if (grid_.nt == 1) return (at(1, i) - at(0, i)) / dt;
  if (k + 2 <= grid_.nt)
    return (-3.0 * at(k, i) + 4.0 * at(k + 1, i) - at(k + 2, i)) / (2.0 * dt);
  return (3.0 * at(k, i) - 4.0 * at(k - 1, i) + at(k - 2, i)) / (2.0 * dt);
}

double ValueSurface::vsx_node(int k, int i) const {
  const double dt = grid_.dt(), dx = grid_.dx();
  const int k0 = std::min(k, grid_.nt - 1);
  const int j = std::clamp(i, 1, grid_.nx - 2);
  return (at(k0 + 1, j + 1) - at(k0 + 1, j - 1) - at(k0, j + 1) + at(k0, j - 1)) /
         (2.0 * dx * dt);
}

double ValueSurface::vxxx_node(int k, int i) const {
  const double dx = grid_.dx();
  const int j = std::clamp(i, 2, grid_.nx - 3);
  return (at(k, j + 2) - 2.0 * at(k, j + 1) + 2.0 * at(k, j - 1) - at(k, j - 2)) /
         (2.0 * dx * dx * dx);
}

bool ValueSurface::in_domain(double t, double x, double cell_margin) const {
  const double mx = cell_margin * grid_.dx();
  const double eps_t = 1e-12 * (std::abs(grid_.T) + 1.0);
  return x >= grid_.x_lo + mx && x <= grid_.x_hi - mx && t >= grid_.t0 - eps_t &&
         t <= grid_.T + eps_t;
}

bool ValueSurface::all_finite() const {
  for (double v : values_.a)
    if (!std::isfinite(v)) return false;
  return true;
}

double ValueSurface::interpolate(double t, double x,
                                 double (ValueSurface::*node)(int, int) const) const {
  if (!in_domain(t, x))
    throw DomainError("surface evaluation outside grid at (t,x)=(" + std::to_string(t) + "," +
                      std::to_string(x) + ")");
  const double dt = grid_.dt(), dx = grid_.dx();
  double ft = (t - grid_.t0) / dt;
  double fx = (x - grid_.x_lo) / dx;
  int k = std::clamp(static_cast<int>(ft), 0, grid_.nt - 1);
  int i = std::clamp(static_cast<int>(fx), 0, grid_.nx - 2);
  const double wt = std::clamp(ft - k, 0.0, 1.0);
  const double wx = std::clamp(fx - i, 0.0, 1.0);
  const double a = (this->*node)(k, i), b = (this->*node)(k, i + 1);
  const double c = (this->*node)(k + 1, i), d = (this->*node)(k + 1, i + 1);
  return (1.0 - wt) * ((1.0 - wx) * a + wx * b) + wt * ((1.0 - wx) * c + wx * d);
}

double ValueSurface::value(double t, double x) const {
  return interpolate(t, x, &ValueSurface::v_node);
}
double ValueSurface::dx_at(double t, double x) const {
  return interpolate(t, x, &ValueSurface::vx_node);
}
double ValueSurface::dxx_at(double t, double x) const {
  return interpolate(t, x, &ValueSurface::vxx_node);
}
double ValueSurface::dt_at(double t, double x) const {
  return interpolate(t, x, &ValueSurface::vt_node);
}
double ValueSurface::dsx_at(double t, double x) const {
  return interpolate(t, x, &ValueSurface::vsx_node);
}
double ValueSurface::dxxx_at(double t, double x) const {
  return interpolate(t, x, &ValueSurface::vxxx_node);
}

void ValueSurface::write_csv(std::ostream& out) const {
  out << "t,x,V,Vx,Vxx\n";
  for (int k = 0; k <= grid_.nt; ++k) {
    for (int i = 0; i < grid_.nx; ++i) {
      out << format_double(grid_.t(k)) << ',' << format_double(grid_.x(i)) << ','
          << format_double(at(k, i)) << ',' << format_double(vx_node(k, i)) << ','
          << format_double(vxx_node(k, i)) << '\n';
    }
  }
}

std::vector<std::pair<double, double>> ValueSurface::detect_kinks(double jump_factor) const {
  // A gradient kink shows up as a curvature spike that may straddle two
  // adjacent cells, so the 10x jump is measured against the next-nearest
  // neighbours and only local maxima are reported.
  std::vector<std::pair<double, double>> out;
  const double floor = 1e-8;
  for (int k = 0; k <= grid_.nt; ++k) {
    for (int i = 2; i < grid_.nx - 2; ++i) {
      const double c = std::abs(vxx_node(k, i));
      const double ll = std::abs(vxx_node(k, i - 2));
      const double rr = std::abs(vxx_node(k, i + 2));
      const double l = std::abs(vxx_node(k, i - 1));
      const double r = std::abs(vxx_node(k, i + 1));
      if (c > jump_factor * std::max(ll, floor) && c > jump_factor * std::max(rr, floor) && c >= l &&
          c >= r)
        out.emplace_back(grid_.t(k), grid_.x(i));
    }
  }
  return out;
}

ValueView view_of(const ValueSurface& s) {
  ValueView view;
  view.v = [&s](double t, double x) { return s.value(t, x); };
  view.vx = [&s](double t, double x) { return s.dx_at(t, x); };
  view.vxx = [&s](double t, double x) { return s.dxx_at(t, x); };
  view.vt = [&s](double t, double x) { return s.dt_at(t, x); };
  view.vsx = [&s](double t, double x) { return s.dsx_at(t, x); };
  view.vxxx = [&s](double t, double x) { return s.dxxx_at(t, x); };
  return view;
}

}  // namespace gsc
