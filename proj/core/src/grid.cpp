#include "gsc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsc/errors.hpp"

namespace gsc {

std::vector<double> Grid::x_nodes() const {
  std::vector<double> xs(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) xs[static_cast<std::size_t>(i)] = x(i);
  return xs;
}

void Grid::require_valid() const {
  if (!(x_lo < x_hi)) throw ConfigError("grid: x_lo must be < x_hi");
  if (nx < 3) throw ConfigError("grid: nx must be >= 3");
  if (nt < 1) throw ConfigError("grid: nt must be >= 1");
  if (!(t0 < T)) throw ConfigError("grid: t0 must be < T");
}

CflReport cfl_bound(const ControlProblem& p, const Grid& grid,
                    std::span<const double> u_candidates) {
  CflReport rep;
  const double dx = grid.dx();
  const int stride = std::max(1, grid.nx / 64);
  for (int i = 0; i < grid.nx; i += stride) {
    const double x = grid.x(i);
    for (double u : u_candidates) {
      for (double t : {grid.t0, 0.5 * (grid.t0 + grid.T), grid.T}) {
        const double sig = p.sigma(t, x, u);
        rep.max_sigma_sq = std::max(rep.max_sigma_sq, sig * sig);
        rep.max_abs_h = std::max(rep.max_abs_h, std::abs(p.h(t, x, u)));
        rep.l_g = std::max(rep.l_g, std::abs(p.dg_dy(t, x, 0.0, 0.0, u)));
      }
    }
  }
  const double hi = p.bounds.sigma_hi_sq;
  const double denom =
      hi * rep.max_sigma_sq + dx * hi * rep.max_abs_h + dx * dx * hi * rep.l_g;
  rep.dt_max = denom > 0.0 ? dx * dx / denom : std::numeric_limits<double>::infinity();
  return rep;
}

Grid make_grid(const ControlProblem& p, double x_lo, double x_hi, int nx, double t0,
               double safety, BoundaryMode boundary, int u_mesh_n) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("make_grid: safety in (0, 1]");
  Grid g;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.nx = nx;
  g.t0 = t0;
  g.T = p.horizon;
  g.nt = 1;
  g.boundary = boundary;
  const auto mesh = p.control_set.mesh(u_mesh_n);
  const auto cfl = cfl_bound(p, g, mesh);
  const double span = g.T - g.t0;
  if (!(span > 0.0)) throw ConfigError("make_grid: t0 must be < horizon");
  g.nt = std::isfinite(cfl.dt_max)
             ? std::max(1, static_cast<int>(std::ceil(span / (safety * cfl.dt_max))))
             : 1;
  g.require_valid();
  return g;
}

}  // namespace gsc
