#include "gsc/hjb.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <string>

#include "gsc/errors.hpp"
#include "gsc/parallel.hpp"

namespace gsc {

namespace {

// One discrete Hamiltonian evaluation at a node: min over candidates of
// G(F_disc(u)). F_disc uses the three-point second difference and the
// h-sign upwinded first difference; the g term sees z = sigma * a2 with the
// same upwinded a2.
struct NodeEval {
  double best = 0.0;
  double u_best = 0.0;
};

class RowStepper {
 public:
  RowStepper(const ControlProblem& p, const Grid& grid, const HjbOptions& opt)
      : p_(p), grid_(grid), dx_(grid.dx()) {
    if (!p.argmin_F || p.control_set.kind != ControlSet::Kind::Real)
      mesh_ = p.control_set.mesh(opt.u_mesh_n);
    if (mesh_.empty() && !p.argmin_F)
      throw ConfigError(p.name + ": empty control mesh");
  }

  // row = values at time t_data (the known, later row)
  NodeEval eval(std::span<const double> row, int i, double t_data, bool boundary_node) const {
    const double x = grid_.x(i);
    const double vi = row[static_cast<std::size_t>(i)];
    const int n = grid_.nx;
    double d2, dp, dm, dc;
    if (!boundary_node) {
      d2 = (row[i + 1] - 2.0 * vi + row[i - 1]) / (dx_ * dx_);
      dp = (row[i + 1] - vi) / dx_;
      dm = (vi - row[i - 1]) / dx_;
      dc = (row[i + 1] - row[i - 1]) / (2.0 * dx_);
    } else {
      // linear extrapolation: vanishing curvature, one-sided slope
      d2 = 0.0;
      if (i == 0) {
        dp = dm = dc = (row[1] - row[0]) / dx_;
      } else {
        dp = dm = dc = (row[n - 1] - row[n - 2]) / dx_;
      }
    }

    NodeEval out;
    bool first = true;
    auto consider = [&](double u) {
      const double h = p_.h(t_data, x, u);
      const double a2 = h >= 0.0 ? dp : dm;
      const double sig = p_.sigma(t_data, x, u);
      const double F = sig * sig * d2 + 2.0 * h * a2 + 2.0 * p_.g(t_data, x, vi, sig * a2, u);
      const double val = g_scalar(F, p_.bounds);
      if (first || val < out.best) {
        first = false;
        out.best = val;
        out.u_best = u;
      }
    };
    if (p_.argmin_F) {
      // mesh-based solver context: truncate the oracle's minimizer
      consider(p_.control_set.clamp(p_.argmin_F(t_data, x, vi, dc, d2)));
    } else {
      for (double u : mesh_) consider(u);
    }
    return out;
  }

  const std::vector<double>& mesh() const { return mesh_; }

 private:
  const ControlProblem& p_;
  const Grid& grid_;
  double dx_;
  std::vector<double> mesh_;
};

}  // namespace

ValueSurface hjb_solve(const ControlProblem& p, const Grid& grid, const HjbOptions& opt) {
  p.require_valid();
  grid.require_valid();
  if (grid.boundary == BoundaryMode::OracleDirichlet && !opt.boundary)
    throw ConfigError(p.name + ": oracle-Dirichlet boundary needs a boundary function");

  RowStepper stepper(p, grid, opt);
  const auto u_candidates =
      p.argmin_F ? p.control_set.mesh(opt.u_mesh_n) : stepper.mesh();
  const auto cfl = cfl_bound(p, grid, u_candidates);
  if (!cfl.satisfied(grid.dt()))
    throw NumericalError(p.name + ": CFL violated, dt = " + std::to_string(grid.dt()) +
                         " > " + std::to_string(cfl.dt_max));

  ValueSurface surface(grid);
  for (int i = 0; i < grid.nx; ++i) surface.at(grid.nt, i) = p.terminal(grid.x(i));

  const double dt = grid.dt();
  const int nx = grid.nx;
  std::atomic<bool> bad{false};
  std::vector<double> cur(static_cast<std::size_t>(nx));
  for (int k = grid.nt; k > 0; --k) {
    const double t_data = grid.t(k);
    const double t_new = grid.t(k - 1);
    for (int i = 0; i < nx; ++i) cur[static_cast<std::size_t>(i)] = surface.at(k, i);
    parallel_for(static_cast<std::size_t>(nx), opt.n_threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const bool edge = (i == 0 || i == static_cast<std::size_t>(nx - 1));
        double v;
        if (edge && grid.boundary == BoundaryMode::OracleDirichlet) {
          v = opt.boundary(t_new, grid.x(static_cast<int>(i)));
        } else {
          const auto ev = stepper.eval(cur, static_cast<int>(i), t_data, edge);
          v = cur[i] + dt * ev.best;
        }
        if (!std::isfinite(v)) bad.store(true, std::memory_order_relaxed);
        surface.at(k - 1, static_cast<int>(i)) = v;
      }
    });
    if (bad.load())
      throw NumericalError(p.name + ": non-finite value at t = " + std::to_string(t_new));
  }
  return surface;
}

double GheatResult::at(double x) const {
  const double dx = grid.dx();
  const double f = (x - grid.x_lo) / dx;
  const int i = std::clamp(static_cast<int>(f), 0, grid.nx - 2);
  const double w = std::clamp(f - i, 0.0, 1.0);
  return (1.0 - w) * u[static_cast<std::size_t>(i)] + w * u[static_cast<std::size_t>(i) + 1];
}

GheatResult gheat_solve(const Fn1& phi, double tau, const VolBounds& bounds, double x_lo,
                        double x_hi, int nx, double cfl_safety, int n_threads) {
  if (!(tau > 0.0)) throw ConfigError("gheat_solve: tau must be > 0");
  bounds.require_valid();
  // Backward dynamic-programming problem with h = 0, g = 0, sigma = 1 and
  // terminal data phi on [0, tau]; the evolved slice is the t = 0 row.
  ControlProblem p;
  p.name = "gheat";
  p.horizon = tau;
  p.bounds = bounds;
  p.control_set = ControlSet::finite({0.0});
  p.h = [](double, double, double) { return 0.0; };
  p.sigma = [](double, double, double) { return 1.0; };
  p.g = [](double, double, double, double, double) { return 0.0; };
  p.terminal = phi;
  p.h_x = p.h_u = p.sigma_x = p.sigma_u = [](double, double, double) { return 0.0; };
  p.g_x = p.g_y = p.g_z = p.g_u = [](double, double, double, double, double) { return 0.0; };
  p.terminal_d = {};

  Grid grid = make_grid(p, x_lo, x_hi, nx, 0.0, cfl_safety, BoundaryMode::LinearExtrapolation, 1);
  HjbOptions opt;
  opt.u_mesh_n = 1;
  opt.n_threads = n_threads;
  const ValueSurface surface = hjb_solve(p, grid, opt);

  GheatResult out;
  out.grid = grid;
  out.u.resize(static_cast<std::size_t>(grid.nx));
  for (int i = 0; i < grid.nx; ++i) out.u[static_cast<std::size_t>(i)] = surface.at(0, i);
  return out;
}

ResidualReport hjb_residual(const ValueSurface& surface, const ControlProblem& p,
                            const HjbOptions& opt, const ResidualOptions& ropt) {
  const Grid& grid = surface.grid();
  const auto mesh = p.argmin_F ? std::vector<double>{} : p.control_set.mesh(opt.u_mesh_n);
  ResidualReport rep;
  double sum = 0.0;
  const int margin = std::max(1, ropt.boundary_margin);
  const int k_hi = std::max(0, grid.nt - 2);
  for (int k = 0; k <= k_hi; ++k) {
    const double t = grid.t(k);
    for (int i = margin; i < grid.nx - margin; ++i) {
      const double x = grid.x(i);
      if (ropt.exclude && ropt.exclude(t, x)) continue;
      const double a1 = surface.v_node(k, i);
      const double a2 = surface.vx_node(k, i);
      const double a3 = surface.vxx_node(k, i);
      double best;
      if (p.argmin_F) {
        best = g_scalar(driver_F(p, t, x, a1, a2, a3, p.argmin_F(t, x, a1, a2, a3)), p.bounds);
      } else {
        best = g_scalar(driver_F(p, t, x, a1, a2, a3, mesh[0]), p.bounds);
        for (std::size_t j = 1; j < mesh.size(); ++j)
          best = std::min(best, g_scalar(driver_F(p, t, x, a1, a2, a3, mesh[j]), p.bounds));
      }
      const double vt = surface.vt_node(k, i);
      const double r = std::abs(vt + best);
      rep.scale = std::max(rep.scale, std::abs(vt));
      sum += r;
      ++rep.nodes;
      if (r > rep.max_abs) {
        rep.max_abs = r;
        rep.t_at_max = t;
        rep.x_at_max = x;
      }
    }
  }
  rep.mean_abs = rep.nodes ? sum / static_cast<double>(rep.nodes) : 0.0;
  return rep;
}

double NodeTable::at(double t, double x) const {
  const int k = std::clamp(static_cast<int>(std::lround((t - grid.t0) / grid.dt())), 0, grid.nt);
  const int i = std::clamp(static_cast<int>(std::lround((x - grid.x_lo) / grid.dx())), 0,
                           grid.nx - 1);
  return value(static_cast<std::size_t>(k), static_cast<std::size_t>(i));
}

NodeTable optimal_feedback(const ValueSurface& surface, const ControlProblem& p,
                           const HjbOptions& opt) {
  const Grid& grid = surface.grid();
  RowStepper stepper(p, grid, opt);
  NodeTable table{grid, Matrix(static_cast<std::size_t>(grid.nt) + 1,
                               static_cast<std::size_t>(grid.nx))};
  std::vector<double> row(static_cast<std::size_t>(grid.nx));
  for (int k = 0; k <= grid.nt; ++k) {
    for (int i = 0; i < grid.nx; ++i) row[static_cast<std::size_t>(i)] = surface.at(k, i);
    for (int i = 0; i < grid.nx; ++i) {
      const bool edge = (i == 0 || i == grid.nx - 1);
      table.value(static_cast<std::size_t>(k), static_cast<std::size_t>(i)) =
          stepper.eval(row, i, grid.t(k), edge).u_best;
    }
  }
  return table;
}

NodeTable worst_case_feedback(const ValueSurface& surface, const ControlProblem& p,
                              const NodeTable& u_feedback) {
  const Grid& grid = surface.grid();
  NodeTable table{grid, Matrix(static_cast<std::size_t>(grid.nt) + 1,
                               static_cast<std::size_t>(grid.nx))};
  for (int k = 0; k <= grid.nt; ++k) {
    const double t = grid.t(k);
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      const double u = u_feedback.value(static_cast<std::size_t>(k), static_cast<std::size_t>(i));
      const double F = driver_F(p, t, x, surface.v_node(k, i), surface.vx_node(k, i),
                                surface.vxx_node(k, i), u);
      table.value(static_cast<std::size_t>(k), static_cast<std::size_t>(i)) =
          g_maximizer(F, p.bounds);
    }
  }
  return table;
}

ScenarioMeasure scenario_from_table(NodeTable gamma_table, std::string label) {
  auto shared = std::make_shared<NodeTable>(std::move(gamma_table));
  return ScenarioMeasure::feedback(
      [shared](double t, double x) { return shared->at(t, x); }, std::move(label));
}

}  // namespace gsc
