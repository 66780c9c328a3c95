#pragma once

#include <span>
#include <vector>

#include "gsc/problem.hpp"

namespace gsc {

enum class BoundaryMode { OracleDirichlet, LinearExtrapolation };

/// Uniform space-time grid for the backward solver. Rows are time levels
/// t_k = t0 + k dt, k = 0..nt (row nt carries the terminal data).
struct Grid {
  double x_lo = -1.0, x_hi = 1.0;
  int nx = 3;
  double t0 = 0.0, T = 1.0;
  int nt = 1;
  BoundaryMode boundary = BoundaryMode::LinearExtrapolation;

  double dx() const { return (x_hi - x_lo) / (nx - 1); }
  double dt() const { return (T - t0) / nt; }
  double x(int i) const { return x_lo + dx() * i; }
  double t(int k) const { return t0 + dt() * k; }
  std::vector<double> x_nodes() const;

  void require_valid() const;  // x_lo < x_hi, nx >= 3, nt >= 1, t0 < T
};

/// Explicit-scheme stability bound
///   dt_max = dx^2 / (hi * max sigma^2 + dx * hi * max|h| + dx^2 * hi * L_g),
/// with the maxima sampled over grid nodes and control candidates and
/// L_g the sampled bound on |g_y|.
struct CflReport {
  double dt_max = 0.0;
  double max_sigma_sq = 0.0;
  double max_abs_h = 0.0;
  double l_g = 0.0;
  bool satisfied(double dt) const { return dt <= dt_max * (1.0 + 1e-12); }
};

CflReport cfl_bound(const ControlProblem& p, const Grid& grid,
                    std::span<const double> u_candidates);

/// Grid with nt chosen from the CFL bound scaled by `safety` in (0, 1].
Grid make_grid(const ControlProblem& p, double x_lo, double x_hi, int nx, double t0,
               double safety = 0.9, BoundaryMode boundary = BoundaryMode::LinearExtrapolation,
               int u_mesh_n = 65);

}  // namespace gsc
