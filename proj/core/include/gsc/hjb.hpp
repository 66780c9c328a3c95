#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gsc/value_surface.hpp"

namespace gsc {

struct HjbOptions {
  int u_mesh_n = 65;
  /// Dirichlet data, required with BoundaryMode::OracleDirichlet.
  std::function<double(double t, double x)> boundary;
  int n_threads = 0;  // 0 = auto
};

/// Backward explicit solve of
///   dV/dt + min_u G(F(t, x, V, Vx, Vxx, u)) = 0,  V(T, .) = Phi,
/// one monotone update per (u, gamma) candidate: three-point second
/// difference, first-order term upwinded by the sign of h, then the exact
/// max over the two extreme gamma values (G of the discrete driver) and the
/// min over the control mesh or the problem's argmin oracle.
/// Throws NumericalError on CFL violation or non-finite values.
ValueSurface hjb_solve(const ControlProblem& p, const Grid& grid, const HjbOptions& opt = {});

struct GheatResult {
  Grid grid;               // solver grid on [0, tau]
  std::vector<double> u;   // u(tau, x) per node
  double at(double x) const;  // linear interpolation
};

/// G-heat equation du/dtau = G(u_xx), u(0, .) = phi, solved to time tau;
/// returns the evolved slice (the sublinear expectation of phi(x + B_tau)).
GheatResult gheat_solve(const Fn1& phi, double tau, const VolBounds& bounds, double x_lo,
                        double x_hi, int nx, double cfl_safety = 0.9,
                        int n_threads = 0);

struct ResidualOptions {
  int boundary_margin = 1;  // x-nodes dropped at each side
  /// Extra exclusion, e.g. a kink band: return true to skip (t, x).
  std::function<bool(double t, double x)> exclude;
};

struct ResidualReport {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::size_t nodes = 0;
  double t_at_max = 0.0, x_at_max = 0.0;
  /// max |dV/dt| over the included nodes; max_abs / (1 + scale) is the
  /// scale-free figure used for pass thresholds.
  double scale = 0.0;
  double max_rel() const { return max_abs / (1.0 + scale); }
};

/// R(t, x) = dV/dt + min_u G(F) evaluated with the surface accessors over
/// interior nodes (t rows 0..nt-2).
ResidualReport hjb_residual(const ValueSurface& surface, const ControlProblem& p,
                            const HjbOptions& opt = {}, const ResidualOptions& ropt = {});

/// Per-node table of a feedback quantity with nearest-node lookup.
struct NodeTable {
  Grid grid;
  Matrix value;
  double at(double t, double x) const;
};

/// Argmin over the control candidates of G(F) per node; ties toward the
/// smallest u.
NodeTable optimal_feedback(const ValueSurface& surface, const ControlProblem& p,
                           const HjbOptions& opt = {});

/// gamma*(t, x) = g_maximizer(F(t, x, ., u_feedback(t, x))): the candidate
/// worst-case scenario attached to a solved surface.
NodeTable worst_case_feedback(const ValueSurface& surface, const ControlProblem& p,
                              const NodeTable& u_feedback);

/// Wraps a gamma table as a feedback scenario (table copied in).
ScenarioMeasure scenario_from_table(NodeTable gamma_table, std::string label);

}  // namespace gsc
