#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "gsc/grid.hpp"
#include "gsc/oracle.hpp"
#include "gsc/util.hpp"

namespace gsc {

/// Grid solution of the backward equation with stencil-based derivative
/// accessors. Nodal stencils: central first difference, three-point second
/// difference, second-order forward difference in t, four-point mixed
/// stencil over (t, t+dt) x (x-dx, x+dx). Boundary nodes use one-sided
/// stencils. Point evaluators interpolate the nodal quantities bilinearly.
class ValueSurface {
 public:
  explicit ValueSurface(Grid grid);

  const Grid& grid() const { return grid_; }
  double& at(int k, int i) { return values_(static_cast<std::size_t>(k), static_cast<std::size_t>(i)); }
  double at(int k, int i) const { return values_(static_cast<std::size_t>(k), static_cast<std::size_t>(i)); }

  // nodal stencils
  double v_node(int k, int i) const { return at(k, i); }
  double vx_node(int k, int i) const;
  double vxx_node(int k, int i) const;
  double vt_node(int k, int i) const;
  double vsx_node(int k, int i) const;
  double vxxx_node(int k, int i) const;

  // interpolating point evaluators; throw DomainError outside the grid
  double value(double t, double x) const;
  double dx_at(double t, double x) const;
  double dxx_at(double t, double x) const;
  double dt_at(double t, double x) const;
  double dsx_at(double t, double x) const;
  double dxxx_at(double t, double x) const;

  bool in_domain(double t, double x, double cell_margin = 0.0) const;
  bool all_finite() const;

  /// Header `t,x,V,Vx,Vxx`, row-major with t outer.
  void write_csv(std::ostream& out) const;

  /// Nodes where |Vxx| jumps by more than jump_factor against both
  /// next-nearest neighbours (default 10x); returns (t, x) pairs.
  std::vector<std::pair<double, double>> detect_kinks(double jump_factor = 10.0) const;

 private:
  double interpolate(double t, double x, double (ValueSurface::*node)(int, int) const) const;

  Grid grid_;
  Matrix values_;
};

/// View over a surface; the surface must outlive the view.
ValueView view_of(const ValueSurface& surface);

}  // namespace gsc
