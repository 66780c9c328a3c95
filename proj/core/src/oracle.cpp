#include "gsc/oracle.hpp"

namespace gsc {

ValueView view_of(const ClosedFormOracle& oracle) {
  ValueView view;
  view.v = oracle.value;
  view.vx = oracle.dx;
  view.vxx = oracle.dxx;
  view.vt = oracle.dt;
  view.vsx = oracle.dsx;
  view.vxxx = oracle.dxxx;
  return view;
}

}  // namespace gsc
