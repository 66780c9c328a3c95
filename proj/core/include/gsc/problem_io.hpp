#pragma once

#include <string>

#include "gsc/problem.hpp"
#include "gsc/util.hpp"

namespace gsc {

/// Affine/quadratic coefficient family, the schema of problem config files:
///   h(s,x,u)     = h0 + hx x + hu u
///   sigma(s,x,u) = s0 + sx x + su u
///   g(s,x,y,z,u) = g0 + gx x + gy y + gz z + gu u + gxx x^2 / 2 + guu u^2 / 2
///   Phi(x)       = p0 + px x + pxx x^2 / 2
/// All derivatives are attached analytically; for an unbounded control set
/// the per-point argmin of F over u is solved in closed form (quadratic in
/// u) and clamped to the control set's radius.
struct AffineQuadraticSpec {
  std::string name = "problem";
  double T = 1.0;
  VolBounds bounds;
  ControlSet control;
  double h0 = 0, hx = 0, hu = 0;
  double s0 = 0, sx = 0, su = 0;
  double g0 = 0, gx = 0, gy = 0, gz = 0, gu = 0, gxx = 0, guu = 0;
  double p0 = 0, px = 0, pxx = 0;
};

ControlProblem make_affine_quadratic(const AffineQuadraticSpec& spec);

/// Problem file keys: name, T, sigma_lo_sq, sigma_hi_sq,
/// control = interval <lo> <hi> | finite <v1> <v2> ... | real <radius>,
/// h = <h0> <hx> <hu>, sigma = <s0> <sx> <su>,
/// g = <g0> <gx> <gy> <gz> <gu> <gxx> <guu>, phi = <p0> <px> <pxx>.
/// Missing coefficient lines default to zero.
ControlProblem load_problem(const KeyValues& kv);
ControlProblem load_problem_file(const std::string& path);

}  // namespace gsc
