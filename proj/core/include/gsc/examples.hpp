#pragma once

#include "gsc/oracle.hpp"
#include "gsc/problem.hpp"

namespace gsc {

/// A built-in problem together with its closed-form solution. Factories
/// verify the oracle against the dynamic programming equation at sampled
/// smooth points (residual <= 1e-8) before returning.
struct ExampleProblem {
  ControlProblem problem;
  ClosedFormOracle oracle;
};

/// Singleton control, kinked value function:
/// dX = u d<B>, U = {1}, terminal X_T^2, bounds [0.2, 1].
/// V(t,x) = (x + (T-t))^2 on x >= -0.6 (T-t), else (x + 0.2 (T-t))^2.
ExampleProblem example1(double T);

/// Linear-quadratic problem, U = R, bounds [0.2, 1]:
/// dX = (4X+u) d<B> + (X+u) dB, running cost (x^2+u^2)/2, terminal x^2/2.
/// V(t,x) = P_t x^2 / 2 with P the backward Riccati solution.
ExampleProblem example2(double T);

/// Flat-region problem separating the two reference-measure families:
/// dX = u d<B>, U = [1,2], terminal -(x-1)^2, bounds [0.5, 1]; requires
/// T > 1, v in (1,2). V(t,x) = -(x + T - t - 1)^2; the optimal control is
/// the constant v and the reference scenario is gamma = 1/v.
ExampleProblem example3(double T, double v);

/// Lookup by name ("example1" | "example2" | "example3" or "1" | "2" | "3").
ExampleProblem example_by_name(const std::string& name, double T, double v = 1.25);

}  // namespace gsc
