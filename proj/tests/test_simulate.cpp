#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gsc/errors.hpp"
#include "gsc/examples.hpp"
#include "gsc/hjb.hpp"
#include "gsc/noise.hpp"
#include "gsc/problem_io.hpp"
#include "gsc/simulate.hpp"

using namespace gsc;

namespace {

FeedbackFn oracle_feedback(const ExampleProblem& ex) {
  return [fb = ex.oracle.feedback](double s, double x) { return fb(s, x); };
}

}  // namespace

TEST_CASE("deterministic forward paths") {
  // example 1 from the branch point: X_T = x0 + <B>_T
  {
    const auto ex = example1(1.0);
    const auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                         ScenarioMeasure::constant(1.0), 0.0, -0.6, 1000, 8, 11);
    CHECK(bundle.n_paths == 1);  // sigma = 0 collapses the ensemble
    CHECK(bundle.X(0, 1000) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(bundle.X(0, 0) == -0.6);
  }
  // example 3 under the balanced scenario: X_s - x0 = s - t
  {
    const auto ex = example3(2.0, 1.25);
    const auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                         ScenarioMeasure::constant(0.8), 1.0, 0.0, 1000, 1, 11);
    CHECK(bundle.X(0, 500) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bundle.X(0, 1000) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // h = 0 and sigma = 0 freeze the state
  {
    AffineQuadraticSpec frozen;
    frozen.bounds = {0.2, 1.0};
    frozen.control = ControlSet::finite({0.0});
    frozen.px = 1.0;
    const auto p = make_affine_quadratic(frozen);
    const auto bundle = simulate_forward(
        p, [](double, double) { return 0.0; }, ScenarioMeasure::constant(0.5), 0.0, 1.25, 64, 1,
        99);
    for (int i = 0; i <= 64; ++i) CHECK(bundle.X(0, static_cast<std::size_t>(i)) == 1.25);
  }
}

TEST_CASE("simulate input contracts") {
  const auto ex = example3(2.0, 1.25);
  CHECK_THROWS_AS(simulate_forward(ex.problem, [](double, double) { return 5.0; },
                                   ScenarioMeasure::constant(0.8), 1.0, 0.0, 10, 1, 1),
                  DomainError);
  CHECK_THROWS_AS(simulate_forward(ex.problem, oracle_feedback(ex),
                                   ScenarioMeasure::constant(0.2), 1.0, 0.0, 10, 1, 1),
                  ConfigError);  // level outside bounds fails validation
  CHECK_THROWS_AS(simulate_forward(ex.problem, oracle_feedback(ex),
                                   ScenarioMeasure::constant(0.8), 2.5, 0.0, 10, 1, 1),
                  ConfigError);  // t0 past the horizon

  // overflow guard
  AffineQuadraticSpec blow;
  blow.bounds = {0.2, 1.0};
  blow.control = ControlSet::interval(0.0, 1.0);
  blow.name = "blow";
  auto p = make_affine_quadratic(blow);
  p.h = [](double, double x, double) { return 10.0 * x * x; };
  p.sigma_is_zero = false;
  CHECK_THROWS_AS(simulate_forward(
                      p, [](double, double) { return 0.5; }, ScenarioMeasure::constant(1.0), 0.0,
                      5.0, 2000, 1, 1),
                  NumericalError);
}

TEST_CASE("bitwise determinism across runs and thread counts") {
  const auto ex = example2(0.5);
  SimulateOptions one;
  one.n_threads = 1;
  SimulateOptions many;
  many.n_threads = 4;
  const auto a = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                  0.0, 1.0, 256, 128, 77, one);
  const auto b = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                  0.0, 1.0, 256, 128, 77, many);
  REQUIRE(a.X.a.size() == b.X.a.size());
  for (std::size_t i = 0; i < a.X.a.size(); ++i) CHECK(a.X.a[i] == b.X.a[i]);
  for (std::size_t i = 0; i < a.B.a.size(); ++i) CHECK(a.B.a[i] == b.B.a[i]);

  // CSV export is byte-stable
  std::ostringstream csv_a, csv_b;
  write_path_csv(a, 3, csv_a);
  write_path_csv(b, 3, csv_b);
  CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("euler strong-error decay under increment aggregation") {
  // test-local stepper against a 20x finer reference sharing the same
  // underlying Gaussian increments
  const auto ex = example2(1.0);
  const auto& p = ex.problem;
  const auto ub = ex.oracle.feedback;
  const int n0 = 64, refine = 20;
  const int n_ref = n0 * refine;
  const double T = 1.0, x0 = 1.0;

  auto run_level = [&](int n, const std::vector<double>& dw_fine) {
    const double dt = T / n;
    const int agg = n_ref / n;
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    double x = x0;
    xs[0] = x;
    for (int i = 0; i < n; ++i) {
      double dw = 0.0;
      for (int j = 0; j < agg; ++j) dw += dw_fine[static_cast<std::size_t>(i * agg + j)];
      const double s = dt * i;
      const double u = ub(s, x);
      x += p.h(s, x, u) * dt + p.sigma(s, x, u) * dw;
      xs[static_cast<std::size_t>(i) + 1] = x;
    }
    return xs;
  };

  double worst1 = 0.0, worst2 = 0.0;
  for (int path = 0; path < 16; ++path) {
    const NoiseStream noise(321, static_cast<std::uint64_t>(path));
    std::vector<double> dw(static_cast<std::size_t>(n_ref));
    for (int i = 0; i < n_ref; ++i)
      dw[static_cast<std::size_t>(i)] = noise.gaussian(static_cast<std::uint64_t>(i), T / n_ref);
    const auto ref = run_level(n_ref, dw);
    const auto c = run_level(n0, dw);
    const auto f = run_level(2 * n0, dw);
    for (int i = 0; i <= n0; ++i)
      worst1 = std::max(worst1, std::abs(c[static_cast<std::size_t>(i)] -
                                         ref[static_cast<std::size_t>(i * refine)]));
    for (int i = 0; i <= 2 * n0; ++i)
      worst2 = std::max(worst2, std::abs(f[static_cast<std::size_t>(i)] -
                                         ref[static_cast<std::size_t>(i * refine / 2)]));
  }
  CHECK(worst1 / worst2 >= 1.3);
}

TEST_CASE("candidate fill and relation residuals, example 3") {
  const auto ex = example3(2.0, 1.25);
  const auto view = view_of(ex.oracle);
  const double t0 = 1.0;

  // (a) balanced scenario: everything vanishes
  {
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                   ScenarioMeasure::constant(0.8), t0, 0.0, 1000, 1, 5);
    fill_y_independent(bundle, ex.oracle.y_independent);
    ktilde_accumulate(bundle, view, ex.problem);
    k_accumulate(bundle, ex.problem);
    CHECK(std::abs(bundle.Ktilde(0, 1000)) <= 1e-6);
    CHECK(std::abs(bundle.K(0, 1000)) <= 1e-6);
    const auto rep = relation_report(bundle, view, ex.problem);
    CHECK(rep.max_y_resid <= 1e-6);
    CHECK(rep.max_hjb_resid <= 1e-6);
    CHECK(rep.max_min_resid <= 1e-6);
  }
  // (b) same integral, different path: K stays 0 but Ktilde strictly drops
  // and the value identity visibly fails
  {
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                   ScenarioMeasure::piecewise({0.6, 1.0}, {1.5}), t0, 0.0, 1000,
                                   1, 5);
    fill_y_independent(bundle, ex.oracle.y_independent);
    ktilde_accumulate(bundle, view, ex.problem);
    k_accumulate(bundle, ex.problem);
    CHECK(std::abs(bundle.K(0, 1000)) <= 1e-4);
    CHECK(bundle.Ktilde(0, 1000) <= -1e-3);
    CHECK(bundle.Ktilde(0, 1000) == doctest::Approx(-0.03125).epsilon(5e-3));
    const auto rep = relation_report(bundle, view, ex.problem);
    CHECK(rep.max_y_resid >= 1e-2);
    CHECK(rep.max_y_resid == doctest::Approx(0.015625).epsilon(1e-6));
  }
  // (c) wrong integral: K_T strictly negative
  {
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                   ScenarioMeasure::constant(0.9), t0, 0.0, 1000, 1, 5);
    k_accumulate(bundle, ex.problem);
    CHECK(bundle.K(0, 1000) <= -1e-3);
    CHECK(bundle.K(0, 1000) == doctest::Approx(-0.015625).epsilon(2e-2));
  }
}

TEST_CASE("bsde identity along example 2 reference paths") {
  const auto ex = example2(1.0);
  const auto view = view_of(ex.oracle);
  const int n_steps = 4096;
  auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                 0.0, 1.0, n_steps, 8, 2718);
  bsde_candidates(bundle, view, ex.problem);

  // Y against the closed form (identical evaluators, so exact)
  for (int i = 0; i <= n_steps; i += 512) {
    const double s = bundle.times[static_cast<std::size_t>(i)];
    const double X = bundle.X(0, static_cast<std::size_t>(i));
    CHECK(bundle.Y(0, static_cast<std::size_t>(i)) ==
          doctest::Approx(0.5 * ex.oracle.riccati(s) * X * X).epsilon(1e-12));
  }

  // integrated backward identity: Y_T - Y_t = -int g d<B> + int Z dB (K = 0
  // under the reference scenario); the residual is the Euler remainder.
  const double dt = bundle.dt();
  for (int j = 0; j < bundle.n_paths; ++j) {
    double rhs = 0.0;
    for (int i = 0; i < n_steps; ++i) {
      const auto jj = static_cast<std::size_t>(j);
      const auto ii = static_cast<std::size_t>(i);
      const double s = bundle.times[ii];
      const double X = bundle.X(jj, ii);
      const double u = bundle.U(jj, ii);
      const double dB = bundle.B(jj, ii + 1) - bundle.B(jj, ii);
      rhs += -ex.problem.g(s, X, bundle.Y(jj, ii), bundle.Z(jj, ii), u) *
                 bundle.gamma(jj, ii) * dt +
             bundle.Z(jj, ii) * dB;
    }
    const auto jj = static_cast<std::size_t>(j);
    const double lhs = bundle.Y(jj, static_cast<std::size_t>(n_steps)) - bundle.Y(jj, 0);
    // O(sqrt(dt)) martingale remainder; generous constant
    CHECK(std::abs(lhs - rhs) <= 2000.0 * std::sqrt(dt) * dt * n_steps);
  }
}

TEST_CASE("ktilde under the worst-case feedback scenario") {
  const auto ex = example1(1.0);
  const auto view = view_of(ex.oracle);
  // from (0, 0) the driver is positive along the path, so the worst case is
  // the upper bound and the increments cancel exactly
  Grid grid = make_grid(ex.problem, -2.0, 2.0, 201, 0.0, 0.9, BoundaryMode::OracleDirichlet, 1);
  HjbOptions opt;
  opt.boundary = ex.oracle.value;
  const auto surface = hjb_solve(ex.problem, grid, opt);
  const auto fb = optimal_feedback(surface, ex.problem, opt);
  const auto wc = worst_case_feedback(surface, ex.problem, fb);
  const auto scenario = scenario_from_table(wc, "worst-case");
  auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), scenario, 0.0, 0.0, 500, 1, 3);
  ktilde_accumulate(bundle, view, ex.problem);
  CHECK(std::abs(bundle.Ktilde(0, 500)) <= 1e-10);
}

TEST_CASE("ktilde vanishes exactly when the scenario maximizes the driver") {
  // from a point strictly inside the lower branch of example 1: the driver
  // is negative along the path, so the lower bound is the maximizer
  const auto ex = example1(1.0);
  const auto view = view_of(ex.oracle);
  auto run = [&](double gamma) {
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                   ScenarioMeasure::constant(gamma), 0.0, -1.0, 500, 1, 2);
    ktilde_accumulate(bundle, view, ex.problem);
    return bundle.Ktilde(0, 500);
  };
  CHECK(std::abs(run(0.2)) <= 1e-12);  // maximizer along this path
  CHECK(run(1.0) < -1e-2);             // any other level loses mass
}

TEST_CASE("trapezoid rule agrees with the left-endpoint rule to first order") {
  const auto ex = example3(2.0, 1.25);
  const auto view = view_of(ex.oracle);
  auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                 ScenarioMeasure::piecewise({0.6, 1.0}, {1.5}), 1.0, 0.0, 1000,
                                 1, 5);
  auto trap = bundle;
  ktilde_accumulate(bundle, view, ex.problem, QuadratureRule::LeftEndpoint);
  ktilde_accumulate(trap, view, ex.problem, QuadratureRule::Trapezoid);
  CHECK(std::abs(bundle.Ktilde(0, 1000) - trap.Ktilde(0, 1000)) <= 1e-3);
  CHECK(trap.Ktilde(0, 1000) == doctest::Approx(-0.03125).epsilon(1e-3));
  // sign preserved per increment under either rule
  for (int i = 0; i < 1000; ++i)
    CHECK(trap.Ktilde(0, static_cast<std::size_t>(i) + 1) -
              trap.Ktilde(0, static_cast<std::size_t>(i)) <=
          1e-12);

  k_accumulate(trap, ex.problem, QuadratureRule::Trapezoid);
  CHECK(std::abs(trap.K(0, 1000)) <= 1e-4);
}

TEST_CASE("ktilde increments are never positive (random problems)") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> lo_d(0.1, 0.8);
  std::uniform_real_distribution<double> wid(0.05, 1.0);
  for (int draw = 0; draw < 100; ++draw) {
    AffineQuadraticSpec spec;
    spec.name = "random";
    spec.T = 1.0;
    spec.bounds.sigma_lo_sq = lo_d(rng);
    spec.bounds.sigma_hi_sq = spec.bounds.sigma_lo_sq + wid(rng);
    spec.control = ControlSet::interval(-1.0, 1.0);
    spec.h0 = coef(rng);
    spec.hx = coef(rng);
    spec.hu = coef(rng);
    spec.s0 = coef(rng);
    spec.sx = 0.2 * coef(rng);
    spec.su = 0.2 * coef(rng);
    spec.g0 = coef(rng);
    spec.gx = coef(rng);
    spec.gy = 0.3 * coef(rng);
    spec.gz = 0.3 * coef(rng);
    spec.gu = coef(rng);
    spec.px = coef(rng);
    spec.pxx = coef(rng);
    const auto p = make_affine_quadratic(spec);

    // synthetic smooth stand-in for the value function; the per-step sign
    // property is pointwise algebra, independent of the PDE
    const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), c3 = coef(rng), c4 = coef(rng);
    ValueView view;
    view.v = [=](double t, double x) {
      return c0 + c1 * x + 0.5 * c2 * x * x + c3 * t + c4 * t * x;
    };
    view.vx = [=](double t, double x) { return c1 + c2 * x + c4 * t; };
    view.vxx = [=](double, double) { return c2; };

    ScenarioMeasure scenario = ScenarioMeasure::constant(
        spec.bounds.sigma_lo_sq + wid(rng) / 2.0 * (spec.bounds.sigma_hi_sq -
                                                    spec.bounds.sigma_lo_sq));
    if (draw % 3 == 1)
      scenario = ScenarioMeasure::piecewise({spec.bounds.sigma_lo_sq, spec.bounds.sigma_hi_sq},
                                            {0.5});
    if (draw % 3 == 2)
      scenario = ScenarioMeasure::feedback(
          [b = spec.bounds](double s, double x) {
            const double w = 0.5 + 0.5 * std::sin(2.0 * s + x);
            return b.sigma_lo_sq + (b.sigma_hi_sq - b.sigma_lo_sq) * w;
          },
          "osc");

    const double u_const = 0.5 * coef(rng);
    auto bundle = simulate_forward(
        p, [u_const](double, double) { return u_const; }, scenario, 0.0, 0.3 * coef(rng), 50, 2,
        static_cast<std::uint64_t>(draw + 1));
    ktilde_accumulate(bundle, view, p);
    for (int j = 0; j < bundle.n_paths; ++j)
      for (int i = 0; i < 50; ++i) {
        const auto jj = static_cast<std::size_t>(j);
        const auto ii = static_cast<std::size_t>(i);
        CHECK(bundle.Ktilde(jj, ii + 1) - bundle.Ktilde(jj, ii) <= 1e-12);
      }
  }
}

TEST_CASE("k_accumulate on examples 1 and 2") {
  // example 1 at the branch point: both extreme scenarios are reference
  // measures and the closed-form integrand vanishes along their paths
  {
    const auto ex = example1(1.0);
    for (double gamma : {1.0, 0.2}) {
      auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                     ScenarioMeasure::constant(gamma), 0.0, -0.6, 1000, 1, 1);
      k_accumulate(bundle, ex.problem);
      CHECK(std::abs(bundle.K(0, 1000)) <= 1e-9);
    }
  }
  // example 2: exact zero under the reference, strictly negative otherwise
  {
    const auto ex = example2(1.0);
    auto ref = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                0.0, 1.0, 500, 16, 2);
    k_accumulate(ref, ex.problem);
    for (int j = 0; j < ref.n_paths; ++j)
      CHECK(ref.K(static_cast<std::size_t>(j), 500) == 0.0);

    auto low = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(0.2),
                                0.0, 1.0, 2000, 64, 2);
    k_accumulate(low, ex.problem);
    for (int j = 0; j < low.n_paths; ++j)
      CHECK(low.K(static_cast<std::size_t>(j), 2000) < -1e-4);
  }
  // no integrand
  {
    AffineQuadraticSpec plain;
    plain.bounds = {0.2, 1.0};
    plain.control = ControlSet::finite({0.0});
    const auto p = make_affine_quadratic(plain);
    auto bundle = simulate_forward(
        p, [](double, double) { return 0.0; }, ScenarioMeasure::constant(1.0), 0.0, 0.0, 10, 1,
        1);
    CHECK_THROWS_AS(k_accumulate(bundle, p), ConfigError);
  }
}

TEST_CASE("relation residuals for example 2 under the reference scenario") {
  const auto ex = example2(1.0);
  const auto view = view_of(ex.oracle);
  auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                 0.0, 1.0, 512, 4, 9);
  bsde_candidates(bundle, view, ex.problem);
  const auto rep = relation_report(bundle, view, ex.problem);
  CHECK(rep.max_y_resid == 0.0);  // from the view by construction
  CHECK(rep.max_hjb_resid <= 1e-4);
  CHECK(rep.max_min_resid <= 1e-4);
}

TEST_CASE("mixed-derivative relation") {
  // example 2, closed forms: residual at machine scale
  {
    const auto ex = example2(1.0);
    const auto view = view_of(ex.oracle);
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                   0.0, 1.0, 256, 4, 31);
    const auto rep = mixed_derivative_check(view, ex.problem, bundle);
    CHECK(rep.n_checked > 0);
    CHECK(rep.max_resid <= 1e-6);
  }
  // example 3 on the balanced path: the driver sits in the tie band and the
  // implied volatility equals the reference level 1/v
  {
    const auto ex = example3(2.0, 1.25);
    const auto view = view_of(ex.oracle);
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(0.8),
                                   1.0, 0.0, 200, 1, 31);
    const auto rep = mixed_derivative_check(view, ex.problem, bundle);
    CHECK(rep.n_checked == 0);
    CHECK(rep.n_tie > 0);
    CHECK(rep.implied_v_min == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(rep.implied_v_max == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(rep.implied_v_min >= ex.problem.bounds.sigma_lo_sq - 1e-9);
    CHECK(rep.implied_v_max <= ex.problem.bounds.sigma_hi_sq + 1e-9);
  }
  // time-independent quadratic view: V_sx = 0 and dF/dx = 0
  {
    AffineQuadraticSpec spec;
    spec.bounds = {0.2, 1.0};
    spec.control = ControlSet::finite({0.0});
    spec.s0 = 1.0;
    spec.pxx = 2.0;
    const auto p = make_affine_quadratic(spec);
    ValueView view;
    view.v = [](double, double x) { return x * x; };
    view.vx = [](double, double x) { return 2.0 * x; };
    view.vxx = [](double, double) { return 2.0; };
    view.vt = [](double, double) { return 0.0; };
    view.vsx = [](double, double) { return 0.0; };
    view.vxxx = [](double, double) { return 0.0; };
    auto bundle = simulate_forward(
        p, [](double, double) { return 0.0; }, ScenarioMeasure::constant(0.7), 0.0, 0.4, 100, 2,
        8);
    const auto rep = mixed_derivative_check(view, p, bundle);
    CHECK(rep.n_checked > 0);  // F = 2 everywhere
    CHECK(rep.max_resid == 0.0);
  }
}

TEST_CASE("expectation consistency against the dynamic programming value") {
  // example 1 from (0,0): deterministic costs (gamma T)^2 dominated by V = 1
  {
    const auto ex = example1(1.0);
    for (double gamma : {0.2, 0.5, 0.75, 1.0}) {
      auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                     ScenarioMeasure::constant(gamma), 0.0, 0.0, 400, 1, 1);
      const double cost = ex.problem.terminal(bundle.X(0, 400));
      CHECK(cost <= ex.oracle.value(0.0, 0.0) + 1e-9);
      if (gamma == 1.0)
        CHECK(cost == doctest::Approx(ex.oracle.value(0.0, 0.0)).epsilon(1e-9));
    }
  }
  // example 2 with Monte Carlo costs
  {
    const auto ex = example2(0.25);
    const double V = ex.oracle.value(0.0, 1.0);
    for (double gamma : {0.2, 0.6, 1.0}) {
      auto bundle = simulate_forward(ex.problem, oracle_feedback(ex),
                                     ScenarioMeasure::constant(gamma), 0.0, 1.0, 2000, 2000, 17);
      const double dt = bundle.dt();
      std::vector<double> cost(static_cast<std::size_t>(bundle.n_paths));
      for (int j = 0; j < bundle.n_paths; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        double running = 0.0;
        for (int i = 0; i < bundle.n_steps; ++i) {
          const auto ii = static_cast<std::size_t>(i);
          running += ex.problem.g(bundle.times[ii], bundle.X(jj, ii), 0.0, 0.0,
                                  bundle.U(jj, ii)) *
                     bundle.gamma(jj, ii) * dt;
        }
        cost[jj] = ex.problem.terminal(bundle.X(jj, static_cast<std::size_t>(bundle.n_steps))) +
                   running;
      }
      const double m = mean(cost);
      const double se = sample_stddev(cost) / std::sqrt(static_cast<double>(cost.size()));
      CHECK(m <= V + 3.0 * se + 5e-3);
      if (gamma == 1.0) CHECK(std::abs(m - V) <= 3.0 * se + 5e-3);
    }
  }
}
