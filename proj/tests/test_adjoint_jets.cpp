#include <cmath>

#include "doctest.h"
#include "gsc/errors.hpp"
#include "gsc/examples.hpp"
#include "gsc/jets.hpp"
#include "gsc/problem_io.hpp"
#include "gsc/riccati.hpp"

using namespace gsc;

namespace {

FeedbackFn oracle_feedback(const ExampleProblem& ex) {
  return [fb = ex.oracle.feedback](double s, double x) { return fb(s, x); };
}

}  // namespace

TEST_CASE("adjoint weights") {
  // examples 1 and 3: every coefficient derivative vanishes, lambda = 1
  for (int which : {1, 3}) {
    const auto ex = which == 1 ? example1(1.0) : example3(2.0, 1.25);
    const double t0 = which == 1 ? 0.0 : 1.0;
    const auto scenario =
        which == 1 ? ScenarioMeasure::constant(1.0) : ScenarioMeasure::constant(0.8);
    const auto bundle =
        simulate_forward(ex.problem, oracle_feedback(ex), scenario, t0, 0.0, 200, 1, 4);
    const auto lambda = adjoint_weights(bundle, ex.problem);
    for (int i = 0; i <= 200; ++i) CHECK(lambda(0, static_cast<std::size_t>(i)) == 1.0);
  }
  // beta = 0, alpha = c: deterministic exponential
  {
    AffineQuadraticSpec spec;
    spec.bounds = {0.2, 1.0};
    spec.control = ControlSet::finite({0.0});
    spec.hx = 0.7;  // alpha = h_x = 0.7, beta = 0
    spec.px = 1.0;
    const auto p = make_affine_quadratic(spec);
    const auto bundle = simulate_forward(
        p, [](double, double) { return 0.0; }, ScenarioMeasure::constant(1.0), 0.0, 0.5, 400, 1,
        4);
    const auto lambda = adjoint_weights(bundle, p);
    CHECK(lambda(0, 0) == 1.0);
    CHECK(lambda(0, 400) == doctest::Approx(std::exp(0.7)).epsilon(1e-9));
    CHECK(lambda(0, 200) == doctest::Approx(std::exp(0.35)).epsilon(1e-9));
  }
}

TEST_CASE("monte-carlo adjoint value on deterministic examples") {
  const double T = 1.0, tstar = 0.0;
  const auto ex = example1(T);
  const double xstar = -0.6 * (T - tstar);
  const auto up = adjoint_p_mc(ex.problem, ScenarioMeasure::constant(1.0), oracle_feedback(ex),
                               tstar, xstar, 2, 1000, 7);
  CHECK(up.value == doctest::Approx(0.8 * (T - tstar)).epsilon(1e-12));
  CHECK(up.stderr_ == 0.0);  // single deterministic path
  const auto dn = adjoint_p_mc(ex.problem, ScenarioMeasure::constant(0.2), oracle_feedback(ex),
                               tstar, xstar, 2, 1000, 7);
  CHECK(dn.value == doctest::Approx(-0.8 * (T - tstar)).epsilon(1e-12));

  const auto ex3 = example3(2.0, 1.25);
  const auto bal = adjoint_p_mc(ex3.problem, ScenarioMeasure::constant(0.8), oracle_feedback(ex3),
                                1.0, 0.0, 2, 1000, 7);
  CHECK(bal.value == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(adjoint_p_mc(ex.problem, ScenarioMeasure::constant(1.0), oracle_feedback(ex),
                               tstar, xstar, 1, 10, 7),
                  ConfigError);
}

TEST_CASE("monte-carlo adjoint value for the linear-quadratic example") {
  const auto ex = example2(1.0);
  const auto view = view_of(ex.oracle);
  const auto est = adjoint_p_mc(ex.problem, ScenarioMeasure::constant(1.0), oracle_feedback(ex),
                                0.0, 1.0, 2000, 2048, 12345, &view);
  const double p0 = riccati_closed_form(0.0, 1.0) * 1.0;
  CHECK(std::abs(est.value - p0) <= 3.0 * est.stderr_ + 1.0);
  CHECK(est.stderr_ > 0.0);
}

TEST_CASE("feedback adjoint identification") {
  // example 2: p = P X, q = P X + P ubar, and the optimality relation
  // p + q + ubar = 0 holds exactly with the closed forms
  {
    const auto ex = example2(1.0);
    const auto view = view_of(ex.oracle);
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                   0.0, 1.0, 512, 4, 99);
    bsde_candidates(bundle, view, ex.problem);
    const auto adj = adjoint_feedback(view, ex.problem, bundle);
    double worst = 0.0, worst_q = 0.0;
    for (int j = 0; j < bundle.n_paths; ++j)
      for (int i = 0; i <= bundle.n_steps; ++i) {
        const auto jj = static_cast<std::size_t>(j);
        const auto ii = static_cast<std::size_t>(i);
        const double s = bundle.times[ii];
        const double X = bundle.X(jj, ii);
        const double P = ex.oracle.riccati(s);
        const double ub = bundle.U(jj, ii);
        worst = std::max(worst, std::abs(adj.p(jj, ii) + adj.q(jj, ii) + ub));
        worst_q = std::max(worst_q, std::abs(adj.q(jj, ii) - (P * X + P * ub)));
      }
    CHECK(worst <= 1e-12);
    CHECK(worst_q <= 1e-12);
    // terminal condition p_T = Phi'(X_T)
    for (int j = 0; j < bundle.n_paths; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      const double XT = bundle.X(jj, static_cast<std::size_t>(bundle.n_steps));
      CHECK(adj.p(jj, static_cast<std::size_t>(bundle.n_steps)) ==
            doctest::Approx(ex.problem.dterminal(XT)).epsilon(1e-12));
    }
  }
  // example 3 balanced path: p = 0 everywhere, adjoint residual tiny
  {
    const auto ex = example3(2.0, 1.25);
    const auto view = view_of(ex.oracle);
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(0.8),
                                   1.0, 0.0, 400, 1, 99);
    const auto adj = adjoint_feedback(view, ex.problem, bundle);
    for (int i = 0; i <= 400; ++i)
      CHECK(std::abs(adj.p(0, static_cast<std::size_t>(i))) <= 1e-12);
    CHECK(adj.adjoint_residual_max <= 1e-10);
    CHECK(adj.p_t == doctest::Approx(0.0));
  }
  // kink mask: samples inside the band are dropped from the aggregate
  {
    const auto ex = example1(1.0);
    const auto view = view_of(ex.oracle);
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                   0.0, -0.6, 100, 1, 99);
    const auto adj = adjoint_feedback(view, ex.problem, bundle, [](double t, double x) {
      return std::abs(x + 0.6 * (1.0 - t)) < 1e-9;
    });
    CHECK(adj.n_masked == 1);  // only the starting point sits on the kink
    CHECK(std::isnan(adj.p(0, 0)));
    CHECK(std::isfinite(adj.p(0, 1)));
  }
}

TEST_CASE("adjoint consistency") {
  const auto ex = example1(1.0);
  const auto view = view_of(ex.oracle);
  auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                 0.0, -0.599, 1000, 1, 5);
  const auto adj = adjoint_feedback(view, ex.problem, bundle);
  const auto mc = adjoint_p_mc(ex.problem, ScenarioMeasure::constant(1.0), oracle_feedback(ex),
                               0.0, -0.599, 2, 1000, 5);
  const auto rep = adjoint_consistency(adj, mc, 1e-9);
  CHECK(rep.pass);
  CHECK(rep.discrepancy <= 1e-10);
}

TEST_CASE("maximum-principle sweep") {
  // example 2: H_u = p + q + ubar = 0, minimum inner product ~ 0
  {
    const auto ex = example2(1.0);
    const auto view = view_of(ex.oracle);
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                   0.0, 1.0, 512, 4, 21);
    bsde_candidates(bundle, view, ex.problem);
    const auto adj = adjoint_feedback(view, ex.problem, bundle);
    const auto mesh = ex.problem.control_set.mesh(65);
    const auto rep = mp_check(ex.problem, bundle, adj, mesh, 1e-9);
    CHECK(rep.pass);
    CHECK(std::abs(rep.min_inner) <= 1e-9);
  }
  // example 1: singleton control set, vacuous pass
  {
    const auto ex = example1(1.0);
    const auto view = view_of(ex.oracle);
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(1.0),
                                   0.0, 0.5, 100, 1, 21);
    const auto adj = adjoint_feedback(view, ex.problem, bundle);
    const auto rep = mp_check(ex.problem, bundle, adj, ex.problem.control_set.mesh(1));
    CHECK(rep.pass);
    CHECK(rep.min_inner == 0.0);
  }
  // example 3 balanced: H_u = p = 0
  {
    const auto ex = example3(2.0, 1.25);
    const auto view = view_of(ex.oracle);
    auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), ScenarioMeasure::constant(0.8),
                                   1.0, 0.0, 200, 1, 21);
    const auto adj = adjoint_feedback(view, ex.problem, bundle);
    const auto rep = mp_check(ex.problem, bundle, adj, ex.problem.control_set.mesh(65));
    CHECK(rep.pass);
  }
}

TEST_CASE("one-sided derivatives") {
  const auto ex = example1(1.0);
  const auto d = one_sided_dx(ex.oracle.value, 0.0, -0.6);
  CHECK(d.d_minus == doctest::Approx(-0.8).epsilon(1e-6));
  CHECK(d.d_plus == doctest::Approx(0.8).epsilon(1e-6));

  const auto smooth = one_sided_dx(ex.oracle.value, 0.0, 0.5);
  CHECK(smooth.d_minus == doctest::Approx(smooth.d_plus).epsilon(1e-9));
  CHECK(smooth.d_plus == doctest::Approx(ex.oracle.dx(0.0, 0.5)).epsilon(1e-9));

  const auto vee = one_sided_dx([](double, double x) { return std::abs(x); }, 0.0, 0.0);
  CHECK(vee.d_minus == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(vee.d_plus == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(one_sided_dx({}, 0.0, 0.0), ConfigError);
}

TEST_CASE("jet intervals") {
  // concave-corner case: nonempty sub-jet, empty super-jet
  const auto kink = jet_intervals(-0.8, 0.8);
  REQUIRE(kink.sub.has_value());
  CHECK(kink.sub->lo == -0.8);
  CHECK(kink.sub->hi == 0.8);
  CHECK_FALSE(kink.super.has_value());

  const auto smooth = jet_intervals(0.37, 0.37 + 1e-12);
  REQUIRE(smooth.sub.has_value());
  REQUIRE(smooth.super.has_value());
  CHECK(smooth.sub->lo == smooth.sub->hi);

  const auto mirror = jet_intervals(1.0, -1.0);
  CHECK_FALSE(mirror.sub.has_value());
  REQUIRE(mirror.super.has_value());
  CHECK(mirror.super->lo == -1.0);
  CHECK(mirror.super->hi == 1.0);
}

TEST_CASE("adjoint bounds over certified scenarios") {
  // example 1 at the branch point: the two extremes are the certified
  // scenarios and give the one-sided derivatives
  {
    const auto ex = example1(1.0);
    const ScenarioMeasure candidates[] = {ScenarioMeasure::constant(1.0),
                                          ScenarioMeasure::constant(0.2)};
    PBoundsOptions opt;
    opt.n_steps = 1000;
    opt.membership_tol = 1e-8;
    const auto pb = p_bounds(ex.problem, candidates, oracle_feedback(ex), 0.0, -0.6, opt);
    CHECK(pb.p_tilde == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(pb.p_bar == doctest::Approx(0.8).epsilon(1e-12));

    const auto d = one_sided_dx(ex.oracle.value, 0.0, -0.6);
    const auto jets = jet_intervals(d.d_minus, d.d_plus);
    REQUIRE(jets.sub.has_value());
    CHECK(jets.sub->lo >= pb.p_tilde - 1e-9);
    CHECK(jets.sub->hi <= pb.p_bar + 1e-9);

    // an interior constant is not a reference scenario here
    const ScenarioMeasure with_bad[] = {ScenarioMeasure::constant(1.0),
                                        ScenarioMeasure::constant(0.5)};
    CHECK_THROWS_AS(p_bounds(ex.problem, with_bad, oracle_feedback(ex), 0.0, -0.6, opt),
                    DomainError);
    PBoundsOptions lax = opt;
    lax.strict = false;
    const auto filtered = p_bounds(ex.problem, with_bad, oracle_feedback(ex), 0.0, -0.6, lax);
    CHECK(filtered.p_tilde == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(filtered.p_bar == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_FALSE(filtered.candidates[1].member);
  }
  // example 2: the reference family is the single constant-1 scenario
  {
    const auto ex = example2(0.5);
    const ScenarioMeasure candidates[] = {ScenarioMeasure::constant(1.0)};
    PBoundsOptions opt;
    opt.n_steps = 1024;
    opt.n_paths = 500;
    opt.seed = 31;
    opt.membership_tol = 1e-9;
    const auto pb = p_bounds(ex.problem, candidates, oracle_feedback(ex), 0.0, 1.0, opt);
    CHECK(pb.p_tilde == pb.p_bar);
    const double p0 = riccati_closed_form(0.0, 0.5);
    CHECK(std::abs(pb.p_bar - p0) <= 4.0 * pb.candidates[0].p.stderr_ + 0.05);
  }
  // example 3: balanced scenarios all give zero
  {
    const auto ex = example3(2.0, 1.25);
    const ScenarioMeasure candidates[] = {ScenarioMeasure::constant(0.8),
                                          ScenarioMeasure::piecewise({0.6, 1.0}, {1.5})};
    PBoundsOptions opt;
    opt.n_steps = 1000;
    opt.membership_tol = 1e-6;
    const auto pb = p_bounds(ex.problem, candidates, oracle_feedback(ex), 1.0, 0.0, opt);
    CHECK(std::abs(pb.p_tilde) <= 1e-12);
    CHECK(std::abs(pb.p_bar) <= 1e-12);
  }

  const auto ex = example1(1.0);
  CHECK_THROWS_AS(p_bounds(ex.problem, {}, oracle_feedback(ex), 0.0, -0.6, {}), ConfigError);
}
