#include "gsc/jets.hpp"

#include <algorithm>
#include <cmath>

#include "gsc/errors.hpp"

namespace gsc {

namespace {

// two-level Richardson on first-order quotients: kills the h and h^2 terms
double richardson3(double d1, double d2, double d4) {
  const double r1 = 2.0 * d2 - d1;
  const double r2 = 2.0 * d4 - d2;
  return (4.0 * r2 - r1) / 3.0;
}

}  // namespace

OneSided one_sided_dx(const std::function<double(double, double)>& value, double t, double x,
                      double h0) {
  if (!value) throw ConfigError("one_sided_dx: missing evaluator");
  if (!(h0 > 0.0)) throw ConfigError("one_sided_dx: h0 must be > 0");
  const double v0 = value(t, x);
  auto quotient = [&](double h) { return (value(t, x + h) - v0) / h; };
  OneSided out;
  out.d_plus = richardson3(quotient(h0), quotient(0.5 * h0), quotient(0.25 * h0));
  out.d_minus = richardson3(quotient(-h0), quotient(-0.5 * h0), quotient(-0.25 * h0));
  return out;
}

JetReport jet_intervals(double d_minus, double d_plus, double tie_tol) {
  JetReport rep;
  rep.d_minus = d_minus;
  rep.d_plus = d_plus;
  if (std::abs(d_minus - d_plus) <= tie_tol) {
    const double d = 0.5 * (d_minus + d_plus);
    rep.sub = Interval{d, d};
    rep.super = Interval{d, d};
  } else if (d_minus < d_plus) {
    rep.sub = Interval{d_minus, d_plus};
  } else {
    rep.super = Interval{d_plus, d_minus};
  }
  return rep;
}

PBounds p_bounds(const ControlProblem& p, std::span<const ScenarioMeasure> candidates,
                 const FeedbackFn& u_feedback, double t, double x, const PBoundsOptions& opt) {
  if (candidates.empty()) throw ConfigError(p.name + ": p_bounds needs candidate scenarios");
  if (!p.k_integrand)
    throw ConfigError(p.name + ": p_bounds needs the closed-form K integrand for membership");

  SimulateOptions sim_opt;
  sim_opt.n_threads = opt.n_threads;

  PBounds out;
  bool any = false;
  for (const auto& scenario : candidates) {
    CandidateResult res;
    res.scenario = scenario.describe();

    PathBundle bundle = simulate_forward(p, u_feedback, scenario, t, x, opt.n_steps,
                                         opt.n_paths, opt.seed, sim_opt);
    k_accumulate(bundle, p);
    std::vector<double> k_T(static_cast<std::size_t>(bundle.n_paths));
    for (int j = 0; j < bundle.n_paths; ++j)
      k_T[static_cast<std::size_t>(j)] =
          bundle.K(static_cast<std::size_t>(j), static_cast<std::size_t>(bundle.n_steps));
    res.k_T = mean(k_T);
    res.member = std::abs(res.k_T) <= opt.membership_tol;

    if (!res.member) {
      if (opt.strict)
        throw DomainError(p.name + ": candidate " + res.scenario +
                          " fails the reference-measure test, K_T = " + std::to_string(res.k_T));
      out.candidates.push_back(std::move(res));
      continue;
    }

    res.p = adjoint_p_mc(p, scenario, u_feedback, t, x, std::max(2, opt.n_paths), opt.n_steps,
                         opt.seed, nullptr, sim_opt);
    if (!any) {
      out.p_tilde = out.p_bar = res.p.value;
      any = true;
    } else {
      out.p_tilde = std::min(out.p_tilde, res.p.value);
      out.p_bar = std::max(out.p_bar, res.p.value);
    }
    out.candidates.push_back(std::move(res));
  }
  if (!any) throw DomainError(p.name + ": no candidate passed the reference-measure test");
  return out;
}

}  // namespace gsc
