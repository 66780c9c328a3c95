#include "doctest.h"
#include "gsc/errors.hpp"
#include "gsc/problem_io.hpp"
#include "gsc/util.hpp"

using namespace gsc;

namespace {

const char* kLqProblem = R"(
# linear-quadratic test problem
name = lq
T = 1.0
sigma_lo_sq = 0.2
sigma_hi_sq = 1.0
control = real 4
h = 0 4 1
sigma = 0 1 1
g = 0 0 0 0 0 1 1
phi = 0 0 1
)";

}  // namespace

TEST_CASE("key-value parsing") {
  const auto kv = KeyValues::parse_string("a = 1.5\n# comment\n b= x y \na = 2.5\n");
  CHECK(kv.get_num("a") == 2.5);  // later key wins
  CHECK(kv.get_or("b", "") == "x y");
  CHECK(kv.get_num_or("missing", 7.0) == 7.0);
  CHECK_THROWS_AS(kv.get_num("b"), ConfigError);
  CHECK_THROWS_AS(KeyValues::parse_string("no equals sign"), ConfigError);
  CHECK_THROWS_AS(KeyValues::parse_string("= 3"), ConfigError);
  CHECK(KeyValues::parse_string("x=1\ny=2").canonical() ==
        KeyValues::parse_string("y=2\nx=1").canonical());
  CHECK(fnv1a64(kv.canonical()) != 0);
}

TEST_CASE("problem file round trip") {
  const auto p = load_problem(KeyValues::parse_string(kLqProblem));
  CHECK(p.name == "lq");
  CHECK(p.horizon == 1.0);
  CHECK(p.bounds.sigma_hi_sq == 1.0);
  CHECK(p.control_set.kind == ControlSet::Kind::Real);
  CHECK(p.h(0.0, 0.5, 0.25) == doctest::Approx(4.0 * 0.5 + 0.25));
  CHECK(p.sigma(0.0, 0.5, 0.25) == doctest::Approx(0.75));
  CHECK(p.g(0.0, 2.0, 0.0, 0.0, 3.0) == doctest::Approx(0.5 * (4.0 + 9.0)));
  CHECK(p.terminal(2.0) == doctest::Approx(2.0));
  CHECK(p.terminal_d);
  CHECK(p.argmin_F);
  CHECK_FALSE(p.sigma_is_zero);
  // argmin of F matches the analytic minimiser at a sample point
  const double a2 = 0.7, a3 = 2.0;
  const double u = p.argmin_F(0.0, 0.5, 0.0, a2, a3);
  CHECK(u == doctest::Approx(-(a3 * 0.5 + a2) / (1.0 + a3)).epsilon(1e-12));
}

TEST_CASE("problem file errors") {
  CHECK_THROWS_AS(load_problem(KeyValues::parse_string("T = 1")), ConfigError);
  CHECK_THROWS_AS(
      load_problem(KeyValues::parse_string("sigma_lo_sq = 0.2\nsigma_hi_sq = 1\ncontrol = blob")),
      ConfigError);
  CHECK_THROWS_AS(load_problem(KeyValues::parse_string(
                      "sigma_lo_sq = 0.2\nsigma_hi_sq = 1\ncontrol = interval 1")),
                  ConfigError);
  CHECK_THROWS_AS(load_problem(KeyValues::parse_string(
                      "sigma_lo_sq = 0.2\nsigma_hi_sq = 1\ncontrol = interval 0 1\nh = 1 2")),
                  ConfigError);
  CHECK_THROWS_AS(load_problem(KeyValues::parse_string(
                      "sigma_lo_sq = 1.0\nsigma_hi_sq = 0.2\ncontrol = interval 0 1")),
                  ConfigError);
  CHECK_THROWS_AS(load_problem_file("/nonexistent/problem.conf"), ConfigError);
}

TEST_CASE("deterministic flag from the sigma family") {
  const auto p = load_problem(KeyValues::parse_string(
      "sigma_lo_sq = 0.5\nsigma_hi_sq = 1\ncontrol = interval 1 2\nh = 0 0 1\nphi = -1 2 -2"));
  CHECK(p.sigma_is_zero);
}
