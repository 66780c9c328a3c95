#include <cmath>
#include <random>

#include "doctest.h"
#include "gsc/errors.hpp"
#include "gsc/g_operator.hpp"

using namespace gsc;

namespace {
const VolBounds kBounds{0.2, 1.0};
}

TEST_CASE("g_scalar hand values") {
  CHECK(g_scalar(0.0, kBounds) == 0.0);
  CHECK(g_scalar(2.0, kBounds) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g_scalar(-2.0, kBounds) == doctest::Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("g_maximizer sign rule and tie-break") {
  CHECK(g_maximizer(5.0, kBounds) == 1.0);
  CHECK(g_maximizer(-5.0, kBounds) == 0.2);
  CHECK(g_maximizer(0.0, kBounds) == 1.0);  // tie goes to the upper bound
}

TEST_CASE("invalid bounds rejected") {
  CHECK_THROWS_AS((VolBounds{0.0, 1.0}.require_valid()), ConfigError);
  CHECK_THROWS_AS((VolBounds{-0.5, 1.0}.require_valid()), ConfigError);
  CHECK_THROWS_AS((VolBounds{1.0, 0.2}.require_valid()), ConfigError);
  CHECK_NOTHROW((VolBounds{0.2, 0.2}.require_valid()));
}

TEST_CASE("operator laws on random inputs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> amp(-50.0, 50.0);
  std::uniform_real_distribution<double> lo_d(0.05, 1.0);
  std::uniform_real_distribution<double> width(0.0, 2.0);
  std::uniform_real_distribution<double> scale(0.0, 3.0);
  for (int it = 0; it < 10000; ++it) {
    const double lo = lo_d(rng);
    const VolBounds b{lo, lo + width(rng)};
    const double a1 = amp(rng), a2 = amp(rng);

    // monotonicity
    const double hi_arg = std::max(a1, a2), lo_arg = std::min(a1, a2);
    CHECK(g_scalar(hi_arg, b) >= g_scalar(lo_arg, b));

    // sublinearity
    CHECK(g_scalar(a1 + a2, b) <= g_scalar(a1, b) + g_scalar(a2, b) + 1e-12);

    // positive homogeneity
    const double lam = scale(rng);
    CHECK(g_scalar(lam * a1, b) == doctest::Approx(lam * g_scalar(a1, b)).epsilon(1e-12));

    // two-point representation
    CHECK(g_scalar(a1, b) == doctest::Approx(0.5 * g_maximizer(a1, b) * a1).epsilon(1e-14));

    // |G(a)| <= hi |a| / 2
    CHECK(std::abs(g_scalar(a1, b)) <= 0.5 * b.sigma_hi_sq * std::abs(a1) + 1e-15);
  }
}
