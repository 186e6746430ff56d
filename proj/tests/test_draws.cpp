#include <doctest.h>

#include <cmath>

#include "hychoice/draws.hpp"
#include "hychoice/errors.hpp"

using namespace hychoice;

TEST_CASE("halton_draws base-2 start maps the median to zero") {
  // With no skip, the first base-2 point is 1/2, whose normal quantile is 0.
  const DrawSet draws = halton_draws(1, 1, 1, 0, 0);
  REQUIRE(draws.values.size() == 1);
  REQUIRE(draws.values[0].rows() == 1);
  REQUIRE(draws.values[0].cols() == 1);
  CHECK(std::abs(draws(0, 0, 0)) < 1e-14);
}

TEST_CASE("halton_draws consumes one contiguous block per observation") {
  // Observation o covers sequence indices skip + o*n_draws + 1 onward, so the
  // second observation of a 1-draw set equals the second draw of the first.
  const DrawSet wide = halton_draws(2, 1, 1, 0, 0);
  const DrawSet deep = halton_draws(1, 2, 1, 0, 0);
  CHECK(wide(1, 0, 0) == deep(0, 1, 0));
  CHECK(deep(0, 1, 0) == doctest::Approx(inverse_normal_cdf(0.25)).epsilon(1e-12));

  const DrawSet skipped = halton_draws(1, 1, 1, 1, 0);
  CHECK(skipped(0, 0, 0) == deep(0, 1, 0));  // skip=1 lands on point 2 = 1/4
}

TEST_CASE("halton_draws regenerates bit-identically") {
  const DrawSet a = halton_draws(7, 25, 3, 10, 42);
  const DrawSet b = halton_draws(7, 25, 3, 10, 42);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t d = 0; d < a.values.size(); ++d)
    CHECK((a.values[d].array() == b.values[d].array()).all());

  const DrawSet c = halton_draws(7, 25, 3, 10, 43);
  bool any_difference = false;
  for (std::size_t d = 0; d < a.values.size(); ++d)
    any_difference = any_difference || !(a.values[d].array() == c.values[d].array()).all();
  CHECK(any_difference);
}

TEST_CASE("halton_draws moments match the standard normal") {
  for (const std::uint64_t seed : {std::uint64_t{0}, std::uint64_t{5}}) {
    const DrawSet draws = halton_draws(4, 1000, 2, 10, seed);
    for (int dim = 0; dim < draws.dims; ++dim) {
      const double n = static_cast<double>(draws.n_obs) * draws.n_draws;
      const double mean = draws.values[dim].sum() / n;
      const double var = draws.values[dim].array().square().sum() / n - mean * mean;
      INFO("seed ", seed, " dim ", dim);
      CHECK(std::abs(mean) < 3.0 / std::sqrt(n));
      CHECK(std::abs(var - 1.0) < 0.05);
    }
  }
}

TEST_CASE("halton_draws validates its arguments") {
  CHECK_THROWS_AS(halton_draws(1, 0, 1), DomainError);
  CHECK_THROWS_AS(halton_draws(0, 10, 1), DomainError);
  CHECK_THROWS_AS(halton_draws(1, 10, 11), DomainError);
  CHECK_THROWS_AS(halton_draws(1, 10, 0), DomainError);
}

TEST_CASE("inverse_normal_cdf matches standard quantiles") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959964).epsilon(1e-5));
  CHECK(inverse_normal_cdf(0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(inverse_normal_cdf(0.9) == doctest::Approx(-inverse_normal_cdf(0.1)).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), DomainError);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), DomainError);
}

TEST_CASE("simulation draw sets carry no weights") {
  const DrawSet draws = halton_draws(3, 50, 2);
  CHECK(draws.log_weights.size() == 0);
  CHECK_FALSE(draws.shared_nodes);
  CHECK(draws.skip == 10);
}
