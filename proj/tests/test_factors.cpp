#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hychoice/dataset.hpp"
#include "hychoice/errors.hpp"
#include "hychoice/factors.hpp"

using namespace hychoice;

namespace {

// Generator loadings used throughout: two orthogonal factors, the first four
// indicators on factor one, the last three on factor two.
const std::vector<double> kLoadings{0.877, 0.740, 0.793, 0.569,
                                    0.895, 0.845, 0.476};

Eigen::MatrixXd population_corr() {
  const int p = static_cast<int>(kLoadings.size());
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(p, 2);
  for (int i = 0; i < p; ++i) lambda(i, i < 4 ? 0 : 1) = kLoadings[i];
  Eigen::MatrixXd corr = lambda * lambda.transpose();
  for (int i = 0; i < p; ++i) corr(i, i) = 1.0;
  return corr;
}

Dataset indicator_sample(int n, unsigned seed) {
  const int p = static_cast<int>(kLoadings.size());
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  for (int i = 0; i < p; ++i)
    data.dictionary.push_back({"IND" + std::to_string(i), VarKind::Likert});
  data.observations.reserve(n);
  for (int r = 0; r < n; ++r) {
    const double f1 = normal(rng), f2 = normal(rng);
    Observation obs;
    obs.id = "s" + std::to_string(r);
    for (int i = 0; i < p; ++i) {
      const double lam = kLoadings[i];
      const double common = (i < 4 ? f1 : f2) * lam;
      const double unique = std::sqrt(1.0 - lam * lam) * normal(rng);
      obs.indicators["IND" + std::to_string(i)] = common + unique;
    }
    data.observations.push_back(std::move(obs));
  }
  return data;
}

std::vector<std::string> indicator_names() {
  std::vector<std::string> names;
  for (int i = 0; i < 7; ++i) names.push_back("IND" + std::to_string(i));
  return names;
}

void check_two_factor_structure(const FactorSolution& sol, double tol) {
  REQUIRE(sol.n_factors == 2);
  REQUIRE(sol.loadings.rows() == 7);
  const int g1 = sol.assignment[0];
  for (int i = 0; i < 4; ++i) CHECK(sol.assignment[i] == g1);
  const int g2 = sol.assignment[4];
  CHECK(g2 != g1);
  for (int i = 4; i < 7; ++i) CHECK(sol.assignment[i] == g2);
  for (int i = 0; i < 7; ++i) {
    INFO("indicator ", i);
    CHECK(std::abs(std::abs(sol.loadings(i, sol.assignment[i])) - kLoadings[i]) <=
          tol);
  }
}

}  // namespace

TEST_CASE("correlation_matrix computes pairwise-complete Pearson correlations") {
  Dataset data;
  data.dictionary = {{"A", VarKind::Likert}, {"B", VarKind::Likert},
                     {"C", VarKind::Likert}};
  const std::vector<double> a{1, 2, 3, 4, 5};
  for (int i = 0; i < 5; ++i) {
    Observation obs;
    obs.id = "r" + std::to_string(i);
    obs.indicators["A"] = a[i];
    obs.indicators["B"] = 2.0 * a[i] + 1.0;   // perfectly correlated with A
    if (i != 2) obs.indicators["C"] = -a[i];  // one missing response
    data.observations.push_back(std::move(obs));
  }

  const Eigen::MatrixXd corr = correlation_matrix(data, {"A", "B", "C"});
  REQUIRE(corr.rows() == 3);
  CHECK(corr(0, 0) == doctest::Approx(1.0));
  CHECK(corr(0, 1) == doctest::Approx(1.0));
  CHECK(corr(0, 2) == doctest::Approx(-1.0));
  CHECK(corr(1, 2) == doctest::Approx(-1.0));
  CHECK(corr(2, 1) == corr(1, 2));

  SUBCASE("zero-variance indicator is named in the error") {
    for (auto& obs : data.observations) obs.indicators["B"] = 3.0;
    CHECK_THROWS_WITH_AS(correlation_matrix(data, {"A", "B"}),
                         doctest::Contains("B"), DomainError);
  }
  SUBCASE("a pair needs at least two complete rows") {
    for (auto& obs : data.observations) obs.indicators.erase("C");
    data.observations[0].indicators["C"] = 1.0;
    CHECK_THROWS_AS(correlation_matrix(data, {"A", "C"}), DomainError);
  }
  SUBCASE("unknown indicator name") {
    CHECK_THROWS_AS(correlation_matrix(data, {"A", "Nope"}), SchemaError);
  }
}

TEST_CASE("extract_factors recovers the planted two-factor structure") {
  SUBCASE("population correlation matrix") {
    const FactorSolution sol = extract_factors(population_corr());
    check_two_factor_structure(sol, 0.01);
    REQUIRE(sol.eigenvalues.size() >= 2);
    for (std::size_t i = 1; i < sol.eigenvalues.size(); ++i)
      CHECK(sol.eigenvalues[i] <= sol.eigenvalues[i - 1] + 1e-12);
  }
  SUBCASE("sampled indicators at n = 20000") {
    const Dataset data = indicator_sample(20000, 20123);
    const Eigen::MatrixXd corr = correlation_matrix(data, indicator_names());
    const FactorSolution sol = extract_factors(corr);
    check_two_factor_structure(sol, 0.05);
  }
}

TEST_CASE("extract_factors communalities equal row sums of squared loadings") {
  const FactorSolution sol = extract_factors(population_corr());
  for (int i = 0; i < sol.loadings.rows(); ++i) {
    double row = 0.0;
    for (int f = 0; f < sol.n_factors; ++f)
      row += sol.loadings(i, f) * sol.loadings(i, f);
    CHECK(sol.communalities[i] == doctest::Approx(row).epsilon(1e-9));
    CHECK(sol.communalities[i] <= 1.0 + 1e-9);
  }
}

TEST_CASE("extract_factors one-factor solution hits the generating loading") {
  const int p = 7;
  const double lam = 0.8;
  Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(p, p, lam * lam);
  for (int i = 0; i < p; ++i) corr(i, i) = 1.0;
  const FactorSolution sol = extract_factors(corr);
  REQUIRE(sol.n_factors == 1);
  for (int i = 0; i < p; ++i)
    CHECK(sol.loadings(i, 0) == doctest::Approx(lam).epsilon(1e-6));
  for (int i = 0; i < p; ++i) CHECK(sol.assignment[i] == 0);
}

TEST_CASE("extract_factors is equivariant under indicator negation") {
  const Eigen::MatrixXd corr = population_corr();
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(7);
  signs(1) = -1.0;  // negate an indicator that is not the sign anchor
  const Eigen::MatrixXd flipped =
      signs.asDiagonal() * corr * signs.asDiagonal();

  const FactorSolution base = extract_factors(corr);
  const FactorSolution neg = extract_factors(flipped);
  REQUIRE(neg.n_factors == base.n_factors);
  for (int i = 0; i < 7; ++i) {
    CHECK(neg.assignment[i] == base.assignment[i]);
    for (int f = 0; f < base.n_factors; ++f)
      CHECK(std::abs(neg.loadings(i, f)) ==
            doctest::Approx(std::abs(base.loadings(i, f))).epsilon(1e-6));
  }
  CHECK(neg.loadings(1, base.assignment[1]) ==
        doctest::Approx(-base.loadings(1, base.assignment[1])).epsilon(1e-6));
}

TEST_CASE("extract_factors sign convention and retention rules") {
  const FactorSolution sol = extract_factors(population_corr());
  for (int f = 0; f < sol.n_factors; ++f) {
    double biggest = 0.0;
    for (int i = 0; i < sol.loadings.rows(); ++i)
      if (std::abs(sol.loadings(i, f)) > std::abs(biggest))
        biggest = sol.loadings(i, f);
    CHECK(biggest > 0.0);
  }

  SUBCASE("identity correlation retains nothing under the eigenvalue rule") {
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(7, 7);
    CHECK_THROWS_AS(extract_factors(identity), DomainError);
    const FactorSolution forced = extract_factors(identity, Retention{false, 2});
    CHECK(forced.n_factors == 2);
  }
  SUBCASE("explicit count overrides the eigenvalue rule") {
    const FactorSolution one = extract_factors(population_corr(), Retention{false, 1});
    CHECK(one.n_factors == 1);
  }
}

TEST_CASE("independent indicators stay uncorrelated in sampled data") {
  std::mt19937 rng(77);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.dictionary = {{"X", VarKind::Likert}, {"Y", VarKind::Likert}};
  for (int i = 0; i < 10000; ++i) {
    Observation obs;
    obs.id = "i" + std::to_string(i);
    obs.indicators["X"] = normal(rng);
    obs.indicators["Y"] = normal(rng);
    data.observations.push_back(std::move(obs));
  }
  const Eigen::MatrixXd corr = correlation_matrix(data, {"X", "Y"});
  CHECK(std::abs(corr(0, 1)) < 0.05);
}
