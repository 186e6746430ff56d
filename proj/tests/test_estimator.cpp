#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "hychoice/dataset.hpp"
#include "hychoice/draws.hpp"
#include "hychoice/errors.hpp"
#include "hychoice/estimator.hpp"
#include "hychoice/likelihood.hpp"
#include "hychoice/modelspec.hpp"
#include "hychoice/presets.hpp"
#include "hychoice/synth.hpp"

using namespace hychoice;
using testutil::counts_dataset;

namespace {

Dataset preset_sample(ModelFamily family, int n, std::uint64_t seed) {
  GeneratorConfig config;
  config.n = n;
  config.marginals = reference_marginals();
  config.spec = preset(family);
  config.truth = reference_estimates(family);
  config.seed = seed;
  return generate(config);
}

ModelSpec asc_only_spec() {
  ModelSpec spec;
  spec.family = ModelFamily::MNL;
  spec.alternatives = {{1, "FRT"}, {2, "ODT"}, {3, "Indifferent"}};
  spec.utilities[1] = {};
  spec.utilities[2] = {{"ASC_ODT", kConstant}};
  spec.utilities[3] = {{"ASC_INDIFF", kConstant}};
  spec.parameters.add("ASC_ODT", 0.0);
  spec.parameters.add("ASC_INDIFF", 0.0);
  return spec;
}

class Parabola : public Objective {
 public:
  int n_free() const override { return 1; }
  double value(const Eigen::VectorXd& x) override {
    return -(x[0] - 3.0) * (x[0] - 3.0);
  }
  double value_and_gradient(const Eigen::VectorXd& x,
                            Eigen::VectorXd& grad) override {
    grad.resize(1);
    grad[0] = -2.0 * (x[0] - 3.0);
    return value(x);
  }
};

// f(x) = sum_o -(x - m_o)^2 / 2: optimum at the mean, H = -n, B = sum of
// squared residuals, so the sandwich has a pencil-and-paper value.
class QuadraticPerObs : public Objective {
 public:
  explicit QuadraticPerObs(std::vector<double> m) : m_(std::move(m)) {}
  int n_free() const override { return 1; }
  double value(const Eigen::VectorXd& x) override {
    double v = 0.0;
    for (double m : m_) v -= 0.5 * (x[0] - m) * (x[0] - m);
    return v;
  }
  double value_and_gradient(const Eigen::VectorXd& x,
                            Eigen::VectorXd& grad) override {
    grad.resize(1);
    grad[0] = 0.0;
    for (double m : m_) grad[0] += m - x[0];
    return value(x);
  }
  Eigen::MatrixXd per_observation_gradient(const Eigen::VectorXd& x) override {
    Eigen::MatrixXd rows(static_cast<int>(m_.size()), 1);
    for (std::size_t o = 0; o < m_.size(); ++o)
      rows(static_cast<int>(o), 0) = m_[o] - x[0];
    return rows;
  }

 private:
  std::vector<double> m_;
};

Eigen::MatrixXd fd_hessian(Objective& objective, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd gp(n), gm(n);
  for (int i = 0; i < n; ++i) {
    const double step = 1e-4 * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    objective.value_and_gradient(xp, gp);
    objective.value_and_gradient(xm, gm);
    h.col(i) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

}  // namespace

TEST_CASE("maximize climbs a concave parabola to its vertex") {
  Parabola objective;
  Eigen::VectorXd start(1);
  start << 0.0;
  const MaximizeStatus status = maximize(objective, start, 1e-8);
  CHECK(status.converged);
  CHECK(status.x[0] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(status.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(status.gradient_norm <= 1e-8);
  CHECK(status.initial_value == doctest::Approx(-9.0).epsilon(1e-12));
  CHECK(status.iterations >= 1);

  SUBCASE("the metric carries the inverse Hessian into a restart") {
    Eigen::MatrixXd metric;
    const MaximizeStatus first = maximize(objective, start, 1e-8, 500, &metric);
    REQUIRE(metric.rows() == 1);
    REQUIRE(metric.cols() == 1);
    CHECK(metric(0, 0) > 0.0);
    const MaximizeStatus again = maximize(objective, first.x, 1e-8, 500, &metric);
    CHECK(again.converged);
    CHECK(again.iterations <= first.iterations);
  }
}

TEST_CASE("robust_covariance reproduces the scalar sandwich") {
  QuadraticPerObs objective({1.0, 2.0, 3.0, 4.0});
  Eigen::VectorXd at(1);
  at << 2.5;  // the optimum: gradient sums to zero
  const Eigen::MatrixXd cov = robust_covariance(objective, at);
  REQUIRE(cov.rows() == 1);
  // H = -4, B = 2.25 + 0.25 + 0.25 + 2.25 = 5, so H^-1 B H^-1 = 5/16.
  CHECK(cov(0, 0) == doctest::Approx(0.3125).epsilon(1e-6));
}

TEST_CASE("rho_square_bar reproduces the published fit indices") {
  CHECK(rho_square_bar(-47.49, -79.1, 11) ==
        doctest::Approx(0.2605563).epsilon(1e-6));
  CHECK(std::round(rho_square_bar(-47.49, -79.1, 11) * 100.0) / 100.0 == 0.26);
  CHECK(std::round(rho_square_bar(-36.47, -79.1, 20) * 1000.0) / 1000.0 == 0.286);
  CHECK(std::round(rho_square_bar(-577.93, -882.69, 41) * 1000.0) / 1000.0 ==
        0.299);
  CHECK(std::round(rho_square_bar(-567.44, -951.43, 50) * 1000.0) / 1000.0 ==
        0.351);
  // A model no better than the null with no parameters explains nothing.
  CHECK(rho_square_bar(-79.1, -79.1, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("estimate fits alternative-specific constants to the exact shares") {
  const Dataset data = counts_dataset(40, 23, 9);
  const ModelSpec spec = asc_only_spec();
  const EstimationResult result = estimate(data, spec);

  CHECK(result.converged);
  CHECK(result.gradient_norm <= 1e-6);
  CHECK(result.n_free == 2);
  CHECK(result.ll_initial ==
        doctest::Approx(72.0 * std::log(1.0 / 3.0)).epsilon(1e-12));
  const double saturated = 40.0 * std::log(40.0 / 72.0) +
                           23.0 * std::log(23.0 / 72.0) +
                           9.0 * std::log(9.0 / 72.0);
  CHECK(result.ll_final == doctest::Approx(saturated).epsilon(1e-9));
  CHECK(result.rho_square_bar ==
        doctest::Approx(rho_square_bar(result.ll_final, result.ll_initial, 2))
            .epsilon(1e-12));

  // Fitted probabilities equal the observed shares.
  Eigen::VectorXd utilities(3);
  utilities << 0.0, result.params.value("ASC_ODT"),
      result.params.value("ASC_INDIFF");
  const Eigen::VectorXd p = mnl_probabilities(utilities);
  CHECK(p[0] == doctest::Approx(40.0 / 72.0).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(23.0 / 72.0).epsilon(1e-6));
  CHECK(p[2] == doctest::Approx(9.0 / 72.0).epsilon(1e-6));

  SUBCASE("significance labels follow the t thresholds") {
    for (const auto& [name, t] : result.robust_t) {
      const double at = std::abs(t);
      const std::string& label = result.significance.at(name);
      if (at >= 1.96) CHECK(label == "95%");
      else if (at >= 1.645) CHECK(label == "90%");
      else CHECK(label == "none");
    }
    CHECK(result.robust_se.size() == 2);
    for (const auto& [name, se] : result.robust_se) CHECK(se > 0.0);
  }
  SUBCASE("covariance can be skipped") {
    EstimateOptions options;
    options.covariance = false;
    const EstimationResult bare = estimate(data, spec, options);
    CHECK(bare.robust_se.empty());
    CHECK(bare.robust_t.empty());
    CHECK(bare.significance.empty());
    CHECK(bare.ll_final == doctest::Approx(result.ll_final).epsilon(1e-12));
  }
  SUBCASE("an exhausted iteration budget is reported, not hidden") {
    EstimateOptions options;
    options.max_iterations = 1;
    options.tol = 1e-12;
    const EstimationResult cut = estimate(counts_dataset(50, 12, 10), spec, options);
    CHECK_FALSE(cut.converged);
    CHECK(cut.ll_final >= cut.ll_initial);  // ascent never loses ground
  }
}

TEST_CASE("doubling the data shrinks standard errors by sqrt(2)") {
  const ModelSpec spec = asc_only_spec();
  const EstimationResult once = estimate(counts_dataset(40, 23, 9), spec);
  const EstimationResult twice = estimate(counts_dataset(80, 46, 18), spec);
  for (const auto& [name, se] : once.robust_se) {
    const double ratio = twice.robust_se.at(name) / se;
    CHECK(ratio * std::sqrt(2.0) == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("sandwich and inverse-Hessian standard errors agree at the truth") {
  // Data generated by the model itself: the information matrix equality makes
  // the two covariance estimates coincide up to sampling noise.
  const ModelSpec spec = preset(ModelFamily::MNL);
  const Dataset data = preset_sample(ModelFamily::MNL, 20000, 17);
  EstimateOptions options;
  // At this scale one ulp of the log-likelihood caps the line search around a
  // gradient norm of 1e-4, so the default 1e-6 target is not reachable.
  options.tol = 2e-4;
  const EstimationResult result = estimate(data, spec, options);
  REQUIRE(result.converged);

  LikelihoodObjective objective(data, spec);
  const Eigen::VectorXd at = result.params.free_values();
  const Eigen::MatrixXd hessian = fd_hessian(objective, at);
  const Eigen::MatrixXd inv = (-hessian).inverse();

  int slot = 0;
  for (const auto& p : result.params.items()) {
    if (p.fixed) continue;
    const double se_h = std::sqrt(inv(slot, slot));
    const double se_s = result.robust_se.at(p.name);
    INFO(p.name);
    CHECK(se_s / se_h == doctest::Approx(1.0).epsilon(0.1));
    ++slot;
  }
}

TEST_CASE("estimate is deterministic run to run") {
  ModelSpec spec = preset(ModelFamily::ICLV);
  spec.n_draws = 80;
  spec.seed = 4;
  const Dataset data = preset_sample(ModelFamily::ICLV, 60, 19);
  EstimateOptions options;
  options.tol = 1e-4;
  options.max_iterations = 400;

  const EstimationResult a = estimate(data, spec, options);
  const EstimationResult b = estimate(data, spec, options);
  CHECK(a.ll_final == b.ll_final);
  CHECK(a.iterations == b.iterations);
  CHECK((a.params.free_values().array() == b.params.free_values().array()).all());
  CHECK(a.robust_se == b.robust_se);
}

TEST_CASE("canonicalize_classes relabels mirrored two-class solutions") {
  ModelSpec spec;
  spec.family = ModelFamily::LC;
  spec.alternatives = {{1, "FRT"}, {2, "ODT"}, {3, "Indifferent"}};
  ClassSpec captive;
  captive.label = "Captive";
  captive.membership = {{"G_CAP", kConstant}, {"G_INCOME", "LowIncome"}};
  captive.utilities[2] = {{"ASC_ODT_C1", kConstant}};
  captive.utilities[3] = {{"ASC_INDIFF_C1", kConstant}};
  ClassSpec rest;
  rest.label = "NonCaptive";
  rest.utilities[2] = {{"ASC_ODT_C2", kConstant}};
  rest.utilities[3] = {{"ASC_INDIFF_C2", kConstant}};
  spec.classes = {captive, rest};
  spec.parameters.add("ASC_ODT_C1", -0.5);
  spec.parameters.add("ASC_INDIFF_C1", -1.0);
  spec.parameters.add("ASC_ODT_C2", 0.8);
  spec.parameters.add("ASC_INDIFF_C2", 0.2);
  spec.parameters.add("G_CAP", 1.0);
  spec.parameters.add("G_INCOME", -30.0);  // pushes LowIncome out of Captive

  Dataset data = counts_dataset(6, 3, 1);
  data.dictionary.push_back({"LowIncome", VarKind::Binary});
  for (auto& obs : data.observations) obs.covariates["LowIncome"] = 1.0;

  EstimationResult result;
  result.params = spec.parameters;
  result.robust_se = {{"ASC_ODT_C1", 0.1}, {"ASC_INDIFF_C1", 0.2},
                      {"ASC_ODT_C2", 0.9}, {"ASC_INDIFF_C2", 0.8},
                      {"G_CAP", 0.3},      {"G_INCOME", 0.4}};
  result.robust_t = {{"ASC_ODT_C1", -5.0}, {"ASC_INDIFF_C1", -5.0},
                     {"ASC_ODT_C2", 0.9},  {"ASC_INDIFF_C2", 0.25},
                     {"G_CAP", 3.3},       {"G_INCOME", -75.0}};

  CHECK(canonicalize_classes(data, spec, result));
  CHECK(result.params.value("ASC_ODT_C1") == 0.8);
  CHECK(result.params.value("ASC_ODT_C2") == -0.5);
  CHECK(result.params.value("ASC_INDIFF_C1") == 0.2);
  CHECK(result.params.value("ASC_INDIFF_C2") == -1.0);
  CHECK(result.robust_se.at("ASC_ODT_C1") == 0.9);
  CHECK(result.robust_se.at("ASC_ODT_C2") == 0.1);
  CHECK(result.robust_t.at("ASC_ODT_C1") == 0.9);
  // Membership coefficients flip sign, and so do their t statistics.
  CHECK(result.params.value("G_CAP") == -1.0);
  CHECK(result.params.value("G_INCOME") == 30.0);
  CHECK(result.robust_t.at("G_INCOME") == 75.0);
  CHECK(result.robust_se.at("G_INCOME") == 0.4);
  REQUIRE(result.notes.size() == 1);

  SUBCASE("a second pass finds the labeling already canonical") {
    CHECK_FALSE(canonicalize_classes(data, spec, result));
    CHECK(result.params.value("ASC_ODT_C1") == 0.8);
  }
  SUBCASE("structurally different classes are never swapped") {
    const ModelSpec asymmetric = preset(ModelFamily::LC);
    EstimationResult ref;
    ref.params = reference_estimates(ModelFamily::LC);
    ref.params.set_value("G_CAP", 10.6);      // mirrored signs would demand a
    ref.params.set_value("G_INCOME", -24.1);  // swap if pairing were possible
    ref.params.set_value("G_MODE", -21.6);
    CHECK_FALSE(canonicalize_classes(data, asymmetric, ref));
    CHECK(ref.params.value("G_CAP") == 10.6);
  }
}

TEST_CASE("seed_latent_starts moves free measurement parameters to data moments") {
  ModelSpec spec = preset(ModelFamily::ICLV);
  const Dataset data = preset_sample(ModelFamily::ICLV, 300, 23);
  seed_latent_starts(data, spec);

  std::vector<double> values;
  std::vector<unsigned char> present;
  auto moments = [&](const std::string& indicator) {
    data.column(indicator, values, present);
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!present[i]) continue;
      sum += values[i];
      sum2 += values[i] * values[i];
      ++n;
    }
    const double mean = sum / n;
    return std::pair<double, double>(mean, std::sqrt(sum2 / n - mean * mean));
  };

  const auto [relia_mean, relia_sd] = moments("RELIA_IMPO");
  CHECK(spec.parameters.value("A_RELIA_IMPO") ==
        doctest::Approx(relia_mean).epsilon(1e-12));
  CHECK(spec.parameters.value("S_RELIA_IMPO") ==
        doctest::Approx(std::max(relia_sd, 0.5)).epsilon(1e-12));
  CHECK(spec.parameters.value("B_RELIA_IMPO") == 0.0);  // loadings keep starts

  // Anchor equations are fixed and untouched.
  CHECK(spec.parameters.value("A_WAIT_IMPO") == 0.0);
  CHECK(spec.parameters.value("B_WAIT_IMPO") == 1.0);
  CHECK(spec.parameters.value("S_WAIT_IMPO") == 1.0);

  // Structural constants start at the anchor indicator means.
  const auto [wait_mean, wait_sd] = moments("WAIT_IMPO");
  const auto [app_mean, app_sd] = moments("APP_INTER");
  (void)wait_sd;
  (void)app_sd;
  CHECK(spec.parameters.value("A_CONS_TS") ==
        doctest::Approx(wait_mean).epsilon(1e-12));
  CHECK(spec.parameters.value("A_CONS_OSS") ==
        doctest::Approx(app_mean).epsilon(1e-12));
  // Declared nonzero disturbance scales stay put.
  CHECK(spec.parameters.value("S_TS") == 1.0);
}

TEST_CASE("warm_start_pipeline runs the requested prefix of the chain") {
  const Dataset data = preset_sample(ModelFamily::LC, 72, 21);
  const std::vector<ModelSpec> presets = {
      preset(ModelFamily::MNL), preset(ModelFamily::LC),
      preset(ModelFamily::ICLV), preset(ModelFamily::LC_ICLV)};

  const PipelineResult out =
      warm_start_pipeline(data, presets, {}, ModelFamily::LC);
  REQUIRE(out.families.size() == 2);
  CHECK(out.families[0] == ModelFamily::MNL);
  CHECK(out.families[1] == ModelFamily::LC);
  REQUIRE(out.results.size() == 2);
  REQUIRE(out.provenance.size() == 2);
  CHECK(out.provenance[0].find("MNL") != std::string::npos);
  CHECK(out.provenance[1].find("seeded from MNL") != std::string::npos);

  for (const auto& result : out.results)
    CHECK(result.ll_final >= result.ll_initial - 1e-9);
  // The latent-class mixture nests the MNL solution it was seeded from.
  CHECK(out.for_family(ModelFamily::LC).ll_final >=
        out.for_family(ModelFamily::MNL).ll_final - 1e-6);
  CHECK_THROWS_AS(out.for_family(ModelFamily::ICLV), SpecError);

  SUBCASE("the pipeline is deterministic") {
    const PipelineResult rerun =
        warm_start_pipeline(data, presets, {}, ModelFamily::LC);
    CHECK(rerun.for_family(ModelFamily::MNL).ll_final ==
          out.for_family(ModelFamily::MNL).ll_final);
    CHECK(rerun.for_family(ModelFamily::LC).ll_final ==
          out.for_family(ModelFamily::LC).ll_final);
  }
}
