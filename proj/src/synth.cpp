#include "hychoice/synth.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <string>

#include "hychoice/draws.hpp"
#include "hychoice/errors.hpp"

namespace hychoice {

namespace {

void check_config(const GeneratorConfig& config) {
  if (config.n <= 0) throw DomainError("population size must be positive");
  for (const auto& group : config.marginals) {
    if (group.names.size() != group.probs.size())
      throw DomainError("marginal group lists " +
                        std::to_string(group.names.size()) + " names but " +
                        std::to_string(group.probs.size()) + " probabilities");
    double sum = 0.0;
    for (std::size_t i = 0; i < group.probs.size(); ++i) {
      if (!(group.probs[i] >= 0.0 && group.probs[i] <= 1.0))
        throw DomainError("marginal probability of '" + group.names[i] +
                          "' is outside [0,1]");
      sum += group.probs[i];
    }
    if (sum > 1.0 + 1e-9)
      throw DomainError("exclusive marginal group starting at '" +
                        (group.names.empty() ? std::string("?") : group.names[0]) +
                        "' has probabilities summing past 1");
  }
}

}  // namespace

Dataset generate(const GeneratorConfig& config, GenerationReport* report) {
  check_config(config);
  const ModelSpec& spec = config.spec;
  const ParameterVector& truth = config.truth;

  std::mt19937_64 rng(config.seed);
  auto uniform = [&rng] { return ((rng() >> 11) + 0.5) * 0x1p-53; };
  auto normal = [&] { return inverse_normal_cdf(uniform()); };

  Dataset data;
  data.alternatives = spec.alternatives;
  for (const auto& group : config.marginals)
    for (const auto& name : group.names)
      data.dictionary.push_back({name, VarKind::Binary});
  for (const auto& lv : spec.latent_variables)
    for (const auto& eq : lv.measurements)
      data.dictionary.push_back({eq.indicator, VarKind::Likert});

  const bool classed = !spec.classes.empty();
  std::int64_t indicator_draws = 0;
  std::int64_t clamped = 0;
  data.observations.reserve(config.n);

  for (int i = 0; i < config.n; ++i) {
    Observation obs;
    obs.id = "synth-" + std::to_string(i + 1);

    for (const auto& group : config.marginals) {
      const double u = uniform();
      double cum = 0.0;
      std::size_t hit = group.names.size();
      for (std::size_t k = 0; k < group.names.size(); ++k) {
        cum += group.probs[k];
        if (u < cum && hit == group.names.size()) hit = k;
      }
      for (std::size_t k = 0; k < group.names.size(); ++k)
        obs.covariates[group.names[k]] = k == hit ? 1.0 : 0.0;
    }

    std::map<std::string, double> lv_values;
    for (const auto& lv : spec.latent_variables)
      lv_values[lv.name] = structural_value(obs, lv, truth, normal());

    for (const auto& lv : spec.latent_variables) {
      for (const auto& eq : lv.measurements) {
        const double mean = truth.value(eq.intercept) +
                            truth.value(eq.loading) * lv_values[lv.name];
        const double draw = mean + std::abs(truth.value(eq.scale)) * normal();
        long level = std::lround(draw);
        ++indicator_draws;
        if (level < 1 || level > 5) {
          level = level < 1 ? 1 : 5;
          ++clamped;
        }
        obs.indicators[eq.indicator] = static_cast<double>(level);
      }
    }

    const auto* utilities = &spec.utilities;
    if (classed) {
      const Eigen::VectorXd pi = membership_probabilities(obs, spec.classes, truth);
      const double u = uniform();
      double cum = 0.0;
      std::size_t cls = spec.classes.size() - 1;
      for (std::size_t c = 0; c + 1 < spec.classes.size(); ++c) {
        cum += pi[static_cast<int>(c)];
        if (u < cum) {
          cls = c;
          break;
        }
      }
      obs.labels["class"] = spec.classes[cls].label;
      utilities = &spec.classes[cls].utilities;
    }

    Eigen::VectorXd v(spec.alternatives.size());
    for (std::size_t j = 0; j < spec.alternatives.size(); ++j) {
      const auto found = utilities->find(spec.alternatives[j].index);
      v[static_cast<int>(j)] =
          found == utilities->end()
              ? 0.0
              : systematic_utility(obs, found->second, truth, lv_values);
    }
    const Eigen::VectorXd p = mnl_probabilities(v);
    const double uc = uniform();
    double cum = 0.0;
    std::size_t pick = spec.alternatives.size() - 1;
    for (std::size_t j = 0; j + 1 < spec.alternatives.size(); ++j) {
      cum += p[static_cast<int>(j)];
      if (uc < cum) {
        pick = j;
        break;
      }
    }
    obs.choice = spec.alternatives[pick].index;

    data.observations.push_back(std::move(obs));
  }

  if (report) {
    report->indicator_draws = indicator_draws;
    report->clamped = clamped;
    report->clamp_fraction =
        indicator_draws == 0
            ? 0.0
            : static_cast<double>(clamped) / static_cast<double>(indicator_draws);
  }
  return data;
}

GaussHermite gauss_hermite(int n) {
  if (n < 1 || n > 64)
    throw DomainError("Gauss-Hermite nodes per dimension must be in 1..64");
  GaussHermite rule;
  if (n == 1) {
    rule.nodes = Eigen::VectorXd::Zero(1);
    rule.weights = Eigen::VectorXd::Ones(1);
    return rule;
  }
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(jacobi);
  rule.nodes = std::sqrt(2.0) * solve.eigenvalues();
  // first eigenvector components squared: normalized weights, exact sum 1
  rule.weights = solve.eigenvectors().row(0).transpose().array().square();
  return rule;
}

LikelihoodValue quadrature_loglik(const Dataset& data, const ModelSpec& spec,
                                  const ParameterVector& params, int nodes) {
  const int dims = static_cast<int>(spec.latent_variables.size());
  if (dims < 1 || dims > 2)
    throw DomainError("unsupported dimension: quadrature covers 1 or 2 latent "
                      "variables, spec declares " + std::to_string(dims));
  const GaussHermite rule = gauss_hermite(nodes);

  const int total = dims == 1 ? nodes : nodes * nodes;
  DrawSet set;
  set.n_obs = static_cast<int>(data.size());
  set.n_draws = total;
  set.dims = dims;
  set.shared_nodes = true;
  set.values.assign(dims, Eigen::MatrixXd(total, 1));
  set.log_weights.resize(total);
  int r = 0;
  for (int i = 0; i < nodes; ++i) {
    if (dims == 1) {
      set.values[0](i, 0) = rule.nodes[i];
      set.log_weights[i] = std::log(rule.weights[i]);
    } else {
      for (int j = 0; j < nodes; ++j, ++r) {
        set.values[0](r, 0) = rule.nodes[i];
        set.values[1](r, 0) = rule.nodes[j];
        set.log_weights[r] = std::log(rule.weights[i]) + std::log(rule.weights[j]);
      }
    }
  }

  CompiledModel model(data, spec);
  return model.value(params, &set);
}

}  // namespace hychoice
