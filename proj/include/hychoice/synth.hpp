#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "hychoice/dataset.hpp"
#include "hychoice/likelihood.hpp"
#include "hychoice/modelspec.hpp"
#include "hychoice/presets.hpp"

namespace hychoice {

// Population recipe: covariate marginals plus a model evaluated at `truth`.
// Groups are exclusive; per individual at most one dummy of a group is 1 and
// the residual probability selects the all-zero reference level.
struct GeneratorConfig {
  int n = 0;
  std::vector<MarginalGroup> marginals;
  ModelSpec spec;
  ParameterVector truth;
  std::uint64_t seed = 1;
};

struct GenerationReport {
  std::int64_t indicator_draws = 0;
  std::int64_t clamped = 0;       // rounded indicator fell outside 1..5
  double clamp_fraction = 0.0;
};

// Draws a full dataset from the model at `truth`. Per individual the RNG
// stream is consumed in a fixed order: one uniform per marginal group, one
// standard normal per latent variable (structural disturbance), one per
// indicator (measurement noise), one uniform for the class when the spec has
// classes, and one uniform for the choice. Indicators are drawn continuous,
// rounded half away from zero, and clamped to the 1..5 response scale; the
// clamp share lands in `report`. Deterministic given seed.
Dataset generate(const GeneratorConfig& config, GenerationReport* report = nullptr);

// Gauss-Hermite rule mapped to a standard normal: E[f(Z)] ~ sum w_i f(z_i),
// weights positive and summing to 1. Nodes come from the Golub-Welsch
// eigendecomposition of the Jacobi matrix, so the rule is exact for
// polynomials up to degree 2n-1.
struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussHermite gauss_hermite(int n);

// Deterministic quadrature replacement for the simulated likelihood: the draw
// average over the latent disturbances becomes a tensor-product Gauss-Hermite
// sum with `nodes` points per dimension (at most 64, at most 2 latent
// variables). Oracle for validating the simulation estimator.
LikelihoodValue quadrature_loglik(const Dataset& data, const ModelSpec& spec,
                                  const ParameterVector& params, int nodes);

}  // namespace hychoice
