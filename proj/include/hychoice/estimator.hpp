#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hychoice/dataset.hpp"
#include "hychoice/likelihood.hpp"
#include "hychoice/modelspec.hpp"

namespace hychoice {

// Deterministic objective to maximize over a free-parameter vector.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual int n_free() const = 0;
  virtual double value(const Eigen::VectorXd& x) = 0;
  virtual double value_and_gradient(const Eigen::VectorXd& x,
                                    Eigen::VectorXd& grad) = 0;
  // Per-observation gradient rows for the sandwich outer product. Objectives
  // without observation structure return their total gradient as one row.
  virtual Eigen::MatrixXd per_observation_gradient(const Eigen::VectorXd& x);
};

struct MaximizeStatus {
  Eigen::VectorXd x;
  double value = 0.0;
  double initial_value = 0.0;
  Eigen::VectorXd gradient;
  double gradient_norm = 0.0;  // max-norm at exit
  int iterations = 0;
  bool converged = false;
};

// BFGS ascent with a strong-Wolfe line search (cubic interpolation, non-finite
// trial values shrink the step). Stops when the gradient max-norm drops below
// tol or after max_iterations accepted steps; a stalled line search ends the
// run with converged reflecting the last gradient. `metric` carries the
// inverse-Hessian approximation between related runs: when it holds a matrix
// of the right size it seeds the first iterations, and on exit it is replaced
// by the final approximation.
MaximizeStatus maximize(Objective& objective, const Eigen::VectorXd& start,
                        double tol = 1e-6, int max_iterations = 500,
                        Eigen::MatrixXd* metric = nullptr);

// Sandwich covariance H^-1 B H^-1: H is a central-difference Hessian of the
// analytic gradient (h = 1e-4 relative), B the sum of per-observation
// gradient outer products. Singular H falls back to a pseudo-inverse and
// sets *warning.
Eigen::MatrixXd robust_covariance(Objective& objective,
                                  const Eigen::VectorXd& at,
                                  bool* warning = nullptr);

double rho_square_bar(double ll_final, double ll_initial, int k);

// Log-likelihood objective over the free parameters of a compiled model.
class LikelihoodObjective : public Objective {
 public:
  LikelihoodObjective(const Dataset& data, const ModelSpec& spec,
                      const DrawSet* draws = nullptr, int threads = 1);

  int n_free() const override { return model_.n_free(); }
  double value(const Eigen::VectorXd& x) override;
  double value_and_gradient(const Eigen::VectorXd& x,
                            Eigen::VectorXd& grad) override;
  Eigen::MatrixXd per_observation_gradient(const Eigen::VectorXd& x) override;
  void set_draws(const DrawSet* draws) { draws_ = draws; }
  const CompiledModel& model() const { return model_; }

 private:
  CompiledModel model_;
  ParameterVector params_;
  const DrawSet* draws_;
  int threads_;
};

struct EstimationResult {
  ParameterVector params;
  std::map<std::string, double> robust_se;
  std::map<std::string, double> robust_t;
  std::map<std::string, std::string> significance;  // "95%", "90%", "none"
  double ll_initial = 0.0;
  double ll_final = 0.0;
  double rho_square_bar = 0.0;
  int n_free = 0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  bool covariance_warning = false;
  std::vector<std::string> notes;
};

struct EstimateOptions {
  double tol = 1e-6;
  int max_iterations = 500;
  int threads = 1;
  // Two-stage simulation schedule for latent families: optimize first on a
  // smaller draw set, then refine on the full one. 0 disables the stage.
  int coarse_draws = 0;
  double coarse_tol = 5e-2;
  std::uint64_t jitter_seed = 1;  // class symmetry breaking in the pipeline
  bool covariance = true;
};

// Single estimation run from the spec's start values. Draws are generated
// from (spec.n_draws, spec.seed) when the family needs them. ll_initial is
// evaluated at the start values on the final draw set.
EstimationResult estimate(const Dataset& data, const ModelSpec& spec,
                          const EstimateOptions& options = {});

// Data-moment starting values for measurement and structural parameters:
// free intercepts move to the indicator means, free scales to the indicator
// standard deviations (at least 0.5), and each latent's structural constant
// to its anchor indicator's mean. Loadings keep their declared starts.
void seed_latent_starts(const Dataset& data, ModelSpec& spec);

// Stabilizes class labeling for two-class specs whose classes are structural
// mirrors: if the class labeled Captive does not have the larger average
// membership probability among LowIncome observations, class parameter
// values (and their statistics) are swapped pairwise and the membership
// coefficients negated. Returns true when a swap happened.
bool canonicalize_classes(const Dataset& data, const ModelSpec& spec,
                          EstimationResult& result);

struct PipelineResult {
  std::vector<ModelFamily> families;      // stages run, in MNL..LC-ICLV order
  std::vector<EstimationResult> results;  // one entry per stage
  std::vector<std::string> provenance;    // one line per seeding step
  const EstimationResult& for_family(ModelFamily family) const;
};

// Estimates the families in order, seeding each stage from the previous ones:
// LC copies MNL estimates into both classes with seeded +-0.1 jitter; ICLV
// copies MNL choice parameters and data-moment measurement starts; LC-ICLV
// combines the LC and ICLV solutions. `through` trims the chain to the stages
// the requested family needs (the default runs all four). Non-converged
// stages still seed later ones and are flagged in the provenance. `presets`
// always lists the four specs in family order.
PipelineResult warm_start_pipeline(const Dataset& data,
                                   const std::vector<ModelSpec>& presets,
                                   const EstimateOptions& options = {},
                                   ModelFamily through = ModelFamily::LC_ICLV);

}  // namespace hychoice
