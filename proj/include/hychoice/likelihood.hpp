#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "hychoice/dataset.hpp"
#include "hychoice/draws.hpp"
#include "hychoice/modelspec.hpp"

namespace hychoice {

struct LikelihoodValue {
  double total = 0.0;
  Eigen::VectorXd per_observation;
};

// Gradient over free parameters, in free_indices() order. The per-observation
// rows feed the outer-product block of the sandwich covariance.
struct LikelihoodGradient {
  double total = 0.0;
  Eigen::VectorXd per_observation;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd per_obs_gradient;  // n_obs x n_free
};

// V = sum of parameter * variable over terms; CONSTANT reads as 1 and latent
// names are resolved from lv_values.
double systematic_utility(const Observation& obs,
                          const std::vector<UtilityTerm>& terms,
                          const ParameterVector& params,
                          const std::map<std::string, double>& lv_values = {});

// Softmax with max-subtraction; sums to 1, safe for large utilities.
Eigen::VectorXd mnl_probabilities(const Eigen::VectorXd& utilities);

// Class probabilities; the reference class (empty membership) has utility 0.
Eigen::VectorXd membership_probabilities(const Observation& obs,
                                         const std::vector<ClassSpec>& classes,
                                         const ParameterVector& params);

// Structural equation value: systematic part + |scale| * omega.
double structural_value(const Observation& obs, const LatentVariableSpec& lv,
                        const ParameterVector& params, double omega);

// Sum of log normal densities of the present indicators given latent values;
// absent indicators contribute 0. Scales enter through absolute value.
double measurement_loglik(const Observation& obs,
                          const std::map<std::string, double>& lv_values,
                          const std::vector<LatentVariableSpec>& latents,
                          const ParameterVector& params);

// Name-resolved evaluator for one (dataset, spec) pair. Construction resolves
// every variable, indicator, and parameter reference once; evaluation is then
// allocation-light and can fan observations out over threads. Per-observation
// results are written independently and reduced in observation order, so
// totals are bit-identical for any thread count.
class CompiledModel {
 public:
  CompiledModel(const Dataset& data, const ModelSpec& spec);

  int n_obs() const { return static_cast<int>(choice_pos_.size()); }
  int n_alternatives() const { return n_alts_; }
  int n_params() const { return n_params_; }
  int n_free() const { return static_cast<int>(free_index_.size()); }
  int latent_dims() const { return static_cast<int>(latents_.size()); }
  bool needs_draws() const { return !latents_.empty(); }
  ModelFamily family() const { return family_; }

  // draws are required iff the spec has latent variables.
  LikelihoodValue value(const ParameterVector& params,
                        const DrawSet* draws = nullptr, int threads = 1) const;
  LikelihoodGradient value_and_gradient(const ParameterVector& params,
                                        const DrawSet* draws = nullptr,
                                        int threads = 1) const;

 private:
  struct Term {
    int param;
    int var;  // column of X; -1 means CONSTANT
  };
  struct Alt {
    std::vector<Term> cov;
    std::vector<std::pair<int, int>> lat;  // (param, latent index)
  };
  struct Class {
    std::vector<Term> membership;  // empty marks the reference class
    std::vector<Alt> alts;
  };
  struct Meas {
    int indicator;  // column of ind_values_
    int a, b, s;    // parameter indices
  };
  struct Latent {
    std::vector<Term> structural;
    int scale;
    std::vector<Meas> meas;
  };
  struct Scratch;

  int var_column(const Dataset& data, const std::string& name);
  std::vector<Term> compile_terms(const Dataset& data, const ModelSpec& spec,
                                  const std::vector<UtilityTerm>& terms,
                                  Alt* alt);
  void check_and_run(const ParameterVector& params, const DrawSet* draws,
                     int threads, bool want_gradient, Eigen::VectorXd& per_obs,
                     Eigen::MatrixXd* per_obs_grad) const;
  void eval_range(const Eigen::VectorXd& pv, const DrawSet* draws, int begin,
                  int end, bool want_gradient, Eigen::VectorXd& per_obs,
                  Eigen::MatrixXd* per_obs_grad, Scratch& scratch) const;
  void eval_exact_obs(const Eigen::VectorXd& pv, int o, bool want_gradient,
                      Eigen::VectorXd& per_obs, Eigen::MatrixXd* per_obs_grad,
                      Scratch& scratch) const;
  void eval_draws_obs(const Eigen::VectorXd& pv, const DrawSet* draws, int o,
                      bool want_gradient, Eigen::VectorXd& per_obs,
                      Eigen::MatrixXd* per_obs_grad, Scratch& scratch) const;

  ModelFamily family_ = ModelFamily::MNL;
  int n_alts_ = 0;
  int n_params_ = 0;
  Eigen::MatrixXd X_;                    // n_obs x referenced variables
  Eigen::MatrixXd ind_values_;           // n_obs x referenced indicators
  Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> ind_present_;
  Eigen::VectorXi choice_pos_;
  std::vector<Class> classes_;  // single pooled class for MNL / ICLV
  std::vector<Latent> latents_;
  std::vector<int> free_index_;          // free slot -> parameter index
  std::vector<int> free_slot_;           // parameter index -> slot or -1
  std::vector<std::string> names_;       // parameter names, for diagnostics
  std::map<std::string, int> var_index_;
  std::map<std::string, int> ind_index_;
};

// Family-checked entry points.
LikelihoodValue mnl_loglik(const Dataset& data, const ModelSpec& spec,
                           const ParameterVector& params);
LikelihoodValue lc_loglik(const Dataset& data, const ModelSpec& spec,
                          const ParameterVector& params);
LikelihoodValue iclv_simulated_loglik(const Dataset& data,
                                      const ModelSpec& spec,
                                      const ParameterVector& params,
                                      const DrawSet& draws);
LikelihoodValue lc_iclv_simulated_loglik(const Dataset& data,
                                         const ModelSpec& spec,
                                         const ParameterVector& params,
                                         const DrawSet& draws);

// Dispatch on spec.family; draws may be null for MNL / LC.
LikelihoodValue loglik(const Dataset& data, const ModelSpec& spec,
                       const ParameterVector& params,
                       const DrawSet* draws = nullptr);

// Analytic gradient of the (fixed-draw) log-likelihood; throws DomainError
// when the result is non-finite.
LikelihoodGradient loglik_gradient(const Dataset& data, const ModelSpec& spec,
                                   const ParameterVector& params,
                                   const DrawSet* draws = nullptr);

}  // namespace hychoice
