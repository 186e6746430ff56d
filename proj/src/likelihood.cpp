#include "hychoice/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hychoice/errors.hpp"

namespace hychoice {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double term_value(const Observation& obs, const UtilityTerm& term,
                  const std::map<std::string, double>& lv_values) {
  if (term.variable == kConstant) return 1.0;
  if (auto it = lv_values.find(term.variable); it != lv_values.end())
    return it->second;
  if (auto it = obs.covariates.find(term.variable); it != obs.covariates.end())
    return it->second;
  throw SpecError("unresolvable variable '" + term.variable + "' in utility term");
}

double lse(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

double systematic_utility(const Observation& obs,
                          const std::vector<UtilityTerm>& terms,
                          const ParameterVector& params,
                          const std::map<std::string, double>& lv_values) {
  double v = 0.0;
  for (const auto& term : terms)
    v += params.value(term.parameter) * term_value(obs, term, lv_values);
  return v;
}

Eigen::VectorXd mnl_probabilities(const Eigen::VectorXd& utilities) {
  if (!utilities.allFinite())
    throw DomainError("mnl_probabilities: non-finite utility");
  const double m = utilities.maxCoeff();
  Eigen::VectorXd p = (utilities.array() - m).exp();
  return p / p.sum();
}

Eigen::VectorXd membership_probabilities(const Observation& obs,
                                         const std::vector<ClassSpec>& classes,
                                         const ParameterVector& params) {
  Eigen::VectorXd u(static_cast<int>(classes.size()));
  for (std::size_t c = 0; c < classes.size(); ++c)
    u[static_cast<int>(c)] =
        systematic_utility(obs, classes[c].membership, params);
  return mnl_probabilities(u);
}

double structural_value(const Observation& obs, const LatentVariableSpec& lv,
                        const ParameterVector& params, double omega) {
  return systematic_utility(obs, lv.structural, params) +
         std::abs(params.value(lv.error_scale)) * omega;
}

double measurement_loglik(const Observation& obs,
                          const std::map<std::string, double>& lv_values,
                          const std::vector<LatentVariableSpec>& latents,
                          const ParameterVector& params) {
  double total = 0.0;
  for (const auto& lv : latents) {
    const double value = lv_values.at(lv.name);
    for (const auto& eq : lv.measurements) {
      const auto it = obs.indicators.find(eq.indicator);
      if (it == obs.indicators.end()) continue;
      const double sd = params.value(eq.scale);
      if (sd == 0.0)
        throw DomainError("measurement scale '" + eq.scale + "' is zero");
      const double mu = params.value(eq.intercept) + params.value(eq.loading) * value;
      const double z = (it->second - mu) / std::abs(sd);
      total += -0.5 * kLog2Pi - std::log(std::abs(sd)) - 0.5 * z * z;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// CompiledModel

struct CompiledModel::Scratch {
  std::vector<Eigen::ArrayXd> lv, e, V, P, logden, ac, wc, dlv;
  Eigen::ArrayXd mll, logf, logmix, q, mx, acc;
  Eigen::VectorXd g_full;
  // exact-path scalars
  std::vector<double> sV, sP, sLogP, sw, spi;

  void ensure(int R, int C, int J, int L, int n_meas, int n_params) {
    auto fit = [R](std::vector<Eigen::ArrayXd>& arrs, int count) {
      arrs.resize(count);
      for (auto& a : arrs)
        if (a.size() != R) a.resize(R);
    };
    fit(lv, L);
    fit(e, n_meas);
    fit(V, C * J);
    fit(P, C * J);
    fit(logden, C);
    fit(ac, C);
    fit(wc, C);
    fit(dlv, L);
    if (mll.size() != R) {
      mll.resize(R);
      logf.resize(R);
      logmix.resize(R);
      q.resize(R);
      mx.resize(R);
      acc.resize(R);
    }
    if (C == 1) wc[0].setOnes();
    g_full.resize(n_params);
    sV.resize(C * J);
    sP.resize(C * J);
    sLogP.resize(C);
    sw.resize(C);
    spi.resize(C);
  }
};

int CompiledModel::var_column(const Dataset& data, const std::string& name) {
  auto it = var_index_.find(name);
  if (it != var_index_.end()) return it->second;
  data.column(name);  // throws for unknown or incomplete columns
  const int col = static_cast<int>(var_index_.size());
  var_index_.emplace(name, col);
  return col;
}

std::vector<CompiledModel::Term> CompiledModel::compile_terms(
    const Dataset& data, const ModelSpec& spec,
    const std::vector<UtilityTerm>& terms, Alt* alt) {
  std::vector<Term> cov;
  for (const auto& term : terms) {
    const int param = spec.parameters.index_of(term.parameter);
    if (param < 0)
      throw SpecError("unknown parameter '" + term.parameter + "'");
    if (term.variable == kConstant) {
      cov.push_back({param, -1});
      continue;
    }
    if (spec.has_latent(term.variable)) {
      if (!alt)
        throw SpecError("latent variable '" + term.variable +
                        "' outside a utility function");
      int lat = 0;
      while (spec.latent_variables[lat].name != term.variable) ++lat;
      alt->lat.emplace_back(param, lat);
      continue;
    }
    cov.push_back({param, var_column(data, term.variable)});
  }
  return cov;
}

CompiledModel::CompiledModel(const Dataset& data, const ModelSpec& spec) {
  family_ = spec.family;
  n_alts_ = static_cast<int>(spec.alternatives.size());
  n_params_ = static_cast<int>(spec.parameters.size());
  if (n_alts_ < 2) throw SpecError("model needs at least two alternatives");

  free_slot_.assign(n_params_, -1);
  for (int i = 0; i < n_params_; ++i) {
    if (spec.parameters[i].fixed) continue;
    free_slot_[i] = static_cast<int>(free_index_.size());
    free_index_.push_back(i);
  }

  std::map<int, int> alt_pos;
  for (int j = 0; j < n_alts_; ++j)
    alt_pos[spec.alternatives[j].index] = j;

  const int n = static_cast<int>(data.size());
  choice_pos_.resize(n);
  for (int o = 0; o < n; ++o) {
    const auto it = alt_pos.find(data.observations[o].choice);
    if (it == alt_pos.end())
      throw SpecError("observation '" + data.observations[o].id +
                      "' has no valid choice");
    choice_pos_[o] = it->second;
  }

  auto compile_class = [&](const std::vector<UtilityTerm>& membership,
                           const std::map<int, std::vector<UtilityTerm>>& utils) {
    Class cls;
    cls.membership = compile_terms(data, spec, membership, nullptr);
    cls.alts.resize(n_alts_);
    for (const auto& [alt_index, terms] : utils) {
      const auto it = alt_pos.find(alt_index);
      if (it == alt_pos.end())
        throw SpecError("utility for unknown alternative " +
                        std::to_string(alt_index));
      Alt& alt = cls.alts[it->second];
      alt.cov = compile_terms(data, spec, terms, &alt);
    }
    return cls;
  };

  if (spec.classes.empty()) {
    classes_.push_back(compile_class({}, spec.utilities));
  } else {
    for (const auto& cls : spec.classes)
      classes_.push_back(compile_class(cls.membership, cls.utilities));
  }

  for (const auto& lv : spec.latent_variables) {
    Latent lat;
    lat.structural = compile_terms(data, spec, lv.structural, nullptr);
    lat.scale = spec.parameters.index_of(lv.error_scale);
    if (lat.scale < 0)
      throw SpecError("unknown parameter '" + lv.error_scale + "'");
    for (const auto& eq : lv.measurements) {
      Meas m;
      auto it = ind_index_.find(eq.indicator);
      if (it == ind_index_.end())
        it = ind_index_.emplace(eq.indicator, static_cast<int>(ind_index_.size()))
                 .first;
      m.indicator = it->second;
      m.a = spec.parameters.index_of(eq.intercept);
      m.b = spec.parameters.index_of(eq.loading);
      m.s = spec.parameters.index_of(eq.scale);
      if (m.a < 0 || m.b < 0 || m.s < 0)
        throw SpecError("unknown measurement parameter for indicator '" +
                        eq.indicator + "'");
      lat.meas.push_back(m);
    }
    latents_.push_back(std::move(lat));
  }

  X_.resize(n, static_cast<int>(var_index_.size()));
  for (const auto& [name, col] : var_index_) {
    const std::vector<double> values = data.column(name);
    for (int o = 0; o < n; ++o) X_(o, col) = values[o];
  }

  ind_values_.resize(n, static_cast<int>(ind_index_.size()));
  ind_present_.resize(n, static_cast<int>(ind_index_.size()));
  std::vector<double> values;
  std::vector<unsigned char> present;
  for (const auto& [name, col] : ind_index_) {
    data.column(name, values, present);
    for (int o = 0; o < n; ++o) {
      ind_values_(o, col) = present[o] ? values[o] : 0.0;
      ind_present_(o, col) = present[o];
    }
  }

  names_.reserve(n_params_);
  for (int i = 0; i < n_params_; ++i) names_.push_back(spec.parameters[i].name);
}

void CompiledModel::eval_exact_obs(const Eigen::VectorXd& pv, int o,
                                   bool want_gradient,
                                   Eigen::VectorXd& per_obs,
                                   Eigen::MatrixXd* per_obs_grad,
                                   Scratch& s) const {
  const int C = static_cast<int>(classes_.size());
  const int J = n_alts_;
  const int ch = choice_pos_[o];

  auto term_sum = [&](const std::vector<Term>& terms) {
    double v = 0.0;
    for (const Term& t : terms)
      v += pv[t.param] * (t.var < 0 ? 1.0 : X_(o, t.var));
    return v;
  };

  // class probabilities
  double max_m = 0.0;
  for (int c = 0; c < C; ++c) {
    s.sw[c] = term_sum(classes_[c].membership);  // membership utility for now
    max_m = c == 0 ? s.sw[c] : std::max(max_m, s.sw[c]);
  }
  double denom_m = 0.0;
  for (int c = 0; c < C; ++c) denom_m += std::exp(s.sw[c] - max_m);
  const double log_denom_m = max_m + std::log(denom_m);
  for (int c = 0; c < C; ++c) s.spi[c] = std::exp(s.sw[c] - log_denom_m);

  // per-class choice log-probabilities
  for (int c = 0; c < C; ++c) {
    double vmax = 0.0;
    for (int j = 0; j < J; ++j) {
      s.sV[c * J + j] = term_sum(classes_[c].alts[j].cov);
      vmax = j == 0 ? s.sV[c * J + j] : std::max(vmax, s.sV[c * J + j]);
    }
    double den = 0.0;
    for (int j = 0; j < J; ++j) den += std::exp(s.sV[c * J + j] - vmax);
    const double logden = vmax + std::log(den);
    s.sLogP[c] = s.sV[c * J + ch] - logden;
    if (want_gradient)
      for (int j = 0; j < J; ++j)
        s.sP[c * J + j] = std::exp(s.sV[c * J + j] - logden);
  }

  double amax = 0.0;
  for (int c = 0; c < C; ++c) {
    s.sw[c] = (s.sw[c] - log_denom_m) + s.sLogP[c];  // log pi_c + log P_c
    amax = c == 0 ? s.sw[c] : std::max(amax, s.sw[c]);
  }
  double fsum = 0.0;
  for (int c = 0; c < C; ++c) fsum += std::exp(s.sw[c] - amax);
  const double logf = amax + std::log(fsum);
  per_obs[o] = logf;
  if (!want_gradient) return;

  s.g_full.setZero();
  for (int c = 0; c < C; ++c) {
    const double w = std::exp(s.sw[c] - logf);  // class posterior
    for (int j = 0; j < J; ++j) {
      const double resid = (j == ch ? 1.0 : 0.0) - s.sP[c * J + j];
      for (const Term& t : classes_[c].alts[j].cov)
        s.g_full[t.param] += w * resid * (t.var < 0 ? 1.0 : X_(o, t.var));
    }
    const double dm = w - s.spi[c];
    for (const Term& t : classes_[c].membership)
      s.g_full[t.param] += dm * (t.var < 0 ? 1.0 : X_(o, t.var));
  }
  for (std::size_t k = 0; k < free_index_.size(); ++k)
    (*per_obs_grad)(o, static_cast<int>(k)) = s.g_full[free_index_[k]];
}

void CompiledModel::eval_draws_obs(const Eigen::VectorXd& pv,
                                   const DrawSet* draws, int o,
                                   bool want_gradient,
                                   Eigen::VectorXd& per_obs,
                                   Eigen::MatrixXd* per_obs_grad,
                                   Scratch& s) const {
  const int R = draws->n_draws;
  const int col = draws->shared_nodes ? 0 : o;
  const int C = static_cast<int>(classes_.size());
  const int J = n_alts_;
  const int L = static_cast<int>(latents_.size());
  const int ch = choice_pos_[o];
  const bool weighted = draws->log_weights.size() > 0;

  auto term_sum = [&](const std::vector<Term>& terms) {
    double v = 0.0;
    for (const Term& t : terms)
      v += pv[t.param] * (t.var < 0 ? 1.0 : X_(o, t.var));
    return v;
  };
  auto omega = [&](int l) {
    return Eigen::Map<const Eigen::ArrayXd>(draws->values[l].col(col).data(), R);
  };

  // latent values per draw
  for (int l = 0; l < L; ++l)
    s.lv[l] = term_sum(latents_[l].structural) +
              std::abs(pv[latents_[l].scale]) * omega(l);

  // measurement log-density summed over present indicators
  s.mll.setZero();
  int meas_idx = 0;
  for (int l = 0; l < L; ++l) {
    for (const Meas& m : latents_[l].meas) {
      const int my_idx = meas_idx++;
      if (!ind_present_(o, m.indicator)) continue;
      const double sd = std::abs(pv[m.s]);
      const double inv2 = 1.0 / (2.0 * sd * sd);
      s.e[my_idx] = ind_values_(o, m.indicator) - pv[m.a] - pv[m.b] * s.lv[l];
      s.mll += -0.5 * kLog2Pi - std::log(sd) - s.e[my_idx].square() * inv2;
    }
  }

  // class-specific utilities and choice log-probabilities
  for (int c = 0; c < C; ++c) {
    for (int j = 0; j < J; ++j) {
      Eigen::ArrayXd& V = s.V[c * J + j];
      V.setConstant(term_sum(classes_[c].alts[j].cov));
      for (const auto& [param, lat] : classes_[c].alts[j].lat)
        V += pv[param] * s.lv[lat];
    }
    s.mx = s.V[c * J];
    for (int j = 1; j < J; ++j) s.mx = s.mx.max(s.V[c * J + j]);
    s.acc.setZero();
    for (int j = 0; j < J; ++j) s.acc += (s.V[c * J + j] - s.mx).exp();
    s.logden[c] = s.mx + s.acc.log();
  }

  // mixture over classes in log space; logmix kept for the class posteriors
  if (C == 1) {
    s.logmix = s.V[ch] - s.logden[0];
  } else {
    double max_m = 0.0;
    for (int c = 0; c < C; ++c) {
      s.sw[c] = term_sum(classes_[c].membership);
      max_m = c == 0 ? s.sw[c] : std::max(max_m, s.sw[c]);
    }
    double denom_m = 0.0;
    for (int c = 0; c < C; ++c) denom_m += std::exp(s.sw[c] - max_m);
    const double log_denom_m = max_m + std::log(denom_m);
    for (int c = 0; c < C; ++c) {
      s.spi[c] = std::exp(s.sw[c] - log_denom_m);
      s.ac[c] = (s.sw[c] - log_denom_m) + (s.V[c * J + ch] - s.logden[c]);
    }
    s.mx = s.ac[0];
    for (int c = 1; c < C; ++c) s.mx = s.mx.max(s.ac[c]);
    s.acc.setZero();
    for (int c = 0; c < C; ++c) s.acc += (s.ac[c] - s.mx).exp();
    s.logmix = s.mx + s.acc.log();
  }

  s.logf = s.logmix + s.mll;
  if (weighted) s.logf += draws->log_weights.array();

  const double fmax = s.logf.maxCoeff();
  const double fsum = (s.logf - fmax).exp().sum();
  per_obs[o] = fmax + std::log(fsum) - (weighted ? 0.0 : std::log(double(R)));
  if (!want_gradient) return;

  s.q = (s.logf - fmax).exp() / fsum;
  if (C > 1)
    for (int c = 0; c < C; ++c) s.wc[c] = (s.ac[c] - s.logmix).exp();

  s.g_full.setZero();

  for (int l = 0; l < L; ++l) s.dlv[l].setZero();

  for (int c = 0; c < C; ++c) {
    const Eigen::ArrayXd& w = s.wc[c];
    const double W = C == 1 ? 1.0 : (s.q * w).sum();
    for (int j = 0; j < J; ++j) {
      s.P[c * J + j] = (s.V[c * J + j] - s.logden[c]).exp();
      const Eigen::ArrayXd& P = s.P[c * J + j];
      const double A = C == 1 ? (s.q * P).sum() : (s.q * w * P).sum();
      const double delta = (j == ch ? W : 0.0) - A;
      for (const Term& t : classes_[c].alts[j].cov)
        s.g_full[t.param] += delta * (t.var < 0 ? 1.0 : X_(o, t.var));
      for (const auto& [param, lat] : classes_[c].alts[j].lat) {
        const double coef = pv[param];
        if (C == 1) {
          if (j == ch)
            s.g_full[param] += (s.q * s.lv[lat] * (1.0 - P)).sum();
          else
            s.g_full[param] -= (s.q * s.lv[lat] * P).sum();
          if (j == ch)
            s.dlv[lat] += coef;
          s.dlv[lat] -= coef * P;
        } else {
          if (j == ch)
            s.g_full[param] += (s.q * w * s.lv[lat] * (1.0 - P)).sum();
          else
            s.g_full[param] -= (s.q * w * s.lv[lat] * P).sum();
          if (j == ch)
            s.dlv[lat] += coef * w;
          s.dlv[lat] -= coef * (w * P);
        }
      }
    }
    if (C > 1) {
      const double dm = W - s.spi[c];
      for (const Term& t : classes_[c].membership)
        s.g_full[t.param] += dm * (t.var < 0 ? 1.0 : X_(o, t.var));
    }
  }

  // measurement terms: residual derivative feeds both the measurement
  // parameters and the chain back to the latent value
  meas_idx = 0;
  for (int l = 0; l < L; ++l) {
    for (const Meas& m : latents_[l].meas) {
      const int my_idx = meas_idx++;
      if (!ind_present_(o, m.indicator)) continue;
      const double sv = pv[m.s];
      const double inv_s2 = 1.0 / (sv * sv);
      const Eigen::ArrayXd& e = s.e[my_idx];
      s.dlv[l] += (pv[m.b] * inv_s2) * e;
      s.g_full[m.a] += (s.q * e).sum() * inv_s2;
      s.g_full[m.b] += (s.q * e * s.lv[l]).sum() * inv_s2;
      s.g_full[m.s] += (s.q * e.square()).sum() * inv_s2 / sv - 1.0 / sv;
    }
  }

  for (int l = 0; l < L; ++l) {
    const double D = (s.q * s.dlv[l]).sum();
    for (const Term& t : latents_[l].structural)
      s.g_full[t.param] += D * (t.var < 0 ? 1.0 : X_(o, t.var));
    const double sv = pv[latents_[l].scale];
    if (sv != 0.0) {
      const double E = (s.q * s.dlv[l] * omega(l)).sum();
      s.g_full[latents_[l].scale] += (sv > 0 ? 1.0 : -1.0) * E;
    }
  }

  for (std::size_t k = 0; k < free_index_.size(); ++k)
    (*per_obs_grad)(o, static_cast<int>(k)) = s.g_full[free_index_[k]];
}

void CompiledModel::eval_range(const Eigen::VectorXd& pv, const DrawSet* draws,
                               int begin, int end, bool want_gradient,
                               Eigen::VectorXd& per_obs,
                               Eigen::MatrixXd* per_obs_grad,
                               Scratch& scratch) const {
  for (int o = begin; o < end; ++o) {
    if (latents_.empty())
      eval_exact_obs(pv, o, want_gradient, per_obs, per_obs_grad, scratch);
    else
      eval_draws_obs(pv, draws, o, want_gradient, per_obs, per_obs_grad,
                     scratch);
  }
}

void CompiledModel::check_and_run(const ParameterVector& params,
                                  const DrawSet* draws, int threads,
                                  bool want_gradient, Eigen::VectorXd& per_obs,
                                  Eigen::MatrixXd* per_obs_grad) const {
  if (static_cast<int>(params.size()) != n_params_)
    throw SpecError("parameter vector does not match the compiled model");
  if (needs_draws()) {
    if (!draws) throw DomainError("model requires simulation draws");
    if (draws->n_draws < 1)
      throw DomainError("draw count must be positive");
    if (draws->dims < latent_dims())
      throw DomainError("draw set has fewer dimensions than latent variables");
    if (!draws->shared_nodes && draws->n_obs < n_obs())
      throw DomainError("draw set covers fewer observations than the data");
    for (const Latent& lat : latents_)
      for (const Meas& m : lat.meas)
        if (params[m.s].value == 0.0)
          throw DomainError("measurement scale '" + names_[m.s] + "' is zero");
  }

  Eigen::VectorXd pv(n_params_);
  for (int i = 0; i < n_params_; ++i) pv[i] = params[i].value;

  const int n = n_obs();
  per_obs.resize(n);
  if (want_gradient) {
    per_obs_grad->resize(n, n_free());
  }

  int n_meas = 0;
  for (const Latent& lat : latents_) n_meas += static_cast<int>(lat.meas.size());
  const int R = needs_draws() ? draws->n_draws : 1;
  const int C = static_cast<int>(classes_.size());

  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    Scratch scratch;
    scratch.ensure(R, C, n_alts_, latent_dims(), n_meas, n_params_);
    eval_range(pv, draws, 0, n, want_gradient, per_obs, per_obs_grad, scratch);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end]() {
      Scratch scratch;
      scratch.ensure(R, C, n_alts_, latent_dims(), n_meas, n_params_);
      eval_range(pv, draws, begin, end, want_gradient, per_obs, per_obs_grad,
                 scratch);
    });
  }
  for (auto& th : pool) th.join();
}

LikelihoodValue CompiledModel::value(const ParameterVector& params,
                                     const DrawSet* draws, int threads) const {
  LikelihoodValue out;
  check_and_run(params, draws, threads, false, out.per_observation, nullptr);
  out.total = out.per_observation.sum();
  return out;
}

LikelihoodGradient CompiledModel::value_and_gradient(
    const ParameterVector& params, const DrawSet* draws, int threads) const {
  LikelihoodGradient out;
  check_and_run(params, draws, threads, true, out.per_observation,
                &out.per_obs_gradient);
  out.total = out.per_observation.sum();
  out.gradient = out.per_obs_gradient.colwise().sum().transpose();
  return out;
}

// ---------------------------------------------------------------------------
// entry points

namespace {

void check_family(const ModelSpec& spec, ModelFamily expected,
                  const char* where) {
  if (spec.family != expected)
    throw SpecError(std::string(where) + ": spec family is " +
                    family_name(spec.family));
}

}  // namespace

LikelihoodValue mnl_loglik(const Dataset& data, const ModelSpec& spec,
                           const ParameterVector& params) {
  check_family(spec, ModelFamily::MNL, "mnl_loglik");
  return CompiledModel(data, spec).value(params);
}

LikelihoodValue lc_loglik(const Dataset& data, const ModelSpec& spec,
                          const ParameterVector& params) {
  check_family(spec, ModelFamily::LC, "lc_loglik");
  return CompiledModel(data, spec).value(params);
}

LikelihoodValue iclv_simulated_loglik(const Dataset& data,
                                      const ModelSpec& spec,
                                      const ParameterVector& params,
                                      const DrawSet& draws) {
  check_family(spec, ModelFamily::ICLV, "iclv_simulated_loglik");
  return CompiledModel(data, spec).value(params, &draws);
}

LikelihoodValue lc_iclv_simulated_loglik(const Dataset& data,
                                         const ModelSpec& spec,
                                         const ParameterVector& params,
                                         const DrawSet& draws) {
  check_family(spec, ModelFamily::LC_ICLV, "lc_iclv_simulated_loglik");
  return CompiledModel(data, spec).value(params, &draws);
}

LikelihoodValue loglik(const Dataset& data, const ModelSpec& spec,
                       const ParameterVector& params, const DrawSet* draws) {
  return CompiledModel(data, spec).value(params, draws);
}

LikelihoodGradient loglik_gradient(const Dataset& data, const ModelSpec& spec,
                                   const ParameterVector& params,
                                   const DrawSet* draws) {
  LikelihoodGradient g = CompiledModel(data, spec).value_and_gradient(params, draws);
  if (!std::isfinite(g.total) || !g.gradient.allFinite())
    throw DomainError("non-finite log-likelihood gradient");
  return g;
}

}  // namespace hychoice
