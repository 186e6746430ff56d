#include "hychoice/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hychoice/errors.hpp"

namespace hychoice {

namespace {

double max_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double uniform01(std::mt19937_64& rng) {
  return ((rng() >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

Eigen::MatrixXd Objective::per_observation_gradient(const Eigen::VectorXd& x) {
  Eigen::VectorXd g(n_free());
  value_and_gradient(x, g);
  return g.transpose();
}

namespace {

// One probe along the search ray, in minimization convention: m = -f(x+a*d),
// dm = -g(x+a*d).d. Gradients are kept so the accepted point needs no
// re-evaluation.
struct Probe {
  double alpha = 0.0;
  double m = 0.0;
  double dm = 0.0;
  Eigen::VectorXd gradient;
  double value = 0.0;
  bool finite = false;
};

class RaySearch {
 public:
  RaySearch(Objective& objective, const Eigen::VectorXd& x,
            const Eigen::VectorXd& d)
      : objective_(objective), x_(x), d_(d) {}

  Probe at(double alpha) {
    Probe p;
    p.alpha = alpha;
    p.gradient.resize(x_.size());
    p.value = objective_.value_and_gradient(x_ + alpha * d_, p.gradient);
    p.finite = std::isfinite(p.value) && p.gradient.allFinite();
    p.m = -p.value;
    p.dm = -p.gradient.dot(d_);
    ++evals_;
    return p;
  }

  int evals() const { return evals_; }

 private:
  Objective& objective_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& d_;
  int evals_ = 0;
};

// Cubic minimizer of the interpolant through two probes; falls back to
// bisection when degenerate or outside the safeguarded interior.
double interpolate(const Probe& a, const Probe& b) {
  const double lo = std::min(a.alpha, b.alpha);
  const double hi = std::max(a.alpha, b.alpha);
  const double span = hi - lo;
  const double d1 = a.dm + b.dm - 3.0 * (a.m - b.m) / (a.alpha - b.alpha);
  const double radicand = d1 * d1 - a.dm * b.dm;
  double alpha = lo + 0.5 * span;
  if (radicand >= 0.0) {
    const double d2 = (b.alpha >= a.alpha ? 1.0 : -1.0) * std::sqrt(radicand);
    const double denom = b.dm - a.dm + 2.0 * d2;
    if (denom != 0.0) {
      const double c = b.alpha - (b.alpha - a.alpha) * (b.dm + d2 - d1) / denom;
      if (std::isfinite(c)) alpha = c;
    }
  }
  const double margin = 0.1 * span;
  return std::clamp(alpha, lo + margin, hi - margin);
}

// Strong-Wolfe line search (sufficient decrease 1e-4, curvature 0.9) on the
// negated objective. Returns an accepted probe, or the best merely-improving
// probe when the Wolfe pair is unreachable; p.finite is false when not even
// that exists.
Probe wolfe_search(RaySearch& ray, double m0, double dm0, double alpha0) {
  constexpr double kC1 = 1e-4;
  constexpr double kC2 = 0.9;
  constexpr int kMaxProbes = 24;

  Probe best;  // best finite improvement seen, Wolfe or not
  best.m = m0;
  auto consider = [&](const Probe& p) {
    if (p.finite && (!best.finite || p.m < best.m)) best = p;
  };
  auto zoom = [&](Probe lo, Probe hi) -> Probe {
    for (int i = 0; ray.evals() < kMaxProbes; ++i) {
      if (std::abs(hi.alpha - lo.alpha) <
          1e-12 * std::max(1.0, std::abs(lo.alpha)))
        break;
      Probe p = ray.at(interpolate(lo, hi));
      if (!p.finite) {
        hi = p;  // shrink toward the finite end
        hi.m = std::numeric_limits<double>::infinity();
        continue;
      }
      consider(p);
      if (p.m > m0 + kC1 * p.alpha * dm0 || p.m >= lo.m) {
        hi = p;
        continue;
      }
      if (std::abs(p.dm) <= -kC2 * dm0) return p;
      if (p.dm * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = p;
    }
    best.finite = best.finite && best.m < m0;
    return best;
  };

  Probe prev;
  prev.alpha = 0.0;
  prev.m = m0;
  prev.dm = dm0;
  prev.finite = true;
  double alpha = alpha0;
  while (ray.evals() < kMaxProbes) {
    Probe p = ray.at(alpha);
    if (!p.finite) {
      alpha = prev.alpha + 0.25 * (alpha - prev.alpha);
      continue;
    }
    consider(p);
    if (p.m > m0 + kC1 * p.alpha * dm0 || (prev.alpha > 0.0 && p.m >= prev.m))
      return zoom(prev, p);
    if (std::abs(p.dm) <= -kC2 * dm0) return p;
    if (p.dm >= 0.0) return zoom(p, prev);
    prev = p;
    alpha *= 2.0;
  }
  best.finite = best.finite && best.m < m0;
  return best;
}

}  // namespace

MaximizeStatus maximize(Objective& objective, const Eigen::VectorXd& start,
                        double tol, int max_iterations,
                        Eigen::MatrixXd* metric) {
  const int n = objective.n_free();
  MaximizeStatus status;
  status.x = start;
  status.gradient.resize(n);
  status.value = objective.value_and_gradient(status.x, status.gradient);
  status.initial_value = status.value;
  if (!std::isfinite(status.value) || !status.gradient.allFinite()) {
    if (metric) metric->resize(0, 0);
    return status;
  }

  Eigen::MatrixXd hinv;
  bool seeded = metric && metric->rows() == n && metric->cols() == n &&
                metric->allFinite() && n > 0;
  if (seeded)
    hinv = *metric;
  else
    hinv = Eigen::MatrixXd::Identity(n, n);
  bool first_update = !seeded;

  while (status.iterations < max_iterations) {
    status.gradient_norm = max_norm(status.gradient);
    if (status.gradient_norm < tol) {
      status.converged = true;
      break;
    }

    Eigen::VectorXd direction = hinv * status.gradient;
    double slope = direction.dot(status.gradient);
    if (!(slope > 0.0) || !direction.allFinite()) {
      hinv.setIdentity();
      first_update = true;
      seeded = false;
      direction = status.gradient;
      slope = direction.squaredNorm();
    }

    // fresh identity metric: start short so huge raw gradients cannot fling
    // the first probe into overflow territory
    const double alpha0 =
        first_update ? std::min(1.0, 1.0 / std::max(1.0, max_norm(direction)))
                     : 1.0;
    RaySearch ray(objective, status.x, direction);
    const Probe accepted = wolfe_search(ray, -status.value, -slope, alpha0);
    if (!accepted.finite) {
      // a stale metric can poison the direction near the optimum; retry the
      // iteration once from a fresh identity before giving up
      if (!first_update) {
        hinv.setIdentity();
        first_update = true;
        seeded = false;
        continue;
      }
      break;  // stalled twice; report the last gradient
    }

    const Eigen::VectorXd s = accepted.alpha * direction;
    const Eigen::VectorXd y = status.gradient - accepted.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      if (first_update) {
        hinv *= sy / y.squaredNorm();
        first_update = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = hinv * y;
      hinv += -rho * (hy * s.transpose() + s * hy.transpose()) +
              (rho * rho * y.dot(hy) + rho) * (s * s.transpose());
    }

    status.x += s;
    status.value = accepted.value;
    status.gradient = accepted.gradient;
    ++status.iterations;
  }

  status.gradient_norm = max_norm(status.gradient);
  status.converged = status.gradient_norm < tol;
  if (metric) *metric = hinv;
  return status;
}

Eigen::MatrixXd robust_covariance(Objective& objective,
                                  const Eigen::VectorXd& at, bool* warning) {
  const int n = objective.n_free();
  if (warning) *warning = false;
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd hessian(n, n);
  Eigen::VectorXd gp(n), gm(n), x = at;
  for (int i = 0; i < n; ++i) {
    const double h = 1e-4 * std::max(1.0, std::abs(at[i]));
    x[i] = at[i] + h;
    objective.value_and_gradient(x, gp);
    x[i] = at[i] - h;
    objective.value_and_gradient(x, gm);
    x[i] = at[i];
    hessian.col(i) = (gp - gm) / (2.0 * h);
  }
  hessian = ((hessian + hessian.transpose()) / 2.0).eval();

  const Eigen::MatrixXd rows = objective.per_observation_gradient(at);
  const Eigen::MatrixXd b = rows.transpose() * rows;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(hessian);
  const Eigen::VectorXd ev = solve.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  const double cutoff = scale * 1e-12;
  bool degenerate = scale == 0.0;
  Eigen::VectorXd inv = ev;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev[i]) <= cutoff) {
      inv[i] = 0.0;
      degenerate = true;
    } else {
      inv[i] = 1.0 / ev[i];
    }
  }
  if (warning) *warning = degenerate;
  const Eigen::MatrixXd hinv =
      solve.eigenvectors() * inv.asDiagonal() * solve.eigenvectors().transpose();
  Eigen::MatrixXd cov = hinv * b * hinv;
  return ((cov + cov.transpose()) / 2.0).eval();
}

double rho_square_bar(double ll_final, double ll_initial, int k) {
  return 1.0 - (ll_final - k) / ll_initial;
}

LikelihoodObjective::LikelihoodObjective(const Dataset& data,
                                         const ModelSpec& spec,
                                         const DrawSet* draws, int threads)
    : model_(data, spec),
      params_(spec.parameters),
      draws_(draws),
      threads_(threads) {}

double LikelihoodObjective::value(const Eigen::VectorXd& x) {
  params_.set_free_values(x);
  return model_.value(params_, draws_, threads_).total;
}

double LikelihoodObjective::value_and_gradient(const Eigen::VectorXd& x,
                                               Eigen::VectorXd& grad) {
  params_.set_free_values(x);
  LikelihoodGradient g = model_.value_and_gradient(params_, draws_, threads_);
  grad = g.gradient;
  return g.total;
}

Eigen::MatrixXd LikelihoodObjective::per_observation_gradient(
    const Eigen::VectorXd& x) {
  params_.set_free_values(x);
  return model_.value_and_gradient(params_, draws_, threads_).per_obs_gradient;
}

namespace {

void fill_statistics(const Eigen::MatrixXd& cov, EstimationResult& result) {
  const auto& items = result.params.items();
  int slot = 0;
  for (const auto& p : items) {
    if (p.fixed) continue;
    const double var = std::max(0.0, cov(slot, slot));
    const double se = std::sqrt(var);
    const double t = se > 0.0 ? p.value / se : 0.0;
    result.robust_se[p.name] = se;
    result.robust_t[p.name] = t;
    const double at = std::abs(t);
    result.significance[p.name] =
        at >= 1.96 ? "95%" : (at >= 1.645 ? "90%" : "none");
    ++slot;
  }
}

}  // namespace

EstimationResult estimate(const Dataset& data, const ModelSpec& spec,
                          const EstimateOptions& options) {
  EstimationResult result;
  result.params = spec.parameters;
  result.n_free = static_cast<int>(spec.parameters.free_count());

  const bool latent = !spec.latent_variables.empty();
  DrawSet draws_full;
  if (latent)
    draws_full = halton_draws(static_cast<int>(data.size()), spec.n_draws,
                              static_cast<int>(spec.latent_variables.size()),
                              10, spec.seed);
  LikelihoodObjective objective(data, spec, latent ? &draws_full : nullptr,
                                options.threads);

  Eigen::VectorXd start = spec.parameters.free_values();
  result.ll_initial = objective.value(start);

  Eigen::MatrixXd metric;  // inverse-Hessian carry between stages
  if (latent && options.coarse_draws > 0 &&
      options.coarse_draws < spec.n_draws) {
    DrawSet coarse = halton_draws(static_cast<int>(data.size()),
                                  options.coarse_draws,
                                  static_cast<int>(spec.latent_variables.size()),
                                  10, spec.seed);
    objective.set_draws(&coarse);
    MaximizeStatus stage = maximize(objective, start, options.coarse_tol,
                                    options.max_iterations, &metric);
    start = stage.x;
    objective.set_draws(&draws_full);
    result.notes.push_back("coarse stage: " + std::to_string(stage.iterations) +
                           " iterations at " +
                           std::to_string(options.coarse_draws) + " draws");
  }

  MaximizeStatus status =
      maximize(objective, start, options.tol, options.max_iterations, &metric);
  result.params.set_free_values(status.x);
  result.ll_final = status.value;
  result.iterations = status.iterations;
  result.converged = status.converged;
  result.gradient_norm = status.gradient_norm;
  result.rho_square_bar =
      rho_square_bar(result.ll_final, result.ll_initial, result.n_free);

  if (options.covariance && result.n_free > 0) {
    bool warning = false;
    const Eigen::MatrixXd cov = robust_covariance(objective, status.x, &warning);
    result.covariance_warning = warning;
    if (warning)
      result.notes.push_back(
          "hessian ill-conditioned; pseudo-inverse used for the sandwich");
    fill_statistics(cov, result);
  }
  if (spec.classes.size() == 2) canonicalize_classes(data, spec, result);
  return result;
}

void seed_latent_starts(const Dataset& data, ModelSpec& spec) {
  std::vector<double> values;
  std::vector<unsigned char> present;
  for (const auto& lv : spec.latent_variables) {
    double anchor_mean = 0.0;
    bool have_anchor = false;
    for (const auto& eq : lv.measurements) {
      data.column(eq.indicator, values, present);
      double sum = 0.0, sum2 = 0.0;
      int n = 0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (!present[i]) continue;
        sum += values[i];
        sum2 += values[i] * values[i];
        ++n;
      }
      if (n == 0) continue;
      const double mean = sum / n;
      const double var = std::max(0.0, sum2 / n - mean * mean);
      const int a = spec.parameters.index_of(eq.intercept);
      const int b = spec.parameters.index_of(eq.loading);
      const int s = spec.parameters.index_of(eq.scale);
      const bool anchored = a >= 0 && spec.parameters[a].fixed &&
                            spec.parameters[a].value == 0.0 && b >= 0 &&
                            spec.parameters[b].fixed &&
                            spec.parameters[b].value == 1.0;
      if (anchored && !have_anchor) {
        anchor_mean = mean;
        have_anchor = true;
      }
      if (a >= 0 && !spec.parameters[a].fixed)
        spec.parameters[a].value = mean;
      if (s >= 0 && !spec.parameters[s].fixed)
        spec.parameters[s].value = std::max(std::sqrt(var), 0.5);
    }
    for (const auto& term : lv.structural) {
      if (term.variable != kConstant) continue;
      const int idx = spec.parameters.index_of(term.parameter);
      if (idx >= 0 && !spec.parameters[idx].fixed && have_anchor)
        spec.parameters[idx].value = anchor_mean;
    }
    const int scale = spec.parameters.index_of(lv.error_scale);
    if (scale >= 0 && !spec.parameters[scale].fixed &&
        spec.parameters[scale].value == 0.0)
      spec.parameters[scale].value = 1.0;
  }
}

namespace {

// Positional parameter pairing of two structurally mirrored classes: same
// variables in the same order in every alternative and in the membership
// block. Returns pairs of parameter indices (class a, class b).
bool mirror_pairs(const ModelSpec& spec, std::size_t a, std::size_t b,
                  std::vector<std::pair<int, int>>& pairs) {
  const ClassSpec& ca = spec.classes[a];
  const ClassSpec& cb = spec.classes[b];
  for (const auto& alt : spec.alternatives) {
    const auto ita = ca.utilities.find(alt.index);
    const auto itb = cb.utilities.find(alt.index);
    const std::size_t na = ita == ca.utilities.end() ? 0 : ita->second.size();
    const std::size_t nb = itb == cb.utilities.end() ? 0 : itb->second.size();
    if (na != nb) return false;
    for (std::size_t k = 0; k < na; ++k) {
      const UtilityTerm& ta = ita->second[k];
      const UtilityTerm& tb = itb->second[k];
      if (ta.variable != tb.variable) return false;
      pairs.emplace_back(spec.parameters.index_of(ta.parameter),
                         spec.parameters.index_of(tb.parameter));
    }
  }
  return true;
}

void swap_stats(EstimationResult& result, const std::string& a,
                const std::string& b) {
  if (!result.robust_se.empty())
    std::swap(result.robust_se[a], result.robust_se[b]);
  if (!result.robust_t.empty()) std::swap(result.robust_t[a], result.robust_t[b]);
  if (!result.significance.empty())
    std::swap(result.significance[a], result.significance[b]);
}

}  // namespace

bool canonicalize_classes(const Dataset& data, const ModelSpec& spec,
                          EstimationResult& result) {
  if (spec.classes.size() != 2) return false;
  std::size_t captive = 2;
  for (std::size_t c = 0; c < 2; ++c)
    if (spec.classes[c].label == "Captive") captive = c;
  if (captive == 2) return false;
  if (!data.has_variable("LowIncome")) return false;

  std::vector<std::pair<int, int>> pairs;
  if (!mirror_pairs(spec, captive, 1 - captive, pairs)) return false;
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  for (const auto& [pa, pb] : pairs) {
    if (pa < 0 || pb < 0) return false;
    if (result.params[pa].fixed != result.params[pb].fixed) return false;
  }

  double share = 0.0;
  int n = 0;
  for (const auto& obs : data.observations) {
    const auto it = obs.covariates.find("LowIncome");
    if (it == obs.covariates.end() || it->second != 1.0) continue;
    share += membership_probabilities(obs, spec.classes, result.params)
        [static_cast<int>(captive)];
    ++n;
  }
  if (n == 0 || share / n >= 0.5) return false;

  for (const auto& [pa, pb] : pairs) {
    if (pa == pb) continue;
    const double va = result.params[pa].value;
    result.params[pa].value = result.params[pb].value;
    result.params[pb].value = va;
    swap_stats(result, result.params[pa].name, result.params[pb].name);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (const auto& term : spec.classes[c].membership) {
      const int idx = result.params.index_of(term.parameter);
      if (idx < 0) continue;
      result.params[idx].value = -result.params[idx].value;
      const auto it = result.robust_t.find(term.parameter);
      if (it != result.robust_t.end()) it->second = -it->second;
    }
  }
  result.notes.push_back("classes relabeled to keep Captive on LowIncome");
  return true;
}

const EstimationResult& PipelineResult::for_family(ModelFamily family) const {
  for (std::size_t i = 0; i < families.size(); ++i)
    if (families[i] == family) return results[i];
  throw SpecError(std::string("pipeline did not run the ") +
                  family_name(family) + " stage");
}

PipelineResult warm_start_pipeline(const Dataset& data,
                                   const std::vector<ModelSpec>& presets,
                                   const EstimateOptions& options,
                                   ModelFamily through) {
  if (presets.size() != 4)
    throw SpecError("warm_start_pipeline expects four specs");
  PipelineResult out;
  // stage references below survive push_back only because of this reserve
  out.families.reserve(4);
  out.results.reserve(4);
  out.provenance.reserve(4);

  auto copy_by_name = [](const ParameterVector& from, ModelSpec& to,
                         const std::string& strip_suffix = "") {
    for (std::size_t i = 0; i < to.parameters.size(); ++i) {
      Parameter& p = to.parameters[i];
      if (p.fixed) continue;
      std::string source = p.name;
      if (!strip_suffix.empty() && source.size() > strip_suffix.size() &&
          source.compare(source.size() - strip_suffix.size(),
                         strip_suffix.size(), strip_suffix) == 0)
        source.resize(source.size() - strip_suffix.size());
      const int idx = from.index_of(source);
      if (idx >= 0) p.value = from[idx].value;
    }
  };
  auto run = [&](ModelFamily family, const ModelSpec& spec,
                 const std::string& seeding) -> const EstimationResult& {
    out.families.push_back(family);
    out.results.push_back(estimate(data, spec, options));
    out.provenance.push_back(
        std::string(family_name(family)) + ": " + seeding + ", " +
        (out.results.back().converged ? "converged" : "not converged"));
    return out.results.back();
  };

  const bool want_lc = through == ModelFamily::LC || through == ModelFamily::LC_ICLV;
  const bool want_iclv =
      through == ModelFamily::ICLV || through == ModelFamily::LC_ICLV;

  const EstimationResult& mnl = run(ModelFamily::MNL, presets[0], "from spec starts");

  const EstimationResult* lc = nullptr;
  if (want_lc) {
    ModelSpec spec = presets[1];
    copy_by_name(mnl.params, spec, "_C1");
    copy_by_name(mnl.params, spec, "_C2");
    std::mt19937_64 rng(options.jitter_seed);
    for (std::size_t i = 0; i < spec.parameters.size(); ++i) {
      Parameter& p = spec.parameters[i];
      if (p.fixed) continue;
      const bool class_specific =
          p.name.size() > 3 && (p.name.rfind("_C1") == p.name.size() - 3 ||
                                p.name.rfind("_C2") == p.name.size() - 3);
      if (class_specific) p.value += 0.2 * uniform01(rng) - 0.1;
    }
    lc = &run(ModelFamily::LC, spec,
              "seeded from MNL with +-0.1 jitter (seed " +
                  std::to_string(options.jitter_seed) + ")");
  }

  const EstimationResult* iclv = nullptr;
  if (want_iclv) {
    ModelSpec spec = presets[2];
    copy_by_name(mnl.params, spec);
    seed_latent_starts(data, spec);
    iclv = &run(ModelFamily::ICLV, spec,
                "choice from MNL, measurement from data moments");
  }

  if (through == ModelFamily::LC_ICLV) {
    ModelSpec spec = presets[3];
    copy_by_name(lc->params, spec);
    copy_by_name(iclv->params, spec);
    run(ModelFamily::LC_ICLV, spec, "classes from LC, latent block from ICLV");
  }
  return out;
}

}  // namespace hychoice
