#include "hychoice/modelspec.hpp"

#include <algorithm>
#include <set>

#include "hychoice/errors.hpp"

namespace hychoice {

const char* family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::MNL: return "MNL";
    case ModelFamily::LC: return "LC";
    case ModelFamily::ICLV: return "ICLV";
    case ModelFamily::LC_ICLV: return "LC-ICLV";
  }
  return "?";
}

std::optional<ModelFamily> family_from_name(const std::string& name) {
  if (name == "MNL") return ModelFamily::MNL;
  if (name == "LC") return ModelFamily::LC;
  if (name == "ICLV") return ModelFamily::ICLV;
  if (name == "LC-ICLV" || name == "LC_ICLV") return ModelFamily::LC_ICLV;
  return std::nullopt;
}

void ParameterVector::add(const std::string& name, double value, bool fixed) {
  if (has(name)) throw SpecError("parameter '" + name + "' declared twice");
  index_[name] = static_cast<int>(items_.size());
  items_.push_back({name, value, fixed, {}, {}});
}

int ParameterVector::index_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

double ParameterVector::value(const std::string& name) const {
  const int i = index_of(name);
  if (i < 0) throw SpecError("unknown parameter '" + name + "'");
  return items_[i].value;
}

void ParameterVector::set_value(const std::string& name, double v) {
  const int i = index_of(name);
  if (i < 0) throw SpecError("unknown parameter '" + name + "'");
  items_[i].value = v;
}

void ParameterVector::set_fixed(const std::string& name, bool fixed) {
  const int i = index_of(name);
  if (i < 0) throw SpecError("unknown parameter '" + name + "'");
  items_[i].fixed = fixed;
}

std::vector<int> ParameterVector::free_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < items_.size(); ++i)
    if (!items_[i].fixed) out.push_back(static_cast<int>(i));
  return out;
}

Eigen::VectorXd ParameterVector::free_values() const {
  const auto idx = free_indices();
  Eigen::VectorXd v(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) v(i) = items_[idx[i]].value;
  return v;
}

void ParameterVector::set_free_values(const Eigen::VectorXd& v) {
  const auto idx = free_indices();
  if (v.size() != static_cast<Eigen::Index>(idx.size()))
    throw SpecError("free-value vector has wrong length");
  for (std::size_t i = 0; i < idx.size(); ++i) items_[idx[i]].value = v(i);
}

bool ModelSpec::has_latent(const std::string& name) const {
  return std::any_of(latent_variables.begin(), latent_variables.end(),
                     [&](const LatentVariableSpec& lv) { return lv.name == name; });
}

namespace {

void check_terms(const ModelSpec& spec, const Dataset& data,
                 const std::vector<UtilityTerm>& terms, const std::string& where,
                 bool allow_latent, std::vector<Finding>& out) {
  for (const auto& term : terms) {
    if (!spec.parameters.has(term.parameter))
      out.push_back({"unknown-parameter",
                     where + ": parameter '" + term.parameter + "' is not declared"});
    if (term.variable == kConstant) continue;
    if (spec.has_latent(term.variable)) {
      if (!allow_latent)
        out.push_back({"latent-not-allowed",
                       where + ": latent variable '" + term.variable + "' cannot appear here"});
      continue;
    }
    const VarDef* var = data.find_variable(term.variable);
    if (!var) {
      out.push_back({"unknown-variable",
                     where + ": variable '" + term.variable + "' is not in the dataset"});
    } else if (var->kind == VarKind::Categorical) {
      out.push_back({"unencoded-variable",
                     where + ": variable '" + term.variable + "' is categorical; encode it first"});
    }
  }
}

}  // namespace

std::vector<Finding> validate(const ModelSpec& spec, const Dataset& data) {
  std::vector<Finding> out;

  if (spec.alternatives.size() < 2)
    out.push_back({"too-few-alternatives", "at least 2 alternatives are required"});
  std::set<int> alt_codes;
  for (const auto& alt : spec.alternatives)
    if (!alt_codes.insert(alt.index).second)
      out.push_back({"duplicate-alternative",
                     "alternative index " + std::to_string(alt.index) + " declared twice"});

  const bool has_classes = spec.family == ModelFamily::LC || spec.family == ModelFamily::LC_ICLV;
  const bool has_latents = spec.family == ModelFamily::ICLV || spec.family == ModelFamily::LC_ICLV;

  if (has_classes) {
    if (!spec.utilities.empty())
      out.push_back({"family-mismatch", "class-based families take utilities inside classes"});
    if (spec.classes.size() < 2)
      out.push_back({"family-mismatch", "latent-class families need at least 2 classes"});
    int references = 0;
    for (const auto& cls : spec.classes)
      if (cls.membership.empty()) ++references;
    if (references != 1)
      out.push_back({"membership-reference",
                     "exactly one class must have an empty membership utility (found " +
                         std::to_string(references) + ")"});
    for (const auto& cls : spec.classes) {
      check_terms(spec, data, cls.membership, "class '" + cls.label + "' membership",
                  false, out);
      for (const auto& [alt, terms] : cls.utilities) {
        if (!alt_codes.count(alt))
          out.push_back({"unknown-alternative",
                         "class '" + cls.label + "' has a utility for undeclared alternative " +
                             std::to_string(alt)});
        check_terms(spec, data, terms,
                    "class '" + cls.label + "' utility " + std::to_string(alt), has_latents, out);
      }
    }
  } else {
    if (!spec.classes.empty())
      out.push_back({"family-mismatch",
                     std::string(family_name(spec.family)) + " takes no latent classes"});
    for (const auto& [alt, terms] : spec.utilities) {
      if (!alt_codes.count(alt))
        out.push_back({"unknown-alternative",
                       "utility declared for undeclared alternative " + std::to_string(alt)});
      check_terms(spec, data, terms, "utility " + std::to_string(alt), has_latents, out);
    }
  }

  if (!has_latents && !spec.latent_variables.empty())
    out.push_back({"family-mismatch",
                   std::string(family_name(spec.family)) + " takes no latent variables"});
  if (has_latents && spec.latent_variables.empty())
    out.push_back({"family-mismatch",
                   std::string(family_name(spec.family)) + " needs at least one latent variable"});

  for (const auto& lv : spec.latent_variables) {
    check_terms(spec, data, lv.structural, "latent '" + lv.name + "' structural", false, out);
    if (!spec.parameters.has(lv.error_scale))
      out.push_back({"unknown-parameter",
                     "latent '" + lv.name + "': scale parameter '" + lv.error_scale +
                         "' is not declared"});
    if (lv.measurements.empty())
      out.push_back({"missing-measurement",
                     "latent '" + lv.name + "' has no measurement equations"});
    int anchors = 0;
    for (const auto& eq : lv.measurements) {
      for (const std::string& pname : {eq.intercept, eq.loading, eq.scale})
        if (!spec.parameters.has(pname))
          out.push_back({"unknown-parameter",
                         "measurement of '" + eq.indicator + "': parameter '" + pname +
                             "' is not declared"});
      const VarDef* var = data.find_variable(eq.indicator);
      if (!var)
        out.push_back({"unknown-indicator",
                       "indicator '" + eq.indicator + "' is not in the dataset"});
      if (spec.parameters.has(eq.intercept) && spec.parameters.has(eq.loading) &&
          spec.parameters.has(eq.scale)) {
        const int pi = spec.parameters.index_of(eq.intercept);
        const int pl = spec.parameters.index_of(eq.loading);
        const int ps = spec.parameters.index_of(eq.scale);
        const auto& items = spec.parameters.items();
        if (items[pi].fixed && items[pi].value == 0.0 && items[pl].fixed &&
            items[pl].value == 1.0 && items[ps].fixed && items[ps].value == 1.0)
          ++anchors;
      }
    }
    if (!lv.measurements.empty() && anchors != 1)
      out.push_back({"anchor",
                     "latent '" + lv.name +
                         "' needs exactly one anchor equation (intercept fixed 0, loading fixed 1, "
                         "scale fixed 1); found " +
                         std::to_string(anchors)});
  }

  for (const auto& obs : data.observations)
    if (obs.choice != 0 && !alt_codes.count(obs.choice)) {
      out.push_back({"choice-out-of-range",
                     "observation " + obs.id + " chose undeclared alternative " +
                         std::to_string(obs.choice)});
      break;  // one finding is enough to flag the dataset
    }

  if (spec.n_draws < 1 && has_latents)
    out.push_back({"draws", "simulated families need n_draws >= 1"});

  return out;
}

}  // namespace hychoice
