#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hychoice/dataset.hpp"

namespace hychoice {

enum class ModelFamily { MNL, LC, ICLV, LC_ICLV };

const char* family_name(ModelFamily family);
std::optional<ModelFamily> family_from_name(const std::string& name);

struct Parameter {
  std::string name;
  double value = 0.0;
  bool fixed = false;
  std::optional<double> lower, upper;
};

class ParameterVector {
 public:
  void add(const std::string& name, double value, bool fixed = false);
  bool has(const std::string& name) const { return index_of(name) >= 0; }
  int index_of(const std::string& name) const;  // -1 when absent
  double value(const std::string& name) const;
  void set_value(const std::string& name, double v);
  void set_fixed(const std::string& name, bool fixed);

  std::size_t size() const { return items_.size(); }
  const Parameter& operator[](std::size_t i) const { return items_[i]; }
  Parameter& operator[](std::size_t i) { return items_[i]; }
  const std::vector<Parameter>& items() const { return items_; }

  std::vector<int> free_indices() const;
  std::size_t free_count() const { return free_indices().size(); }
  Eigen::VectorXd free_values() const;
  void set_free_values(const Eigen::VectorXd& v);

 private:
  std::vector<Parameter> items_;
  std::map<std::string, int> index_;
};

// One additive utility term: parameter * variable. The variable is a dataset
// column, the reserved name CONSTANT (value 1), or a declared latent variable.
struct UtilityTerm {
  std::string parameter;
  std::string variable;
};

inline constexpr const char* kConstant = "CONSTANT";
inline constexpr const char* kDisturbance = "DISTURBANCE";  // structural error slot

struct MeasurementEq {
  std::string indicator;
  std::string intercept;  // parameter names
  std::string loading;
  std::string scale;
};

// latent = sum(structural terms) + |scale| * standard-normal disturbance;
// indicator = intercept + loading * latent + |scale| * noise per equation.
struct LatentVariableSpec {
  std::string name;
  std::vector<UtilityTerm> structural;
  std::string error_scale;  // parameter name
  std::vector<MeasurementEq> measurements;
};

struct ClassSpec {
  std::string label;
  std::vector<UtilityTerm> membership;  // empty marks the reference class
  std::map<int, std::vector<UtilityTerm>> utilities;  // by alternative index
};

struct ModelSpec {
  ModelFamily family = ModelFamily::MNL;
  std::vector<Alternative> alternatives;
  std::map<int, std::vector<UtilityTerm>> utilities;  // MNL / ICLV
  std::vector<ClassSpec> classes;                     // LC / LC_ICLV
  std::vector<LatentVariableSpec> latent_variables;   // ICLV / LC_ICLV
  ParameterVector parameters;
  int n_draws = 1000;
  std::uint64_t seed = 1;

  bool has_latent(const std::string& name) const;
};

struct Finding {
  std::string code;  // stable identifier, e.g. "unknown-parameter"
  std::string message;
};

// Structural checks of a spec against a dataset; empty report means valid.
std::vector<Finding> validate(const ModelSpec& spec, const Dataset& data);

}  // namespace hychoice
