#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hychoice {

struct Alternative {
  int index = 0;  // external code used in choice columns (1-based in our data)
  std::string label;
};

enum class VarKind { Binary, Continuous, Likert, Categorical };

const char* var_kind_name(VarKind kind);

struct VarDef {
  std::string name;
  VarKind kind = VarKind::Continuous;
};

// Column layout expected of a CSV file. `key` is hashed into Observation::id
// on load; raw key values never survive past ingestion. `choice` may be empty
// for tables without a stated preference (e.g. operational logs).
struct Schema {
  std::string key;
  std::string choice;
  std::string weight;  // optional column; absent -> weight 1
  std::vector<VarDef> variables;
  std::vector<Alternative> alternatives;
};

struct Observation {
  std::string id;
  int choice = 0;  // matches an Alternative::index; 0 = no stated choice
  double weight = 1.0;
  std::map<std::string, double> covariates;
  std::map<std::string, double> indicators;   // absent key = missing response
  std::map<std::string, std::string> labels;  // categorical columns before encoding
};

struct Dataset {
  std::vector<Observation> observations;
  std::vector<VarDef> dictionary;  // declaration order is the column order on write
  std::vector<Alternative> alternatives;

  std::size_t size() const { return observations.size(); }
  const VarDef* find_variable(const std::string& name) const;
  bool has_variable(const std::string& name) const { return find_variable(name) != nullptr; }
  // Numeric column (covariate or indicator); missing indicator cells come back
  // with present=false. Throws SchemaError for unknown names.
  void column(const std::string& name, std::vector<double>& values,
              std::vector<unsigned char>& present) const;
  std::vector<double> column(const std::string& name) const;  // requires no missing cells
  int alternative_position(int index) const;                  // -1 if unknown
};

// FNV-1a 64-bit, used for opaque ids and input-manifest hashes.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string fnv1a64_hex(const std::string& text);

Dataset load_csv(const std::string& path, const Schema& schema);
void write_csv(const Dataset& data, const std::string& path);

// Inner join on id; keeps exactly the ids present in both tables. Columns are
// unioned; a column present on both sides must agree value-for-value per id.
Dataset fuse(const Dataset& a, const Dataset& b);

// One dummy-encoding rule: each category of `source` maps to a 0/1 target
// column, or to "" for reference categories that produce no dummy.
struct EncodingRule {
  std::string source;
  std::vector<std::pair<std::string, std::string>> mapping;
};

// Expands categorical columns into named 0/1 dummies. Idempotent: sources are
// kept, so re-applying the rules recomputes identical columns.
Dataset encode_dummies(const Dataset& raw, const std::vector<EncodingRule>& rules);

}  // namespace hychoice
