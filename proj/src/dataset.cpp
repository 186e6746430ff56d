#include "hychoice/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hychoice/errors.hpp"

namespace hychoice {

const char* var_kind_name(VarKind kind) {
  switch (kind) {
    case VarKind::Binary: return "binary";
    case VarKind::Continuous: return "continuous";
    case VarKind::Likert: return "likert";
    case VarKind::Categorical: return "categorical";
  }
  return "?";
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(text.data(), text.size())));
  return std::string(buf);
}

const VarDef* Dataset::find_variable(const std::string& name) const {
  for (const auto& v : dictionary)
    if (v.name == name) return &v;
  return nullptr;
}

void Dataset::column(const std::string& name, std::vector<double>& values,
                     std::vector<unsigned char>& present) const {
  const VarDef* def = find_variable(name);
  if (!def) throw SchemaError("unknown variable '" + name + "'");
  values.assign(observations.size(), 0.0);
  present.assign(observations.size(), 0);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& obs = observations[i];
    const auto& table = (def->kind == VarKind::Likert) ? obs.indicators : obs.covariates;
    auto it = table.find(name);
    if (it != table.end()) {
      values[i] = it->second;
      present[i] = 1;
    }
  }
}

std::vector<double> Dataset::column(const std::string& name) const {
  std::vector<double> values;
  std::vector<unsigned char> present;
  column(name, values, present);
  for (std::size_t i = 0; i < present.size(); ++i)
    if (!present[i])
      throw SchemaError("variable '" + name + "' is missing in row " + std::to_string(i + 1));
  return values;
}

int Dataset::alternative_position(int index) const {
  for (std::size_t j = 0; j < alternatives.size(); ++j)
    if (alternatives[j].index == index) return static_cast<int>(j);
  return -1;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& cell, const std::string& column, std::size_t row) {
  const std::string t = trim(cell);
  double out = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ParseError("column '" + column + "', data row " + std::to_string(row) +
                     ": cannot parse '" + cell + "' as a number");
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::string header_line;
  if (!std::getline(in, header_line)) throw ParseError("'" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(header_line);

  auto column_of = [&](const std::string& name) -> int {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (trim(header[j]) == name) return static_cast<int>(j);
    return -1;
  };
  auto require_column = [&](const std::string& name) -> int {
    int j = column_of(name);
    if (j < 0) throw SchemaError("'" + path + "' has no column '" + name + "'");
    return j;
  };

  const int key_col = schema.key.empty() ? -1 : require_column(schema.key);
  const int choice_col = schema.choice.empty() ? -1 : require_column(schema.choice);
  const int weight_col = schema.weight.empty() ? -1 : require_column(schema.weight);
  if (choice_col >= 0 && schema.alternatives.empty())
    throw SchemaError("choice column '" + schema.choice + "' declared without alternatives");
  std::vector<int> var_cols;
  for (const auto& v : schema.variables) var_cols.push_back(require_column(v.name));

  Dataset data;
  data.dictionary = schema.variables;
  data.alternatives = schema.alternatives;

  std::map<std::string, std::vector<std::size_t>> rows_by_id;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("'" + path + "', data row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    Observation obs;
    if (key_col >= 0) {
      const std::string raw = trim(cells[key_col]);
      if (raw.empty())
        throw SchemaError("'" + path + "', data row " + std::to_string(row) + ": empty key");
      obs.id = fnv1a64_hex(raw);
      rows_by_id[obs.id].push_back(row);
    } else {
      obs.id = "row-" + std::to_string(row);
    }
    if (choice_col >= 0) {
      obs.choice = static_cast<int>(parse_number(cells[choice_col], schema.choice, row));
      bool known = false;
      for (const auto& alt : schema.alternatives) known = known || alt.index == obs.choice;
      if (!known)
        throw SchemaError("column '" + schema.choice + "', data row " + std::to_string(row) +
                          ": choice value " + std::to_string(obs.choice) +
                          " is not a declared alternative");
    }
    if (weight_col >= 0) obs.weight = parse_number(cells[weight_col], schema.weight, row);

    for (std::size_t k = 0; k < schema.variables.size(); ++k) {
      const VarDef& v = schema.variables[k];
      const std::string cell = trim(cells[var_cols[k]]);
      switch (v.kind) {
        case VarKind::Categorical:
          obs.labels[v.name] = cell;
          break;
        case VarKind::Likert:
          if (!cell.empty()) obs.indicators[v.name] = parse_number(cell, v.name, row);
          break;
        case VarKind::Binary: {
          const double x = parse_number(cell, v.name, row);
          if (x != 0.0 && x != 1.0)
            throw SchemaError("column '" + v.name + "', data row " + std::to_string(row) +
                              ": binary value must be 0 or 1, found " + cell);
          obs.covariates[v.name] = x;
          break;
        }
        case VarKind::Continuous:
          obs.covariates[v.name] = parse_number(cell, v.name, row);
          break;
      }
    }
    data.observations.push_back(std::move(obs));
  }

  for (const auto& [id, rows] : rows_by_id) {
    if (rows.size() > 1) {
      std::string where;
      for (std::size_t i = 0; i < rows.size(); ++i)
        where += (i ? " and " : "") + std::to_string(rows[i]);
      throw SchemaError("'" + path + "': key column '" + schema.key +
                        "' repeats at data rows " + where);
    }
  }
  return data;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");

  out << "id,choice";
  for (const auto& v : data.dictionary)
    if (v.kind != VarKind::Categorical) out << ',' << v.name;
  out << '\n';

  char buf[32];
  auto format = [&](double x) -> const char* {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  };
  for (const auto& obs : data.observations) {
    out << obs.id << ',' << obs.choice;
    for (const auto& v : data.dictionary) {
      if (v.kind == VarKind::Categorical) continue;
      out << ',';
      const auto& table = (v.kind == VarKind::Likert) ? obs.indicators : obs.covariates;
      auto it = table.find(v.name);
      if (it != table.end()) out << format(it->second);
    }
    out << '\n';
  }
}

Dataset fuse(const Dataset& a, const Dataset& b) {
  std::map<std::string, const Observation*> b_by_id;
  for (const auto& obs : b.observations) b_by_id[obs.id] = &obs;

  Dataset fused;
  fused.dictionary = a.dictionary;
  for (const auto& v : b.dictionary) {
    const VarDef* have = fused.find_variable(v.name);
    if (!have) {
      fused.dictionary.push_back(v);
    } else if (have->kind != v.kind) {
      throw FusionError("variable '" + v.name + "' is " + var_kind_name(have->kind) +
                        " in one table and " + var_kind_name(v.kind) + " in the other");
    }
  }
  fused.alternatives = a.alternatives.empty() ? b.alternatives : a.alternatives;
  if (!a.alternatives.empty() && !b.alternatives.empty()) {
    if (a.alternatives.size() != b.alternatives.size())
      throw FusionError("tables declare different alternative sets");
    for (std::size_t j = 0; j < a.alternatives.size(); ++j)
      if (a.alternatives[j].index != b.alternatives[j].index)
        throw FusionError("tables declare different alternative sets");
  }

  std::vector<std::string> conflicts;
  std::vector<Observation> merged;
  for (const auto& oa : a.observations) {
    auto hit = b_by_id.find(oa.id);
    if (hit == b_by_id.end()) continue;
    const Observation& ob = *hit->second;
    Observation m = oa;
    bool clash = false;
    auto merge_map = [&](auto& dst, const auto& src) {
      for (const auto& [name, value] : src) {
        auto it = dst.find(name);
        if (it == dst.end())
          dst[name] = value;
        else if (it->second != value)
          clash = true;
      }
    };
    merge_map(m.covariates, ob.covariates);
    merge_map(m.indicators, ob.indicators);
    merge_map(m.labels, ob.labels);
    if (m.choice == 0)
      m.choice = ob.choice;
    else if (ob.choice != 0 && ob.choice != m.choice)
      clash = true;
    if (clash) {
      conflicts.push_back(oa.id);
      continue;
    }
    merged.push_back(std::move(m));
  }
  if (!conflicts.empty()) {
    std::string ids;
    for (std::size_t i = 0; i < conflicts.size(); ++i) ids += (i ? ", " : "") + conflicts[i];
    throw FusionError("tables disagree on shared columns for ids: " + ids);
  }

  // Sort by id so fuse(a, b) == fuse(b, a) observation-for-observation.
  std::sort(merged.begin(), merged.end(),
            [](const Observation& x, const Observation& y) { return x.id < y.id; });
  fused.observations = std::move(merged);
  return fused;
}

Dataset encode_dummies(const Dataset& raw, const std::vector<EncodingRule>& rules) {
  Dataset out = raw;
  for (const auto& rule : rules) {
    const VarDef* src = out.find_variable(rule.source);
    if (!src) throw SchemaError("encoding rule refers to unknown column '" + rule.source + "'");
    if (src->kind != VarKind::Categorical)
      throw SchemaError("encoding rule source '" + rule.source + "' is not categorical");

    std::vector<std::string> targets;  // declaration order, unique, no ""
    for (const auto& [cat, dummy] : rule.mapping) {
      (void)cat;
      if (!dummy.empty() && std::find(targets.begin(), targets.end(), dummy) == targets.end())
        targets.push_back(dummy);
    }
    for (const auto& t : targets)
      if (!out.has_variable(t)) out.dictionary.push_back({t, VarKind::Binary});

    for (auto& obs : out.observations) {
      auto lab = obs.labels.find(rule.source);
      if (lab == obs.labels.end())
        throw SchemaError("observation " + obs.id + " has no value for '" + rule.source + "'");
      const std::string& category = lab->second;
      const auto hit = std::find_if(rule.mapping.begin(), rule.mapping.end(),
                                    [&](const auto& m) { return m.first == category; });
      if (hit == rule.mapping.end())
        throw EncodingError("column '" + rule.source + "': category '" + category +
                            "' is outside the rule's declared set (observation " + obs.id + ")");
      for (const auto& t : targets) obs.covariates[t] = (t == hit->second) ? 1.0 : 0.0;
    }
  }
  return out;
}

}  // namespace hychoice
