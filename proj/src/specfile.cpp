#include "hychoice/specfile.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hychoice/errors.hpp"

namespace hychoice {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& text, int line) {
  const std::string t = trim(text);
  double out = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ParseError("spec line " + std::to_string(line) + ": '" + text + "' is not a number");
  return out;
}

// "LHS * RHS" -> utility term
UtilityTerm parse_term(const std::string& text, int line) {
  const std::size_t star = text.find('*');
  if (star == std::string::npos)
    throw ParseError("spec line " + std::to_string(line) +
                     ": expected 'parameter * variable', got '" + trim(text) + "'");
  UtilityTerm term{trim(text.substr(0, star)), trim(text.substr(star + 1))};
  if (term.parameter.empty() || term.variable.empty())
    throw ParseError("spec line " + std::to_string(line) + ": empty parameter or variable");
  return term;
}

struct SpecBuilder {
  ModelSpec spec;
  std::map<std::string, std::vector<UtilityTerm>> plain_utilities;  // by alternative label/index
  std::map<std::string, std::map<std::string, std::vector<UtilityTerm>>> class_utilities;
  std::vector<std::string> class_order;
  std::map<std::string, std::vector<UtilityTerm>> class_membership;
  std::vector<std::string> latent_order;
  std::map<std::string, LatentVariableSpec> latents;

  ClassSpec* find_class(const std::string& label) {
    for (auto& c : spec.classes)
      if (c.label == label) return &c;
    return nullptr;
  }

  void touch_class(const std::string& label) {
    if (std::find(class_order.begin(), class_order.end(), label) == class_order.end())
      class_order.push_back(label);
  }

  LatentVariableSpec& touch_latent(const std::string& name) {
    if (!latents.count(name)) {
      latent_order.push_back(name);
      latents[name].name = name;
    }
    return latents[name];
  }

  int resolve_alternative(const std::string& token, int line) const {
    for (const auto& alt : spec.alternatives) {
      if (alt.label == token) return alt.index;
      if (std::to_string(alt.index) == token) return alt.index;
    }
    throw ParseError("spec line " + std::to_string(line) + ": unknown alternative '" + token +
                     "'");
  }

  ModelSpec finish() {
    if (spec.alternatives.empty())
      throw ParseError("spec declares no [alternatives] section");
    for (const auto& [token, terms] : plain_utilities)
      spec.utilities[resolve_alternative(token, 0)] = terms;
    for (const auto& label : class_order) {
      ClassSpec cls;
      cls.label = label;
      if (class_membership.count(label)) cls.membership = class_membership[label];
      for (const auto& [token, terms] : class_utilities[label])
        cls.utilities[resolve_alternative(token, 0)] = terms;
      spec.classes.push_back(std::move(cls));
    }
    for (const auto& name : latent_order) spec.latent_variables.push_back(latents[name]);
    return spec;
  }
};

}  // namespace

ModelSpec parse_spec(const std::string& text) {
  SpecBuilder b;
  bool family_set = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("spec line " + std::to_string(line_no) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ParseError("spec line " + std::to_string(line_no) + ": empty section name");
      // Sections must be registered even when they stay empty (reference class).
      const auto parts = split(section, '.');
      if (parts[0] == "class" && parts.size() >= 2) b.touch_class(parts[1]);
      if (parts[0] == "latent" && parts.size() >= 2) b.touch_latent(parts[1]);
      continue;
    }
    if (section.empty())
      throw ParseError("spec line " + std::to_string(line_no) + ": content before any section");

    const auto parts = split(section, '.');
    const std::size_t eq = line.find('=');

    if (section == "estimation") {
      if (eq == std::string::npos)
        throw ParseError("spec line " + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "family") {
        const auto fam = family_from_name(value);
        if (!fam)
          throw ParseError("spec line " + std::to_string(line_no) + ": unknown family '" +
                           value + "'");
        b.spec.family = *fam;
        family_set = true;
      } else if (key == "draws") {
        b.spec.n_draws = static_cast<int>(parse_double(value, line_no));
      } else if (key == "seed") {
        b.spec.seed = static_cast<std::uint64_t>(parse_double(value, line_no));
      } else {
        throw ParseError("spec line " + std::to_string(line_no) + ": unknown estimation key '" +
                         key + "'");
      }
    } else if (section == "alternatives") {
      if (eq == std::string::npos)
        throw ParseError("spec line " + std::to_string(line_no) + ": expected 'index = label'");
      Alternative alt;
      alt.index = static_cast<int>(parse_double(line.substr(0, eq), line_no));
      alt.label = trim(line.substr(eq + 1));
      if (alt.label.empty())
        throw ParseError("spec line " + std::to_string(line_no) + ": empty alternative label");
      b.spec.alternatives.push_back(alt);
    } else if (section == "parameters") {
      if (eq == std::string::npos)
        throw ParseError("spec line " + std::to_string(line_no) + ": expected 'name = value'");
      const std::string name = trim(line.substr(0, eq));
      std::string rest = trim(line.substr(eq + 1));
      bool fixed = false;
      if (rest.size() >= 5 && rest.substr(rest.size() - 5) == "fixed" &&
          (rest.size() == 5 || std::isspace(static_cast<unsigned char>(rest[rest.size() - 6])))) {
        fixed = true;
        rest = trim(rest.substr(0, rest.size() - 5));
      }
      b.spec.parameters.add(name, parse_double(rest, line_no), fixed);
    } else if (parts[0] == "utility" && parts.size() == 2) {
      b.plain_utilities[parts[1]].push_back(parse_term(line, line_no));
    } else if (parts[0] == "class" && parts.size() == 3 && parts[2] == "membership") {
      b.class_membership[parts[1]].push_back(parse_term(line, line_no));
    } else if (parts[0] == "class" && parts.size() == 4 && parts[2] == "utility") {
      b.class_utilities[parts[1]][parts[3]].push_back(parse_term(line, line_no));
    } else if (parts[0] == "latent" && parts.size() == 3 && parts[1].size() &&
               parts[2] == "structural") {
      const UtilityTerm term = parse_term(line, line_no);
      if (term.variable == kDisturbance)
        b.touch_latent(parts[1]).error_scale = term.parameter;
      else
        b.touch_latent(parts[1]).structural.push_back(term);
    } else if (parts[0] == "latent" && parts.size() == 4 && parts[2] == "measurement") {
      if (eq == std::string::npos)
        throw ParseError("spec line " + std::to_string(line_no) +
                         ": expected 'intercept|loading|scale = parameter'");
      LatentVariableSpec& lv = b.touch_latent(parts[1]);
      MeasurementEq* meq = nullptr;
      for (auto& m : lv.measurements)
        if (m.indicator == parts[3]) meq = &m;
      if (!meq) {
        lv.measurements.push_back({});
        meq = &lv.measurements.back();
        meq->indicator = parts[3];
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "intercept")
        meq->intercept = value;
      else if (key == "loading")
        meq->loading = value;
      else if (key == "scale")
        meq->scale = value;
      else
        throw ParseError("spec line " + std::to_string(line_no) + ": unknown measurement key '" +
                         key + "'");
    } else {
      throw ParseError("spec line " + std::to_string(line_no) + ": unknown section '" + section +
                       "'");
    }
  }

  if (!family_set && (!b.class_order.empty() || !b.latent_order.empty())) {
    // Family can be inferred, but an explicit declaration keeps files honest.
    throw ParseError("spec declares classes or latent variables without an [estimation] family");
  }
  return b.finish();
}

ModelSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str());
}

namespace {

std::string format_value(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_terms(std::ostringstream& out, const std::vector<UtilityTerm>& terms) {
  for (const auto& t : terms) out << t.parameter << " * " << t.variable << '\n';
}

}  // namespace

std::string serialize_spec(const ModelSpec& spec) {
  std::ostringstream out;
  out << "[estimation]\n";
  out << "family = " << family_name(spec.family) << '\n';
  out << "draws = " << spec.n_draws << '\n';
  out << "seed = " << spec.seed << "\n\n";

  out << "[alternatives]\n";
  for (const auto& alt : spec.alternatives) out << alt.index << " = " << alt.label << '\n';
  out << '\n';

  out << "[parameters]\n";
  for (const auto& p : spec.parameters.items()) {
    out << p.name << " = " << format_value(p.value);
    if (p.fixed) out << " fixed";
    out << '\n';
  }

  auto label_of = [&](int index) -> std::string {
    for (const auto& alt : spec.alternatives)
      if (alt.index == index) return alt.label;
    return std::to_string(index);
  };

  for (const auto& [alt, terms] : spec.utilities) {
    out << "\n[utility." << label_of(alt) << "]\n";
    write_terms(out, terms);
  }
  for (const auto& cls : spec.classes) {
    out << "\n[class." << cls.label << ".membership]\n";
    write_terms(out, cls.membership);
    for (const auto& [alt, terms] : cls.utilities) {
      out << "\n[class." << cls.label << ".utility." << label_of(alt) << "]\n";
      write_terms(out, terms);
    }
  }
  for (const auto& lv : spec.latent_variables) {
    out << "\n[latent." << lv.name << ".structural]\n";
    write_terms(out, lv.structural);
    if (!lv.error_scale.empty()) out << lv.error_scale << " * " << kDisturbance << '\n';
    for (const auto& eq : lv.measurements) {
      out << "\n[latent." << lv.name << ".measurement." << eq.indicator << "]\n";
      out << "intercept = " << eq.intercept << '\n';
      out << "loading = " << eq.loading << '\n';
      out << "scale = " << eq.scale << '\n';
    }
  }
  return out.str();
}

void save_spec(const ModelSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << serialize_spec(spec);
}

bool specs_equal(const ModelSpec& a, const ModelSpec& b) {
  auto terms_equal = [](const std::vector<UtilityTerm>& x, const std::vector<UtilityTerm>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].parameter != y[i].parameter || x[i].variable != y[i].variable) return false;
    return true;
  };
  auto util_maps_equal = [&](const std::map<int, std::vector<UtilityTerm>>& x,
                             const std::map<int, std::vector<UtilityTerm>>& y) {
    if (x.size() != y.size()) return false;
    for (auto ix = x.begin(), iy = y.begin(); ix != x.end(); ++ix, ++iy)
      if (ix->first != iy->first || !terms_equal(ix->second, iy->second)) return false;
    return true;
  };

  if (a.family != b.family || a.n_draws != b.n_draws || a.seed != b.seed) return false;
  if (a.alternatives.size() != b.alternatives.size()) return false;
  for (std::size_t i = 0; i < a.alternatives.size(); ++i)
    if (a.alternatives[i].index != b.alternatives[i].index ||
        a.alternatives[i].label != b.alternatives[i].label)
      return false;
  if (a.parameters.size() != b.parameters.size()) return false;
  for (std::size_t i = 0; i < a.parameters.size(); ++i) {
    const Parameter &pa = a.parameters[i], &pb = b.parameters[i];
    if (pa.name != pb.name || pa.value != pb.value || pa.fixed != pb.fixed) return false;
  }
  if (!util_maps_equal(a.utilities, b.utilities)) return false;
  if (a.classes.size() != b.classes.size()) return false;
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    if (a.classes[i].label != b.classes[i].label) return false;
    if (!terms_equal(a.classes[i].membership, b.classes[i].membership)) return false;
    if (!util_maps_equal(a.classes[i].utilities, b.classes[i].utilities)) return false;
  }
  if (a.latent_variables.size() != b.latent_variables.size()) return false;
  for (std::size_t i = 0; i < a.latent_variables.size(); ++i) {
    const LatentVariableSpec &la = a.latent_variables[i], &lb = b.latent_variables[i];
    if (la.name != lb.name || la.error_scale != lb.error_scale) return false;
    if (!terms_equal(la.structural, lb.structural)) return false;
    if (la.measurements.size() != lb.measurements.size()) return false;
    for (std::size_t j = 0; j < la.measurements.size(); ++j) {
      const MeasurementEq &ma = la.measurements[j], &mb = lb.measurements[j];
      if (ma.indicator != mb.indicator || ma.intercept != mb.intercept ||
          ma.loading != mb.loading || ma.scale != mb.scale)
        return false;
    }
  }
  return true;
}

}  // namespace hychoice
