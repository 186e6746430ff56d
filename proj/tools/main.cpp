#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hychoice/binning.hpp"
#include "hychoice/dataset.hpp"
#include "hychoice/errors.hpp"
#include "hychoice/estimator.hpp"
#include "hychoice/factors.hpp"
#include "hychoice/presets.hpp"
#include "hychoice/report.hpp"
#include "hychoice/specfile.hpp"
#include "hychoice/stats.hpp"
#include "hychoice/synth.hpp"

namespace {

using namespace hychoice;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": cannot parse '" + text + "' as a number");
  }
}

std::vector<std::string> read_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
  return split(line, ',');
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
}

// ---------------------------------------------------------------- prepare --

struct BinRule {
  std::string column;
  std::vector<std::string> labels;  // cluster order; "" = reference level
  bool auto_k = false;
  int k = 0;  // 0 = number of labels
  std::uint64_t seed = 0;
};

struct PrepareRules {
  std::string key_column;
  std::string choice_column;
  std::vector<Alternative> alternatives;
  std::vector<std::string> likert;
  std::vector<BinRule> bins;
  std::vector<EncodingRule> encodings;
};

PrepareRules parse_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  PrepareRules rules;
  std::string line, section;
  int line_no = 0;
  auto where = [&] { return "rules line " + std::to_string(line_no); };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(where() + ": unterminated section");
      section = trim(t.substr(1, t.size() - 2));
      if (section.rfind("bin.", 0) == 0) {
        BinRule rule;
        rule.column = section.substr(4);
        rules.bins.push_back(rule);
      } else if (section.rfind("encode.", 0) == 0) {
        EncodingRule rule;
        rule.source = section.substr(7);
        rules.encodings.push_back(rule);
      } else if (section != "key" && section != "choice" &&
                 section != "alternatives" && section != "likert") {
        throw ParseError(where() + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(where() + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (section == "key" && key == "column") {
      rules.key_column = value;
    } else if (section == "choice" && key == "column") {
      rules.choice_column = value;
    } else if (section == "alternatives") {
      rules.alternatives.push_back(
          {static_cast<int>(parse_number(key, where())), value});
    } else if (section == "likert" && key == "columns") {
      rules.likert = split(value, ',');
    } else if (section.rfind("bin.", 0) == 0) {
      BinRule& rule = rules.bins.back();
      if (key == "labels") {
        rule.labels = split(value, ',');
      } else if (key == "k") {
        if (value == "auto")
          rule.auto_k = true;
        else
          rule.k = static_cast<int>(parse_number(value, where()));
      } else if (key == "seed") {
        rule.seed = static_cast<std::uint64_t>(parse_number(value, where()));
      } else {
        throw ParseError(where() + ": unknown bin key '" + key + "'");
      }
    } else if (section.rfind("encode.", 0) == 0) {
      rules.encodings.back().mapping.emplace_back(key, value);
    } else {
      throw ParseError(where() + ": key '" + key + "' outside a known section");
    }
  }
  if (rules.key_column.empty())
    throw ParseError("rules file declares no [key] column");
  for (const auto& rule : rules.bins)
    if (rule.labels.empty())
      throw ParseError("bin rule for '" + rule.column + "' lists no labels");
  return rules;
}

Schema infer_schema(const std::string& path, const PrepareRules& rules) {
  Schema schema;
  schema.key = rules.key_column;
  schema.alternatives = rules.alternatives;
  const std::set<std::string> likert(rules.likert.begin(), rules.likert.end());
  std::set<std::string> categorical;
  for (const auto& rule : rules.encodings) categorical.insert(rule.source);
  for (const auto& name : read_header(path)) {
    if (name == rules.key_column) continue;
    if (!rules.choice_column.empty() && name == rules.choice_column) {
      schema.choice = name;
      continue;
    }
    VarDef def{name, VarKind::Continuous};
    if (categorical.count(name)) def.kind = VarKind::Categorical;
    if (likert.count(name)) def.kind = VarKind::Likert;
    schema.variables.push_back(def);
  }
  return schema;
}

struct ColumnMoments {
  double mean = 0.0, sd = 0.0;
  int n = 0;
};

ColumnMoments moments(const std::vector<double>& values) {
  ColumnMoments m;
  m.n = static_cast<int>(values.size());
  if (m.n == 0) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / m.n;
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.sd = m.n > 1 ? std::sqrt(ss / (m.n - 1)) : 0.0;
  return m;
}

int cmd_prepare(const std::string& survey_path, const std::string& ops_path,
                const std::string& rules_path, const std::string& out_path,
                bool validate_flag, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const PrepareRules rules = parse_rules(rules_path);
  const Dataset survey = load_csv(survey_path, infer_schema(survey_path, rules));
  const Dataset operations = load_csv(ops_path, infer_schema(ops_path, rules));
  Dataset fused = fuse(survey, operations);

  for (const auto& rule : rules.bins) {
    const std::vector<double> full = operations.column(rule.column);
    int k = rule.k > 0 ? rule.k : static_cast<int>(rule.labels.size());
    if (rule.auto_k) {
      const ElbowResult elbow = elbow_select(full, 8, rule.seed);
      if (elbow.k != static_cast<int>(rule.labels.size()))
        throw SpecError("bin rule for '" + rule.column + "' lists " +
                        std::to_string(rule.labels.size()) +
                        " labels but the elbow method selects k = " +
                        std::to_string(elbow.k));
      k = elbow.k;
    }
    if (k != static_cast<int>(rule.labels.size()))
      throw SpecError("bin rule for '" + rule.column + "': k = " +
                      std::to_string(k) + " but " +
                      std::to_string(rule.labels.size()) + " labels listed");
    const ClusterResult clusters = kmeans_1d(full, k, rule.seed);
    const std::vector<int> level =
        bin_by_clusters(fused.column(rule.column), clusters.boundaries);
    for (std::size_t li = 0; li < rule.labels.size(); ++li) {
      if (rule.labels[li].empty()) continue;
      fused.dictionary.push_back({rule.labels[li], VarKind::Binary});
      for (std::size_t i = 0; i < fused.observations.size(); ++i)
        fused.observations[i].covariates[rule.labels[li]] =
            level[i] == static_cast<int>(li) ? 1.0 : 0.0;
    }
  }

  fused = encode_dummies(fused, rules.encodings);
  write_csv(fused, out_path);

  std::ostringstream report;
  report << "fused " << fused.size() << " observations ("
         << survey.size() << " survey, " << operations.size()
         << " operational)\n";
  if (validate_flag) {
    if (!rules.bins.empty()) {
      report << "\nOperational attributes, full sample vs fused sample "
                "(Welch t-test)\n";
      report << "Attribute        mean(full)  mean(fused)      t     df      p\n";
      for (const auto& rule : rules.bins) {
        const ColumnMoments a = moments(operations.column(rule.column));
        const ColumnMoments b = moments(fused.column(rule.column));
        const WelchResult w = welch_t(a.mean, a.sd, a.n, b.mean, b.sd, b.n);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-16s %10.3f  %10.3f  %6.3f %6.1f  %5.3f%s\n",
                      rule.column.c_str(), a.mean, b.mean, w.t, w.df, w.p,
                      w.p < 0.05 ? "  (differs at 95%)" : "");
        report << buf;
      }
    }
    if (!rules.encodings.empty()) {
      report << "\nCategorical distributions, fused sample vs survey shares "
                "(chi-square)\n";
      report << "Column                chi2   df      p\n";
      for (const auto& rule : rules.encodings) {
        std::vector<double> observed, expected;
        for (const auto& [category, dummy] : rule.mapping) {
          int in_fused = 0, in_survey = 0;
          for (const auto& obs : fused.observations) {
            const auto it = obs.labels.find(rule.source);
            if (it != obs.labels.end() && it->second == category) ++in_fused;
          }
          for (const auto& obs : survey.observations) {
            const auto it = obs.labels.find(rule.source);
            if (it != obs.labels.end() && it->second == category) ++in_survey;
          }
          observed.push_back(in_fused);
          expected.push_back(static_cast<double>(in_survey) / survey.size() *
                             fused.size());
        }
        const GofResult g = chi_square_gof(observed, expected);
        char buf[120];
        std::snprintf(buf, sizeof buf, "%-18s %7.3f  %3d  %5.3f%s\n",
                      rule.source.c_str(), g.statistic, g.df, g.p,
                      g.p < 0.05 ? "  (differs at 95%)" : "");
        report << buf;
      }
    }
  }
  std::cout << report.str();

  RunManifest manifest;
  manifest.command = command;
  manifest.inputs = {{survey_path, hash_file(survey_path)},
                     {ops_path, hash_file(ops_path)},
                     {rules_path, hash_file(rules_path)}};
  manifest.version = HYCHOICE_VERSION;
  manifest.outputs = {out_path, out_path + ".manifest.json"};
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(out_path + ".manifest.json", manifest_json(manifest));
  return 0;
}

// ---------------------------------------------------------------- factors --

int cmd_factors(const std::string& data_path, const std::string& indicators_flag,
                int n_factors, const std::string& out_path,
                const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> header = read_header(data_path);

  std::vector<std::string> indicators;
  if (!indicators_flag.empty()) {
    indicators = split(indicators_flag, ',');
  } else {
    for (const auto& name : header)
      if (name != "id" && name != "choice") indicators.push_back(name);
  }
  if (indicators.empty())
    throw SchemaError("'" + data_path + "' has no indicator columns");

  Schema schema;
  for (const auto& name : header)
    if (name == "id") schema.key = "id";
  for (const auto& name : indicators) schema.variables.push_back({name, VarKind::Likert});
  const Dataset data = load_csv(data_path, schema);

  std::ostringstream out;
  const int p = static_cast<int>(indicators.size());
  if (p == 1) {
    out << "Indicator        Type     Factor 1\n";
    out << "----------------------------------\n";
    char buf[80];
    std::snprintf(buf, sizeof buf, "%-16s %-8s %8.3f\n", indicators[0].c_str(),
                  "likert", 1.0);
    out << buf;
    out << "\nSingle indicator: trivial one-factor solution.\n";
  } else {
    const Eigen::MatrixXd corr = correlation_matrix(data, indicators);
    Retention retention;
    if (n_factors > 0) retention.count = n_factors;
    const FactorSolution sol = extract_factors(corr, retention);
    out << "Indicator        Type    ";
    for (int f = 0; f < sol.n_factors; ++f) {
      char head[24];
      std::snprintf(head, sizeof head, "  Factor %-2d", f + 1);
      out << head;
    }
    out << '\n';
    out << std::string(25 + 11 * sol.n_factors, '-') << '\n';
    for (int i = 0; i < p; ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%-16s %-8s", indicators[i].c_str(), "likert");
      out << buf;
      for (int f = 0; f < sol.n_factors; ++f) {
        std::snprintf(buf, sizeof buf, " %10.3f", sol.loadings(i, f));
        out << buf;
      }
      out << (sol.assignment[i] >= 0 ? "   <- factor " +
                                           std::to_string(sol.assignment[i] + 1)
                                     : "")
          << '\n';
    }
    out << "\nEigenvalues:";
    for (double e : sol.eigenvalues) {
      char buf[24];
      std::snprintf(buf, sizeof buf, " %.3f", e);
      out << buf;
    }
    out << '\n';
  }
  std::cout << out.str();

  if (!out_path.empty()) {
    write_text(out_path, out.str());
    RunManifest manifest;
    manifest.command = command;
    manifest.inputs = {{data_path, hash_file(data_path)}};
    manifest.version = HYCHOICE_VERSION;
    manifest.outputs = {out_path, out_path + ".manifest.json"};
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_text(out_path + ".manifest.json", manifest_json(manifest));
  }
  return 0;
}

// --------------------------------------------------------------- estimate --

ModelFamily parse_preset(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  const auto family = family_from_name(upper);
  if (!family)
    throw SpecError("unknown preset '" + name +
                    "' (expected MNL, LC, ICLV, or LC-ICLV)");
  return *family;
}

Schema schema_for_spec(const std::string& data_path, const ModelSpec& spec) {
  std::set<std::string> latent_names, indicator_names, covariates;
  for (const auto& lv : spec.latent_variables) {
    latent_names.insert(lv.name);
    for (const auto& eq : lv.measurements) indicator_names.insert(eq.indicator);
  }
  auto add_terms = [&](const std::vector<UtilityTerm>& terms) {
    for (const auto& term : terms)
      if (term.variable != kConstant && !latent_names.count(term.variable))
        covariates.insert(term.variable);
  };
  for (const auto& [alt, terms] : spec.utilities) add_terms(terms);
  for (const auto& cls : spec.classes) {
    add_terms(cls.membership);
    for (const auto& [alt, terms] : cls.utilities) add_terms(terms);
  }
  for (const auto& lv : spec.latent_variables)
    for (const auto& term : lv.structural)
      if (term.variable != kConstant) covariates.insert(term.variable);

  Schema schema;
  schema.choice = "choice";
  schema.alternatives = spec.alternatives;
  for (const auto& name : read_header(data_path))
    if (name == "id") schema.key = "id";
  for (const auto& name : covariates)
    schema.variables.push_back({name, VarKind::Continuous});
  for (const auto& name : indicator_names)
    schema.variables.push_back({name, VarKind::Likert});
  return schema;
}

int cmd_estimate(const std::string& spec_path, const std::string& data_path,
                 int draws, bool draws_given, std::uint64_t seed,
                 const std::string& preset_flag, const std::string& out_prefix,
                 int threads, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();

  if (spec_path.empty() == preset_flag.empty())
    throw SpecError("pass either a spec file or --preset");
  ModelSpec spec =
      spec_path.empty() ? preset(parse_preset(preset_flag)) : load_spec(spec_path);
  spec.seed = seed;
  if (draws_given || spec_path.empty()) spec.n_draws = draws;

  const Dataset data = load_csv(data_path, schema_for_spec(data_path, spec));
  const std::vector<Finding> findings = validate(spec, data);
  if (!findings.empty()) {
    for (const auto& f : findings)
      std::cerr << "error: " << f.code << ": " << f.message << '\n';
    return 2;
  }

  EstimateOptions options;
  options.threads = threads;
  if (!spec.latent_variables.empty() && spec.n_draws > 400)
    options.coarse_draws = 200;

  ModelSpec normalized = spec;
  {
    const ModelSpec reference = preset(spec.family);
    normalized.n_draws = reference.n_draws;
    normalized.seed = reference.seed;
  }
  const bool is_preset = specs_equal(normalized, preset(spec.family));

  EstimationResult result;
  if (is_preset) {
    std::vector<ModelSpec> presets;
    for (const ModelFamily family :
         {ModelFamily::MNL, ModelFamily::LC, ModelFamily::ICLV,
          ModelFamily::LC_ICLV}) {
      ModelSpec stage = preset(family);
      stage.n_draws = spec.n_draws;
      stage.seed = spec.seed;
      presets.push_back(std::move(stage));
    }
    PipelineResult pipeline = warm_start_pipeline(data, presets, options, spec.family);
    result = pipeline.for_family(spec.family);
    result.notes.insert(result.notes.begin(), pipeline.provenance.begin(),
                        pipeline.provenance.end());
  } else {
    ModelSpec run = spec;
    if (!run.latent_variables.empty()) seed_latent_starts(data, run);
    result = estimate(data, run, options);
  }

  const std::string title = std::string(family_name(spec.family)) + " estimation";
  const std::string human = human_report(result, title);
  std::cout << human;
  write_text(out_prefix + ".txt", human);
  write_text(out_prefix + ".tsv", machine_report(result));

  RunManifest manifest;
  manifest.command = command;
  if (!spec_path.empty())
    manifest.inputs.push_back({spec_path, hash_file(spec_path)});
  manifest.inputs.push_back({data_path, hash_file(data_path)});
  manifest.seed = seed;
  manifest.n_draws = spec.n_draws;
  manifest.version = HYCHOICE_VERSION;
  manifest.outputs = {out_prefix + ".txt", out_prefix + ".tsv",
                      out_prefix + ".manifest.json"};
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(out_prefix + ".manifest.json", manifest_json(manifest));

  if (!result.converged) {
    std::cerr << "error: estimation did not converge; partial report written\n";
    return 3;
  }
  return 0;
}

// --------------------------------------------------------------- simulate --

std::map<std::string, double> read_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::map<std::string, double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("truth line " + std::to_string(line_no) +
                       ": expected name<TAB>value");
    values[trim(line.substr(0, tab))] = parse_number(
        trim(line.substr(tab + 1)), "truth line " + std::to_string(line_no));
  }
  return values;
}

std::vector<MarginalGroup> read_marginals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<MarginalGroup> groups;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "[group]") {
      groups.emplace_back();
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos || groups.empty())
      throw ParseError("marginals line " + std::to_string(line_no) +
                       ": expected [group] sections of 'name = probability'");
    groups.back().names.push_back(trim(t.substr(0, eq)));
    groups.back().probs.push_back(
        parse_number(trim(t.substr(eq + 1)),
                     "marginals line " + std::to_string(line_no)));
  }
  return groups;
}

int cmd_simulate(const std::string& spec_path, const std::string& truth_path,
                 const std::string& out_path, int n, std::uint64_t seed,
                 const std::string& preset_flag, const std::string& marginals_path,
                 const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();

  GeneratorConfig config;
  config.n = n;
  config.seed = seed;
  if (!preset_flag.empty()) {
    if (!spec_path.empty() || !truth_path.empty())
      throw SpecError("--preset replaces the spec and truth files");
    const ModelFamily family = parse_preset(preset_flag);
    config.spec = preset(family);
    config.truth = reference_estimates(family);
    config.marginals = marginals_path.empty() ? reference_marginals()
                                              : read_marginals(marginals_path);
  } else {
    if (spec_path.empty() || truth_path.empty())
      throw SpecError("simulate needs a spec file and a truth file, or --preset");
    if (marginals_path.empty())
      throw SpecError("simulate needs --marginals when no preset is used");
    config.spec = load_spec(spec_path);
    config.truth = config.spec.parameters;
    for (const auto& [name, value] : read_truth(truth_path))
      if (config.truth.has(name)) config.truth.set_value(name, value);
    config.marginals = read_marginals(marginals_path);
  }

  GenerationReport report;
  const Dataset data = generate(config, &report);
  write_csv(data, out_path);
  std::cout << "wrote " << data.size() << " observations to " << out_path << '\n';
  if (report.indicator_draws > 0) {
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "clamped %lld of %lld indicator draws (%.1f%%)\n",
                  static_cast<long long>(report.clamped),
                  static_cast<long long>(report.indicator_draws),
                  100.0 * report.clamp_fraction);
    std::cout << buf;
  }

  RunManifest manifest;
  manifest.command = command;
  if (!spec_path.empty())
    manifest.inputs.push_back({spec_path, hash_file(spec_path)});
  if (!truth_path.empty())
    manifest.inputs.push_back({truth_path, hash_file(truth_path)});
  if (!marginals_path.empty())
    manifest.inputs.push_back({marginals_path, hash_file(marginals_path)});
  manifest.seed = seed;
  manifest.version = HYCHOICE_VERSION;
  manifest.outputs = {out_path, out_path + ".manifest.json"};
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(out_path + ".manifest.json", manifest_json(manifest));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Discrete choice estimation toolkit: data preparation, factor "
               "analysis, model estimation, synthetic data"};
  app.require_subcommand(1);

  // prepare
  std::string survey_path, ops_path, rules_path, prepare_out;
  bool validate_flag = false;
  CLI::App* prepare = app.add_subcommand(
      "prepare", "Fuse survey and operational CSVs, bin and encode columns");
  prepare->add_option("survey", survey_path, "survey CSV")->required();
  prepare->add_option("operations", ops_path, "operational CSV")->required();
  prepare->add_option("rules", rules_path, "preparation rules file")->required();
  prepare->add_option("out", prepare_out, "output CSV path")->required();
  prepare->add_flag("--validate", validate_flag,
                    "print representativeness tests (Welch t, chi-square)");

  // factors
  std::string factors_data, indicators_flag, factors_out;
  int n_factors = 0;
  CLI::App* factors = app.add_subcommand(
      "factors", "Correlation-based factor extraction on indicator columns");
  factors->add_option("data", factors_data, "data CSV")->required();
  factors->add_option("--indicators", indicators_flag,
                      "comma-separated indicator columns (default: all but "
                      "id/choice)");
  factors->add_option("--factors", n_factors,
                      "fixed number of factors (default: Kaiser rule)");
  factors->add_option("--out", factors_out, "write the table to a file");

  // estimate: SPEC DATA, or DATA alone with --preset
  std::vector<std::string> est_files;
  std::string est_preset, est_out = "report";
  int draws = 1000, threads = 1;
  std::uint64_t est_seed = 0;
  CLI::App* estimate_cmd = app.add_subcommand(
      "estimate", "Estimate a model by maximum (simulated) likelihood");
  estimate_cmd->add_option("files", est_files, "SPEC DATA, or DATA with --preset")
      ->expected(1, 2);
  estimate_cmd->add_option("--draws", draws, "simulation draws per observation");
  estimate_cmd->add_option("--seed", est_seed, "draw-scrambling seed")->required();
  estimate_cmd->add_option("--preset", est_preset,
                           "built-in spec: MNL, LC, ICLV, LC-ICLV");
  estimate_cmd->add_option("--out", est_out, "output prefix (default 'report')");
  estimate_cmd->add_option("--threads", threads, "worker threads");

  // simulate: SPEC TRUTH OUT, or OUT alone with --preset
  std::vector<std::string> sim_files;
  std::string sim_preset, sim_marginals;
  int sim_n = 0;
  std::uint64_t sim_seed = 0;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic dataset from a model at known values");
  simulate->add_option("files", sim_files, "SPEC TRUTH OUT, or OUT with --preset")
      ->expected(1, 3);
  simulate->add_option("--n", sim_n, "population size")->required();
  simulate->add_option("--seed", sim_seed, "generator seed")->required();
  simulate->add_option("--preset", sim_preset,
                       "built-in spec, truth, and marginals: MNL, LC, ICLV, "
                       "LC-ICLV");
  simulate->add_option("--marginals", sim_marginals,
                       "covariate marginals file ([group] sections)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(prepare))
      return cmd_prepare(survey_path, ops_path, rules_path, prepare_out,
                         validate_flag, command);
    if (app.got_subcommand(factors))
      return cmd_factors(factors_data, indicators_flag, n_factors, factors_out,
                         command);
    if (app.got_subcommand(estimate_cmd)) {
      if (est_files.size() == 2 && !est_preset.empty())
        throw SpecError("--preset replaces the spec file");
      const std::string spec_path = est_files.size() == 2 ? est_files[0] : "";
      const std::string data_path = est_files.back();
      return cmd_estimate(spec_path, data_path, draws,
                          estimate_cmd->count("--draws") > 0, est_seed,
                          est_preset, est_out, threads, command);
    }
    if (app.got_subcommand(simulate)) {
      if (sim_files.size() == 2)
        throw SpecError("simulate takes SPEC TRUTH OUT, or OUT with --preset");
      const bool with_files = sim_files.size() == 3;
      return cmd_simulate(with_files ? sim_files[0] : "",
                          with_files ? sim_files[1] : "", sim_files.back(),
                          sim_n, sim_seed, sim_preset, sim_marginals, command);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
