#include "hychoice/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hychoice/dataset.hpp"
#include "hychoice/errors.hpp"

namespace hychoice {

namespace {

std::string sig3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string marker(const std::string& significance) {
  if (significance == "90%") return "*";
  if (significance == "none") return "**";
  return "";
}

}  // namespace

std::string human_report(const EstimationResult& result,
                         const std::string& title) {
  struct Row {
    std::string name, estimate, t;
  };
  std::vector<Row> rows;
  bool starred = false, double_starred = false;
  for (const auto& p : result.params.items()) {
    Row row{p.name, sig3(p.value), "fixed"};
    if (!p.fixed) {
      const auto t = result.robust_t.find(p.name);
      const auto s = result.significance.find(p.name);
      const std::string mark =
          s == result.significance.end() ? "" : marker(s->second);
      row.t = (t == result.robust_t.end() ? std::string("n/a") : sig3(t->second)) +
              mark;
      starred |= mark == "*";
      double_starred |= mark == "**";
    }
    rows.push_back(std::move(row));
  }

  std::size_t w_name = std::string("Parameter").size();
  std::size_t w_est = std::string("Estimate").size();
  std::size_t w_t = std::string("Rob. t-test").size();
  for (const auto& row : rows) {
    w_name = std::max(w_name, row.name.size());
    w_est = std::max(w_est, row.estimate.size());
    w_t = std::max(w_t, row.t.size());
  }

  std::ostringstream out;
  auto line = [&](const std::string& a, const std::string& b,
                  const std::string& c) {
    out << a << std::string(w_name - a.size() + 2, ' ')
        << std::string(w_est - b.size(), ' ') << b
        << std::string(w_t - c.size() + 2, ' ') << c << '\n';
  };
  out << title << '\n' << std::string(title.size(), '=') << '\n';
  line("Parameter", "Estimate", "Rob. t-test");
  out << std::string(w_name + w_est + w_t + 4, '-') << '\n';
  for (const auto& row : rows) line(row.name, row.estimate, row.t);
  if (starred)
    out << "* Not statistically significant at 95% confidence level\n";
  if (double_starred)
    out << "** Not statistically significant at 90% confidence level\n";

  out << '\n' << "Performance Indicators" << '\n';
  out << "Number of parameters    " << result.n_free << '\n';
  out << "Initial log-likelihood  " << sig3(result.ll_initial) << '\n';
  out << "Final log-likelihood    " << sig3(result.ll_final) << '\n';
  out << "Rho-square-bar          " << sig3(result.rho_square_bar) << '\n';
  if (!result.converged)
    out << "\nWARNING: estimation stopped without convergence (gradient max-norm "
        << sig3(result.gradient_norm) << ")\n";
  for (const auto& note : result.notes) out << "note: " << note << '\n';
  return out.str();
}

std::string machine_report(const EstimationResult& result) {
  std::ostringstream out;
  for (const auto& p : result.params.items())
    out << p.name << '\t' << full(p.value) << '\n';
  for (const auto& p : result.params.items()) {
    if (p.fixed) continue;
    const auto se = result.robust_se.find(p.name);
    if (se != result.robust_se.end())
      out << "se_" << p.name << '\t' << full(se->second) << '\n';
    const auto t = result.robust_t.find(p.name);
    if (t != result.robust_t.end())
      out << "t_" << p.name << '\t' << full(t->second) << '\n';
  }
  out << "n_parameters\t" << result.n_free << '\n';
  out << "ll_initial\t" << full(result.ll_initial) << '\n';
  out << "ll_final\t" << full(result.ll_final) << '\n';
  out << "rho_square_bar\t" << full(result.rho_square_bar) << '\n';
  out << "iterations\t" << result.iterations << '\n';
  out << "converged\t" << (result.converged ? 1 : 0) << '\n';
  out << "gradient_norm\t" << full(result.gradient_norm) << '\n';
  return out.str();
}

std::string manifest_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["inputs"] = nlohmann::json::array();
  for (const auto& input : manifest.inputs)
    j["inputs"].push_back({{"path", input.path}, {"fnv1a64", input.hash}});
  j["seed"] = manifest.seed;
  j["n_draws"] = manifest.n_draws;
  j["version"] = manifest.version;
  j["wall_seconds"] = manifest.wall_seconds;
  j["outputs"] = manifest.outputs;
  return j.dump(2) + "\n";
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return fnv1a64_hex(bytes.str());
}

}  // namespace hychoice
