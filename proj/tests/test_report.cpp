#include <doctest.h>

#include <cstdio>
#include <json.hpp>
#include <string>

#include "helpers.hpp"
#include "hychoice/dataset.hpp"
#include "hychoice/errors.hpp"
#include "hychoice/report.hpp"

using namespace hychoice;
using testutil::TempFile;

namespace {

EstimationResult sample_result() {
  EstimationResult result;
  result.params.add("ASC_ODT", -2.6123456789012345);
  result.params.add("B_WAITING", 0.1);
  result.params.add("B_ANCHOR", 1.0, true);
  result.robust_se = {{"ASC_ODT", 0.5}, {"B_WAITING", 0.08}};
  result.robust_t = {{"ASC_ODT", -5.22}, {"B_WAITING", 1.25}};
  result.significance = {{"ASC_ODT", "95%"}, {"B_WAITING", "none"}};
  result.ll_initial = -79.1;
  result.ll_final = -47.49;
  result.rho_square_bar = 0.2606;
  result.n_free = 2;
  result.iterations = 12;
  result.converged = true;
  result.gradient_norm = 3e-7;
  return result;
}

std::string g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

TEST_CASE("machine_report is tab-separated, full-precision, and ordered") {
  const EstimationResult result = sample_result();
  const std::string report = machine_report(result);

  // Parameters in declaration order, then standard errors for free ones only.
  const auto pos_asc = report.find("ASC_ODT\t");
  const auto pos_wait = report.find("B_WAITING\t");
  const auto pos_anchor = report.find("B_ANCHOR\t");
  const auto pos_se = report.find("se_ASC_ODT\t");
  REQUIRE(pos_asc != std::string::npos);
  REQUIRE(pos_wait != std::string::npos);
  REQUIRE(pos_anchor != std::string::npos);
  REQUIRE(pos_se != std::string::npos);
  CHECK(pos_asc < pos_wait);
  CHECK(pos_wait < pos_anchor);
  CHECK(pos_anchor < pos_se);
  CHECK(report.find("se_B_ANCHOR") == std::string::npos);
  CHECK(report.find("t_B_ANCHOR") == std::string::npos);

  // %.17g keeps the full double; 0.1 prints with its binary tail visible.
  CHECK(report.find("B_WAITING\t0.10000000000000001\n") != std::string::npos);
  CHECK(report.find("ASC_ODT\t" + g17(-2.6123456789012345) + "\n") !=
        std::string::npos);

  CHECK(report.find("ll_initial\t" + g17(-79.1) + "\n") != std::string::npos);
  CHECK(report.find("n_parameters\t2\n") != std::string::npos);
  CHECK(report.find("converged\t1\n") != std::string::npos);
  CHECK(report.find("iterations\t12\n") != std::string::npos);

  CHECK(machine_report(result) == report);  // byte-stable
}

TEST_CASE("human_report prints the published table shape") {
  const EstimationResult result = sample_result();
  const std::string report = human_report(result, "MNL estimation");

  CHECK(report.find("MNL estimation") != std::string::npos);
  CHECK(report.find("Parameter") != std::string::npos);
  CHECK(report.find("Estimate") != std::string::npos);
  CHECK(report.find("Rob. t-test") != std::string::npos);
  // 3-significant-figure display rounding.
  CHECK(report.find("-2.61") != std::string::npos);
  CHECK(report.find("-5.22") != std::string::npos);
  CHECK(report.find("fixed") != std::string::npos);
  // B_WAITING misses both confidence levels and carries the double marker.
  CHECK(report.find("1.25**") != std::string::npos);
  CHECK(report.find("** Not statistically significant at 90% confidence level") !=
        std::string::npos);
  // No parameter sits in the 90-95% band, so the single-star footnote is absent.
  CHECK(report.find("* Not statistically significant at 95% confidence level") ==
        std::string::npos);
  CHECK(report.find("Performance Indicators") != std::string::npos);
  CHECK(report.find("Number of parameters    2") != std::string::npos);
  CHECK(report.find("WARNING") == std::string::npos);

  EstimationResult stalled = result;
  stalled.converged = false;
  stalled.gradient_norm = 0.5;
  CHECK(human_report(stalled, "t").find("WARNING") != std::string::npos);

  EstimationResult marginal = result;
  marginal.significance["B_WAITING"] = "90%";
  const std::string marked = human_report(marginal, "t");
  CHECK(marked.find("1.25*") != std::string::npos);
  CHECK(marked.find("1.25**") == std::string::npos);
  CHECK(marked.find("* Not statistically significant at 95% confidence level") !=
        std::string::npos);
}

TEST_CASE("manifest_json is valid JSON with the reproducibility fields") {
  RunManifest manifest;
  manifest.command = "hychoice estimate --preset MNL data.csv --seed 7";
  manifest.inputs = {{"data.csv", "deadbeefdeadbeef"}};
  manifest.seed = 7;
  manifest.n_draws = 1000;
  manifest.version = "0.1.0";
  manifest.wall_seconds = 1.25;
  manifest.outputs = {"report.txt", "report.tsv"};

  const nlohmann::json j = nlohmann::json::parse(manifest_json(manifest));
  CHECK(j.at("command").get<std::string>() == manifest.command);
  CHECK(j.at("seed").get<std::uint64_t>() == 7);
  CHECK(j.at("n_draws").get<int>() == 1000);
  CHECK(j.at("version").get<std::string>() == "0.1.0");
  CHECK(j.at("wall_seconds").get<double>() == doctest::Approx(1.25));
  REQUIRE(j.at("inputs").size() == 1);
  CHECK(j.at("inputs")[0].at("path").get<std::string>() == "data.csv");
  CHECK(j.at("inputs")[0].at("fnv1a64").get<std::string>() == "deadbeefdeadbeef");
  REQUIRE(j.at("outputs").size() == 2);
  CHECK(j.at("outputs")[1].get<std::string>() == "report.tsv");
}

TEST_CASE("hash_file hashes the raw bytes") {
  TempFile file("hash-me.txt", "abc");
  CHECK(hash_file(file.path()) == fnv1a64_hex("abc"));
  CHECK_THROWS_AS(hash_file("/nonexistent/file"), ParseError);
}
