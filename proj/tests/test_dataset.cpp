#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "helpers.hpp"
#include "hychoice/dataset.hpp"
#include "hychoice/errors.hpp"

using namespace hychoice;
using testutil::TempFile;

TEST_CASE("fnv1a64 matches the published reference vectors") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("a") != fnv1a64_hex("b"));
}

namespace {

Schema survey_schema() {
  Schema schema;
  schema.key = "rider";
  schema.choice = "mode";
  schema.alternatives = {{1, "FRT"}, {2, "ODT"}, {3, "Indifferent"}};
  schema.variables = {{"Male", VarKind::Binary},
                      {"WaitMin", VarKind::Continuous},
                      {"Purpose", VarKind::Categorical},
                      {"RELIA_IMPO", VarKind::Likert}};
  return schema;
}

constexpr const char* kSurveyCsv =
    "rider,mode,Male,WaitMin,Purpose,RELIA_IMPO\n"
    "A1,1,1,12.5,work,4\n"
    "A2,2,0,3,shop,\n"
    "A3,3,1,7.25,work,2\n";

}  // namespace

TEST_CASE("load_csv parses kinds, hashes keys, and keeps likert cells optional") {
  TempFile csv("survey.csv", kSurveyCsv);
  const Dataset data = load_csv(csv.path(), survey_schema());

  REQUIRE(data.size() == 3);
  CHECK(data.observations[0].id == fnv1a64_hex("A1"));
  CHECK(data.observations[0].id != "A1");
  CHECK(data.observations[1].id == fnv1a64_hex("A2"));

  CHECK(data.observations[0].choice == 1);
  CHECK(data.observations[1].choice == 2);
  CHECK(data.observations[2].choice == 3);

  CHECK(data.observations[0].covariates.at("Male") == 1.0);
  CHECK(data.observations[1].covariates.at("WaitMin") == doctest::Approx(3.0));
  CHECK(data.observations[0].labels.at("Purpose") == "work");
  CHECK(data.observations[1].labels.at("Purpose") == "shop");

  CHECK(data.observations[0].indicators.at("RELIA_IMPO") == 4.0);
  CHECK(data.observations[1].indicators.count("RELIA_IMPO") == 0);

  std::vector<double> values;
  std::vector<unsigned char> present;
  data.column("RELIA_IMPO", values, present);
  CHECK(present == std::vector<unsigned char>{1, 0, 1});
  CHECK(values[2] == 2.0);
  CHECK_THROWS_AS(data.column("RELIA_IMPO"), SchemaError);
  CHECK(data.column("Male") == std::vector<double>{1, 0, 1});
  CHECK_THROWS_AS(data.column("NoSuchColumn"), SchemaError);
  CHECK(data.has_variable("WaitMin"));
  CHECK_FALSE(data.has_variable("NoSuchColumn"));
  CHECK(data.alternative_position(2) == 1);
  CHECK(data.alternative_position(7) == -1);
}

TEST_CASE("load_csv rejects malformed input with actionable messages") {
  const Schema schema = survey_schema();

  SUBCASE("duplicate key") {
    TempFile csv("dup.csv",
                 "rider,mode,Male,WaitMin,Purpose,RELIA_IMPO\n"
                 "A1,1,1,1,work,4\n"
                 "A1,2,0,2,shop,3\n");
    CHECK_THROWS_AS(load_csv(csv.path(), schema), SchemaError);
  }
  SUBCASE("unknown choice code") {
    TempFile csv("badchoice.csv",
                 "rider,mode,Male,WaitMin,Purpose,RELIA_IMPO\n"
                 "A1,4,1,1,work,4\n");
    CHECK_THROWS_AS(load_csv(csv.path(), schema), SchemaError);
  }
  SUBCASE("non-binary value in a binary column") {
    TempFile csv("badbinary.csv",
                 "rider,mode,Male,WaitMin,Purpose,RELIA_IMPO\n"
                 "A1,1,2,1,work,4\n");
    CHECK_THROWS_AS(load_csv(csv.path(), schema), SchemaError);
  }
  SUBCASE("missing declared column is named") {
    TempFile csv("nocol.csv",
                 "rider,mode,Male,Purpose,RELIA_IMPO\n"
                 "A1,1,1,work,4\n");
    CHECK_THROWS_WITH_AS(load_csv(csv.path(), schema),
                         doctest::Contains("WaitMin"), SchemaError);
  }
  SUBCASE("ragged row") {
    TempFile csv("ragged.csv",
                 "rider,mode,Male,WaitMin,Purpose,RELIA_IMPO\n"
                 "A1,1,1,1,work\n");
    CHECK_THROWS_AS(load_csv(csv.path(), schema), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_csv("/nonexistent/nowhere.csv", schema), ParseError);
  }
}

TEST_CASE("write_csv then load_csv reproduces the numeric content") {
  TempFile src("roundtrip-src.csv", kSurveyCsv);
  const Dataset data = load_csv(src.path(), survey_schema());

  TempFile out("roundtrip-out.csv");
  write_csv(data, out.path());

  Schema reload;
  reload.key = "id";
  reload.choice = "choice";
  reload.alternatives = survey_schema().alternatives;
  reload.variables = {{"Male", VarKind::Binary},
                      {"WaitMin", VarKind::Continuous},
                      {"RELIA_IMPO", VarKind::Likert}};
  const Dataset back = load_csv(out.path(), reload);

  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back.observations[i].choice == data.observations[i].choice);
    CHECK(back.observations[i].covariates.at("Male") ==
          data.observations[i].covariates.at("Male"));
    CHECK(back.observations[i].covariates.at("WaitMin") ==
          data.observations[i].covariates.at("WaitMin"));
    CHECK(back.observations[i].indicators.count("RELIA_IMPO") ==
          data.observations[i].indicators.count("RELIA_IMPO"));
  }
  CHECK(back.observations[0].indicators.at("RELIA_IMPO") == 4.0);
}

namespace {

Dataset table(const std::vector<std::string>& ids,
              const std::string& column, const std::vector<double>& values) {
  Dataset data;
  data.dictionary = {{column, VarKind::Continuous}};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Observation obs;
    obs.id = ids[i];
    obs.covariates[column] = values[i];
    data.observations.push_back(std::move(obs));
  }
  return data;
}

}  // namespace

TEST_CASE("fuse inner-joins on id and unions columns") {
  Dataset a = table({"r1", "r2", "r3"}, "Male", {1, 0, 1});
  Dataset b = table({"r2", "r3", "r4"}, "WaitMin", {5, 9, 2});

  const Dataset fused = fuse(a, b);
  REQUIRE(fused.size() == 2);
  CHECK(fused.has_variable("Male"));
  CHECK(fused.has_variable("WaitMin"));
  for (const auto& obs : fused.observations) {
    CHECK(obs.covariates.count("Male") == 1);
    CHECK(obs.covariates.count("WaitMin") == 1);
  }

  SUBCASE("shared columns must agree value-for-value") {
    Dataset b2 = b;
    b2.dictionary.push_back({"Male", VarKind::Continuous});
    b2.observations[0].covariates["Male"] = 1;  // r2 carries 0 in `a`
    b2.observations[1].covariates["Male"] = 1;
    b2.observations[2].covariates["Male"] = 0;
    CHECK_THROWS_AS(fuse(a, b2), FusionError);
  }
  SUBCASE("empty intersection yields an empty join") {
    const Dataset c = table({"x1"}, "WaitMin", {3});
    CHECK(fuse(a, c).size() == 0);
  }
  SUBCASE("argument order does not matter") {
    const Dataset ab = fuse(a, b);
    const Dataset ba = fuse(b, a);
    REQUIRE(ab.size() == ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
      CHECK(ab.observations[i].id == ba.observations[i].id);
      CHECK(ab.observations[i].covariates == ba.observations[i].covariates);
    }
  }
}

TEST_CASE("encode_dummies expands categories and is idempotent") {
  Dataset raw;
  raw.dictionary = {{"Purpose", VarKind::Categorical}};
  for (const std::string& label : {"work", "nonwork", "mixed", "work"}) {
    Observation obs;
    obs.id = "p" + std::to_string(raw.observations.size());
    obs.labels["Purpose"] = label;
    raw.observations.push_back(std::move(obs));
  }
  const EncodingRule rule{
      "Purpose", {{"work", "WorkTrip"}, {"nonwork", "NonworkTrip"}, {"mixed", ""}}};

  const Dataset encoded = encode_dummies(raw, {rule});
  REQUIRE(encoded.size() == 4);
  CHECK(encoded.has_variable("WorkTrip"));
  CHECK(encoded.has_variable("NonworkTrip"));
  CHECK(encoded.has_variable("Purpose"));  // source survives
  CHECK(encoded.column("WorkTrip") == std::vector<double>{1, 0, 0, 1});
  CHECK(encoded.column("NonworkTrip") == std::vector<double>{0, 1, 0, 0});
  CHECK(encoded.observations[2].labels.at("Purpose") == "mixed");

  const Dataset twice = encode_dummies(encoded, {rule});
  CHECK(twice.column("WorkTrip") == encoded.column("WorkTrip"));
  CHECK(twice.column("NonworkTrip") == encoded.column("NonworkTrip"));
  CHECK(twice.dictionary.size() == encoded.dictionary.size());

  SUBCASE("categories outside the rule are rejected") {
    Dataset bad = raw;
    bad.observations[1].labels["Purpose"] = "errand";
    CHECK_THROWS_WITH_AS(encode_dummies(bad, {rule}),
                         doctest::Contains("errand"), EncodingError);
  }
}
