#include "hychoice/presets.hpp"

#include <stdexcept>

namespace hychoice {

namespace {

std::vector<Alternative> case_alternatives() {
  return {{1, "FRT"}, {2, "ODT"}, {3, "Indifferent"}};
}

// Choice model of the pooled specification (shared by MNL and ICLV).
// FRT is the reference alternative: no constant of its own.
std::map<int, std::vector<UtilityTerm>> pooled_utilities() {
  std::map<int, std::vector<UtilityTerm>> u;
  u[1] = {{"B_ASSIGNED_TRIPS", "Assigned_H"},
          {"B_PURPOSE", "WorkTrip"},
          {"B_MODE", "FixedService"},
          {"B_INVEH", "InVeh_more"},
          {"B_WAITING", "Waiting_H"}};
  u[2] = {{"ASC_ODT", kConstant},
          {"B_ASSIGNED_TRIPS", "Assigned_L"},
          {"B_PURPOSE", "NonworkTrip"},
          {"B_MODE", "ActiveMode"},
          {"B_INVEH", "InVeh_less"},
          {"B_WAITING", "Waiting_L"},
          {"B_HHLD", "Hhld_H"},
          {"B_AGE", "MiddleAge"}};
  u[3] = {{"ASC_INDIFF", kConstant},
          {"B_EDU", "HigherEdu"},
          {"B_GENDER", "Male"}};
  return u;
}

void add_pooled_parameters(ParameterVector& p) {
  p.add("ASC_INDIFF", 0.0);
  p.add("ASC_ODT", 0.0);
  p.add("B_ASSIGNED_TRIPS", 0.0);
  p.add("B_PURPOSE", 0.0);
  p.add("B_MODE", 0.0);
  p.add("B_INVEH", 0.0);
  p.add("B_WAITING", 0.0);
  p.add("B_HHLD", 0.0);
  p.add("B_AGE", 0.0);
  p.add("B_EDU", 0.0);
  p.add("B_GENDER", 0.0);
}

// Two latent variables: time sensitivity (TIME_SEN) anchored on WAIT_IMPO,
// online-service satisfaction (ON_SERV_SAT) anchored on APP_INTER. Anchor
// equations are fixed at intercept 0, loading 1, scale 1 for identification.
std::vector<LatentVariableSpec> latent_block() {
  LatentVariableSpec ts;
  ts.name = "TIME_SEN";
  ts.structural = {{"A_CONS_TS", kConstant}, {"A_AGE_TS", "Young"},
                   {"A_INCOME_TS", "HighIncome"}, {"A_CAR_TS", "Car"},
                   {"A_HHLD_TS", "Hhld_L"},      {"A_GENDER_TS", "Male"},
                   {"A_MARITAL_TS", "Single"}};
  ts.error_scale = "S_TS";
  ts.measurements = {
      {"WAIT_IMPO", "A_WAIT_IMPO", "B_WAIT_IMPO", "S_WAIT_IMPO"},
      {"RELIA_IMPO", "A_RELIA_IMPO", "B_RELIA_IMPO", "S_RELIA_IMPO"},
      {"TIME_BUS", "A_TIME_BUS", "B_TIME_BUS", "S_TIME_BUS"},
      {"FLEXIBILITY", "A_FLEXIBILITY", "B_FLEXIBILITY", "S_FLEXIBILITY"}};

  LatentVariableSpec oss;
  oss.name = "ON_SERV_SAT";
  oss.structural = {{"A_CONS_OSS", kConstant},
                    {"A_AGE_OSS", "MiddleAge"},
                    {"A_INCOME_OSS", "LowIncome"},
                    {"A_EDU_OSS", "Sec_school"}};
  oss.error_scale = "S_OSS";
  oss.measurements = {
      {"APP_INTER", "A_APP_INTER", "B_APP_INTER", "S_APP_INTER"},
      {"WEB_INTER", "A_WEB_INTER", "B_WEB_INTER", "S_WEB_INTER"},
      {"AVAIL_SERV", "A_AVAIL_SERV", "B_AVAIL_SERV", "S_AVAIL_SERV"}};
  return {ts, oss};
}

void add_latent_parameters(ParameterVector& p) {
  p.add("A_CONS_TS", 0.0);
  p.add("A_AGE_TS", 0.0);
  p.add("A_INCOME_TS", 0.0);
  p.add("A_CAR_TS", 0.0);
  p.add("A_HHLD_TS", 0.0);
  p.add("A_GENDER_TS", 0.0);
  p.add("A_MARITAL_TS", 0.0);
  p.add("S_TS", 1.0);
  p.add("A_CONS_OSS", 0.0);
  p.add("A_AGE_OSS", 0.0);
  p.add("A_INCOME_OSS", 0.0);
  p.add("A_EDU_OSS", 0.0);
  p.add("S_OSS", 1.0);
  p.add("A_WAIT_IMPO", 0.0, true);
  p.add("B_WAIT_IMPO", 1.0, true);
  p.add("S_WAIT_IMPO", 1.0, true);
  p.add("A_RELIA_IMPO", 0.0);
  p.add("B_RELIA_IMPO", 0.0);
  p.add("S_RELIA_IMPO", 1.0);
  p.add("A_TIME_BUS", 0.0);
  p.add("B_TIME_BUS", 0.0);
  p.add("S_TIME_BUS", 1.0);
  p.add("A_FLEXIBILITY", 0.0);
  p.add("B_FLEXIBILITY", 0.0);
  p.add("S_FLEXIBILITY", 1.0);
  p.add("A_APP_INTER", 0.0, true);
  p.add("B_APP_INTER", 1.0, true);
  p.add("S_APP_INTER", 1.0, true);
  p.add("A_WEB_INTER", 0.0);
  p.add("B_WEB_INTER", 0.0);
  p.add("S_WEB_INTER", 1.0);
  p.add("A_AVAIL_SERV", 0.0);
  p.add("B_AVAIL_SERV", 0.0);
  p.add("S_AVAIL_SERV", 1.0);
}

// Captive class carries the membership terms; NonCaptive is the reference.
// with_latent adds the class-specific latent coefficients on ODT and, for the
// captive class, drops the unassigned-trips term from FRT.
std::vector<ClassSpec> class_block(bool with_latent) {
  ClassSpec captive;
  captive.label = "Captive";
  captive.membership = {{"G_CAP", kConstant},
                        {"G_INCOME", "LowIncome"},
                        {"G_MODE", "FixedService"}};
  captive.utilities[1] = {{"B_PURPOSE_C1", "NonworkTrip"},
                          {"B_INVEH_C1", "InVeh_more"},
                          {"B_WAITING_C1", "Waiting_H"},
                          {"B_MODE_C1", "FixedService"}};
  if (!with_latent)
    captive.utilities[1].push_back({"B_UNASSIGNED_TRIPS_C1", "Unassigned_H"});
  captive.utilities[2] = {{"ASC_ODT_C1", kConstant},
                          {"B_PURPOSE_C1", "MixedTrip"},
                          {"B_INVEH_C1", "InVeh_less"},
                          {"B_WAITING_C1", "Waiting_L"},
                          {"B_UNASSIGNED_TRIPS_C1", "Unassigned_L"},
                          {"B_MODE_C1", "ActiveMode"}};
  captive.utilities[3] = {{"ASC_INDIFF_C1", kConstant},
                          {"B_EDU_C1", "HigherEdu"},
                          {"B_GENDER_C1", "Male"}};

  ClassSpec noncaptive;
  noncaptive.label = "NonCaptive";
  noncaptive.utilities[1] = {{"B_PURPOSE_C2", "WorkTrip"},
                             {"B_INVEH_C2", "InVeh_more"},
                             {"B_WAITING_C2", "Waiting_H"},
                             {"B_ASSIGNED_TRIPS_C2", "Assigned_H"}};
  noncaptive.utilities[2] = {{"ASC_ODT_C2", kConstant},
                             {"B_PURPOSE_C2", "NonworkTrip"},
                             {"B_INVEH_C2", "InVeh_less"},
                             {"B_WAITING_C2", "Waiting_L"},
                             {"B_ASSIGNED_TRIPS_C2", "Assigned_L"}};
  noncaptive.utilities[3] = {{"ASC_INDIFF_C2", kConstant},
                             {"B_EDU_C2", "HigherEdu"},
                             {"B_GENDER_C2", "Male"}};

  if (with_latent) {
    captive.utilities[2].push_back({"B_TS_C1", "TIME_SEN"});
    captive.utilities[2].push_back({"B_OSS_C1", "ON_SERV_SAT"});
    noncaptive.utilities[2].push_back({"B_TS_C2", "TIME_SEN"});
    noncaptive.utilities[2].push_back({"B_OSS_C2", "ON_SERV_SAT"});
  }
  return {captive, noncaptive};
}

// fix_c2_ascs: the published class-2 constants are reported only for the plain
// latent-class model; the hybrid variant pins them at 0 so its free-parameter
// count matches the published 50.
void add_class_parameters(ParameterVector& p, bool with_latent,
                          bool fix_c2_ascs) {
  p.add("ASC_ODT_C1", 0.0);
  p.add("ASC_INDIFF_C1", 0.0);
  p.add("B_PURPOSE_C1", 0.0);
  p.add("B_INVEH_C1", 0.0);
  p.add("B_WAITING_C1", 0.0);
  p.add("B_UNASSIGNED_TRIPS_C1", 0.0);
  p.add("B_MODE_C1", 0.0);
  p.add("B_EDU_C1", 0.0);
  p.add("B_GENDER_C1", 0.0);
  if (with_latent) {
    p.add("B_TS_C1", 0.0);
    p.add("B_OSS_C1", 0.0);
  }
  p.add("ASC_ODT_C2", 0.0, fix_c2_ascs);
  p.add("ASC_INDIFF_C2", 0.0, fix_c2_ascs);
  p.add("B_PURPOSE_C2", 0.0);
  p.add("B_INVEH_C2", 0.0);
  p.add("B_WAITING_C2", 0.0);
  p.add("B_ASSIGNED_TRIPS_C2", 0.0);
  p.add("B_EDU_C2", 0.0);
  p.add("B_GENDER_C2", 0.0);
  if (with_latent) {
    p.add("B_TS_C2", 0.0);
    p.add("B_OSS_C2", 0.0);
  }
  p.add("G_CAP", 0.0);
  p.add("G_INCOME", 0.0);
  p.add("G_MODE", 0.0);
}

void set_all(ParameterVector& p,
             const std::vector<std::pair<const char*, double>>& values) {
  for (const auto& [name, value] : values) p.set_value(name, value);
}

}  // namespace

ModelSpec preset(ModelFamily family) {
  ModelSpec spec;
  spec.family = family;
  spec.alternatives = case_alternatives();
  switch (family) {
    case ModelFamily::MNL:
      spec.utilities = pooled_utilities();
      add_pooled_parameters(spec.parameters);
      break;
    case ModelFamily::ICLV:
      spec.utilities = pooled_utilities();
      spec.utilities[2].push_back({"B_TS", "TIME_SEN"});
      spec.utilities[2].push_back({"B_OSS", "ON_SERV_SAT"});
      spec.latent_variables = latent_block();
      add_pooled_parameters(spec.parameters);
      spec.parameters.add("B_TS", 0.0);
      spec.parameters.add("B_OSS", 0.0);
      add_latent_parameters(spec.parameters);
      break;
    case ModelFamily::LC:
      spec.classes = class_block(false);
      add_class_parameters(spec.parameters, false, false);
      break;
    case ModelFamily::LC_ICLV:
      spec.classes = class_block(true);
      spec.latent_variables = latent_block();
      add_class_parameters(spec.parameters, true, true);
      add_latent_parameters(spec.parameters);
      break;
  }
  return spec;
}

ParameterVector reference_estimates(ModelFamily family) {
  ParameterVector p = preset(family).parameters;
  switch (family) {
    case ModelFamily::MNL:
      set_all(p, {{"ASC_INDIFF", -1.89},
                  {"ASC_ODT", -2.61},
                  {"B_ASSIGNED_TRIPS", 0.972},
                  {"B_PURPOSE", 1.09},
                  {"B_MODE", 1.03},
                  {"B_INVEH", 1.35},
                  {"B_WAITING", 1.07},
                  {"B_HHLD", 2.11},
                  {"B_AGE", 1.91},
                  {"B_EDU", 1.55},
                  {"B_GENDER", 2.17}});
      break;
    case ModelFamily::ICLV:
      set_all(p, {{"ASC_INDIFF", -1.89},    {"ASC_ODT", -3.66},
                  {"B_ASSIGNED_TRIPS", 0.927}, {"B_PURPOSE", 1.12},
                  {"B_MODE", 1.17},         {"B_INVEH", 1.45},
                  {"B_WAITING", 1.14},      {"B_HHLD", 2.46},
                  {"B_AGE", 1.92},          {"B_EDU", 1.49},
                  {"B_GENDER", 2.38},       {"B_TS", 0.668},
                  {"B_OSS", 0.385},         {"A_CONS_TS", 0.334},
                  {"A_AGE_TS", 1.08},       {"A_INCOME_TS", 0.687},
                  {"A_CAR_TS", -0.62},      {"A_HHLD_TS", 0.724},
                  {"A_GENDER_TS", 1.11},    {"A_MARITAL_TS", -1.04},
                  {"S_TS", -0.113},         {"A_CONS_OSS", -0.858},
                  {"A_AGE_OSS", 1.29},      {"A_INCOME_OSS", 1.36},
                  {"A_EDU_OSS", 0.64},      {"S_OSS", 1.3},
                  {"A_RELIA_IMPO", 1.1},    {"B_RELIA_IMPO", 0.874},
                  {"S_RELIA_IMPO", 1.53},   {"A_TIME_BUS", -0.14},
                  {"B_TIME_BUS", 0.674},    {"S_TIME_BUS", 1.23},
                  {"A_FLEXIBILITY", 1.08},  {"B_FLEXIBILITY", 0.051},
                  {"S_FLEXIBILITY", 1.31},  {"A_WEB_INTER", 0.097},
                  {"B_WEB_INTER", 0.843},   {"S_WEB_INTER", 0.215},
                  {"A_AVAIL_SERV", 0.351},  {"B_AVAIL_SERV", 0.599},
                  {"S_AVAIL_SERV", 0.732}});
      break;
    case ModelFamily::LC:
      set_all(p, {{"ASC_ODT_C1", -11.6},
                  {"ASC_INDIFF_C1", -2.43},
                  {"B_PURPOSE_C1", 0.893},
                  {"B_INVEH_C1", 1.44},
                  {"B_WAITING_C1", 0.386},
                  {"B_UNASSIGNED_TRIPS_C1", 10.3},
                  {"B_MODE_C1", 1.45},
                  {"B_EDU_C1", 2.28},
                  {"B_GENDER_C1", 1.01},
                  {"ASC_ODT_C2", 1.7},
                  {"ASC_INDIFF_C2", -9.1},
                  {"B_PURPOSE_C2", 10.9},
                  {"B_INVEH_C2", 6.56},
                  {"B_WAITING_C2", 3.0},
                  {"B_ASSIGNED_TRIPS_C2", 2.33},
                  {"B_EDU_C2", 13.3},
                  {"B_GENDER_C2", 17.7},
                  {"G_CAP", -10.6},
                  {"G_INCOME", 24.1},
                  {"G_MODE", 21.6}});
      break;
    case ModelFamily::LC_ICLV:
      set_all(p, {{"ASC_ODT_C1", -11.6},    {"ASC_INDIFF_C1", -2.54},
                  {"B_PURPOSE_C1", 0.86},   {"B_INVEH_C1", 1.6},
                  {"B_WAITING_C1", 0.377},  {"B_UNASSIGNED_TRIPS_C1", 10.4},
                  {"B_MODE_C1", 1.37},      {"B_EDU_C1", 2.31},
                  {"B_GENDER_C1", 0.943},   {"B_TS_C1", -0.138},
                  {"B_OSS_C1", 0.053},      {"B_PURPOSE_C2", 50.0},
                  {"B_INVEH_C2", 27.7},     {"B_WAITING_C2", 6.01},
                  {"B_ASSIGNED_TRIPS_C2", 10.9}, {"B_EDU_C2", 10.6},
                  {"B_GENDER_C2", 36.1},    {"B_TS_C2", 9.44},
                  {"B_OSS_C2", 5.63},       {"G_CAP", -10.7},
                  {"G_INCOME", 24.1},       {"G_MODE", 21.6},
                  {"A_CONS_TS", 0.266},     {"A_AGE_TS", 1.15},
                  {"A_INCOME_TS", 0.617},   {"A_CAR_TS", -0.485},
                  {"A_HHLD_TS", 0.684},     {"A_GENDER_TS", 1.13},
                  {"A_MARITAL_TS", -0.979}, {"S_TS", -0.224},
                  {"A_CONS_OSS", -0.47},    {"A_AGE_OSS", 0.991},
                  {"A_INCOME_OSS", 0.6},    {"A_EDU_OSS", 0.605},
                  {"S_OSS", 1.14},          {"A_RELIA_IMPO", 1.2},
                  {"B_RELIA_IMPO", 0.785},  {"S_RELIA_IMPO", 1.52},
                  {"A_TIME_BUS", -0.058},   {"B_TIME_BUS", 0.607},
                  {"S_TIME_BUS", 1.23},     {"A_FLEXIBILITY", 1.03},
                  {"B_FLEXIBILITY", 0.099}, {"S_FLEXIBILITY", 1.31},
                  {"A_WEB_INTER", 0.121},   {"B_WEB_INTER", 0.833},
                  {"S_WEB_INTER", 0.387},   {"A_AVAIL_SERV", 0.388},
                  {"B_AVAIL_SERV", 0.584},  {"S_AVAIL_SERV", 0.766}});
      break;
  }
  return p;
}

std::vector<MarginalGroup> reference_marginals() {
  const double n = 72.0;
  return {
      {{"Young", "MiddleAge"}, {29 / n, 10 / n}},
      {{"Male"}, {34 / n}},
      {{"Single"}, {45 / n}},
      {{"Sec_school", "HigherEdu"}, {30 / n, 18 / n}},
      {{"LowIncome", "HighIncome"}, {39 / n, 11 / n}},
      {{"Hhld_L", "Hhld_H"}, {44 / n, 28 / n}},
      {{"Car"}, {4 / n}},
      {{"WorkTrip", "NonworkTrip", "MixedTrip"}, {29 / n, 11 / n, 32 / n}},
      {{"FixedService", "ActiveMode"}, {14 / n, 25 / n}},
      {{"InVeh_less", "InVeh_more"}, {19 / n, 28 / n}},
      {{"Assigned_L", "Assigned_H"}, {46 / n, 10 / n}},
      {{"Unassigned_L", "Unassigned_H"}, {46 / n, 8 / n}},
      {{"Waiting_L", "Waiting_H"}, {19 / n, 20 / n}},
  };
}

}  // namespace hychoice
