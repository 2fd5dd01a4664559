#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <string>

#include "crhandoff/crhandoff.h"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  crh_string_free(s);
  return out;
}

crh_scenario* small_scenario() {
  crh_scenario* s = nullptr;
  REQUIRE(crh_scenario_create(&s) == CRH_OK);
  REQUIRE(crh_scenario_set(s, "num_su_pairs", "2") == CRH_OK);
  REQUIRE(crh_scenario_set(s, "duration_slots", "4000") == CRH_OK);
  REQUIRE(crh_scenario_set(s, "replications", "2") == CRH_OK);
  return s;
}

}  // namespace

TEST_CASE("version and fields") {
  CHECK(std::string(crh_version()).size() > 0);
  char* f = nullptr;
  REQUIRE(crh_scenario_fields(&f) == CRH_OK);
  const auto fields = json::parse(take(f));
  CHECK(fields.size() == 28);
  CHECK(fields[0] == "num_su_pairs");
}

TEST_CASE("scenario handles") {
  crh_scenario* s = small_scenario();
  CHECK(crh_scenario_set(s, "selection", "\"greedy\"") == CRH_OK);
  char* out = nullptr;
  REQUIRE(crh_scenario_to_json(s, &out) == CRH_OK);
  const auto j = json::parse(take(out));
  CHECK(j.at("selection") == "greedy");
  CHECK(j.at("num_su_pairs") == 2);

  crh_scenario* copy = nullptr;
  REQUIRE(crh_scenario_from_json(j.dump().c_str(), &copy) == CRH_OK);
  REQUIRE(crh_scenario_to_json(copy, &out) == CRH_OK);
  CHECK(json::parse(take(out)) == j);
  crh_scenario_destroy(copy);

  CHECK(crh_scenario_set(s, "bogus", "1") == CRH_ERR_CONFIG);
  CHECK(std::string(crh_last_error()).find("bogus") != std::string::npos);
  CHECK(crh_scenario_set(s, "chi", "{") == CRH_ERR_INVALID_ARGUMENT);
  CHECK(crh_scenario_from_json("{\"chi\": \"x\", \"zz\": 1}", &copy) == CRH_ERR_CONFIG);
  CHECK(crh_scenario_set(nullptr, "chi", "0") == CRH_ERR_INVALID_ARGUMENT);

  CHECK(crh_scenario_set(s, "chi", "1.5") == CRH_ERR_CONFIG);
  CHECK(std::string(crh_last_error()).find("chi") != std::string::npos);
  REQUIRE(crh_scenario_diagnostics(s, &out) == CRH_OK);
  CHECK(json::parse(take(out)).empty());
  crh_scenario_destroy(s);
  crh_scenario_destroy(nullptr);
}

TEST_CASE("run report") {
  crh_scenario* s = small_scenario();
  crh_report* r = nullptr;
  REQUIRE(crh_run(s, &r) == CRH_OK);
  char* out = nullptr;
  REQUIRE(crh_report_table_names(r, &out) == CRH_OK);
  CHECK(json::parse(take(out)) == json{"replications", "summary", "pairs", "pair_summary"});
  REQUIRE(crh_report_to_string(r, "summary", "csv", &out) == CRH_OK);
  CHECK(take(out).rfind("metric,mean,sd,ci95,n\n", 0) == 0);
  REQUIRE(crh_report_to_string(r, "pairs", "json", &out) == CRH_OK);
  CHECK(json::parse(take(out)).size() == 4);
  CHECK(crh_report_to_string(r, "nope", "csv", &out) == CRH_ERR_INVALID_ARGUMENT);
  CHECK(crh_report_to_string(r, "summary", "xml", &out) == CRH_ERR_INVALID_ARGUMENT);
  REQUIRE(crh_report_manifest(r, &out) == CRH_OK);
  const auto m = json::parse(take(out));
  CHECK(m.at("version") == crh_version());
  CHECK(m.at("seed") == 1);
  REQUIRE(crh_report_metrics_json(r, &out) == CRH_OK);
  CHECK(json::parse(take(out)).at("replications").size() == 2);

  const auto dir = std::filesystem::temp_directory_path() / "crh_capi_out";
  std::filesystem::remove_all(dir);
  REQUIRE(crh_report_write(r, dir.string().c_str(), "csv") == CRH_OK);
  for (const char* f : {"replications.csv", "summary.csv", "pairs.csv", "pair_summary.csv", "manifest.json",
                        "metrics.json"})
    CHECK(std::filesystem::exists(dir / f));
  std::filesystem::remove_all(dir);
  CHECK(crh_report_write(r, "/proc/crh/forbidden", "csv") == CRH_ERR_IO);

  crh_report_destroy(r);
  crh_scenario_destroy(s);
}

TEST_CASE("sweep, analyze and validate") {
  crh_scenario* s = small_scenario();
  crh_report* r = nullptr;
  CHECK(crh_sweep(s, "nonsense", "[1]", &r) == CRH_ERR_UNKNOWN_AXIS);
  CHECK(crh_sweep(s, "chi", "0.5", &r) == CRH_ERR_INVALID_ARGUMENT);
  REQUIRE(crh_sweep(s, "chi", "[0, 0.5]", &r) == CRH_OK);
  char* out = nullptr;
  REQUIRE(crh_report_to_string(r, "sweep", "json", &out) == CRH_OK);
  CHECK(json::parse(take(out)).size() == 4);
  CHECK(crh_report_metrics_json(r, &out) == CRH_ERR_INVALID_ARGUMENT);
  crh_report_destroy(r);
  crh_scenario_destroy(s);

  REQUIRE(crh_analyze("{\"p\": 0.0, \"s_values\": [0.1, 0.5]}", &r) == CRH_OK);
  REQUIRE(crh_report_to_string(r, "analytic", "json", &out) == CRH_OK);
  const auto rows = json::parse(take(out));
  CHECK(rows.size() == 2);
  CHECK(rows[0].at("theta").get<double>() == doctest::Approx(10.0 * 0.1 / (1.0 + 10.0 * 0.1)));
  crh_report_destroy(r);
  CHECK(crh_analyze("{\"p\": -1}", &r) == CRH_ERR_CONFIG);
  CHECK(crh_analyze("not json", &r) == CRH_ERR_INVALID_ARGUMENT);

  int passed = -1;
  REQUIRE(crh_validate("{\"s_values\": [0.3], \"ts_values\": [0], \"duration_slots\": 40000, \"replications\": 2}",
                       &r, &passed) == CRH_OK);
  CHECK(passed == 1);
  REQUIRE(crh_report_to_string(r, "criteria", "csv", &out) == CRH_OK);
  CHECK(take(out).find("sim_vs_chain_Ts_c") != std::string::npos);
  crh_report_destroy(r);
  CHECK(crh_validate(nullptr, &r, nullptr) == CRH_ERR_INVALID_ARGUMENT);
}
