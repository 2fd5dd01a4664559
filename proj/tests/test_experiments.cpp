#include <filesystem>
#include <fstream>
#include <sstream>

#include "crh/experiments.hpp"
#include "crh/report.hpp"
#include "doctest.h"

using namespace crh;
using nlohmann::json;

namespace {

ScenarioConfig small(int pairs = 3) {
  ScenarioConfig c;
  c.num_su_pairs = pairs;
  c.duration_slots = 5'000;
  c.replications = 2;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

// Closed form of the chain without PUs or SU collisions: every positive
// state has the weight of (0,0,1), the idle state (1-s)/s of it.
double no_pu_theta(double s, int c, int h) {
  const double tx = static_cast<double>(c) * h;
  return tx / (1.0 + tx + (1.0 - s) / s);
}

}  // namespace

TEST_CASE("sweep has one row per value and replication") {
  const auto res = run_sweep(small(), "num_channels", {json(2), json(5), json(10)});
  CHECK(res.reports.size() == 3);
  CHECK(res.reports[1].config.num_channels == 5);
  const auto b = sweep_bundle(res);
  CHECK(b.table("sweep").rows.size() == 3 * 2);
  CHECK(b.table("sweep_summary").rows.size() == 3 * metric_names().size());
  CHECK(b.manifest.at("command") == "sweep");
  CHECK(b.manifest.at("seed") == 1);
}

TEST_CASE("empty sweep") {
  const auto res = run_sweep(small(), "chi", {});
  CHECK(res.reports.empty());
  const auto b = sweep_bundle(res);
  CHECK(b.table("sweep").rows.empty());
  CHECK(first_line(to_csv(b.table("sweep"))).rfind("axis,value,replication,", 0) == 0);
}

TEST_CASE("sweep rejects bad axes and values before running") {
  CHECK_THROWS_AS(run_sweep(small(), "warp_factor", {json(1)}), UnknownAxis);
  CHECK_THROWS_AS(run_sweep(small(), "su_rates_pps", {json(1)}), UnknownAxis);
  CHECK_THROWS_AS(run_sweep(small(), "chi", {json(0.1), json(2.0)}), ConfigError);
  CHECK_THROWS_AS(run_sweep(small(), "selection", {json("telepathy")}), ConfigError);
}

TEST_CASE("sensing errors do not help under multiple rendezvous") {
  auto c = small(5);
  c.coordination = CoordinationKind::MultipleRendezvous;
  c.duration_slots = 30'000;
  c.replications = 3;
  const auto res = run_sweep(c, "chi", {json(0.0), json(0.5), json(1.0)});
  double prev = 1e300;
  for (const auto& r : res.reports) {
    const double tp = r.summary.at("throughput_pps").mean;
    CHECK(tp <= prev);
    prev = tp;
  }
  CHECK(res.reports.back().summary.at("throughput_pps").mean < 1.0);
}

TEST_CASE("metrics report json round trip") {
  auto c = small();
  c.su_rate_range = std::make_pair(100.0, 400.0);
  const auto rep = run_scenario(c);
  const json j = to_json(rep);
  const auto back = metrics_report_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.replications.size() == 2);
  CHECK(back.pairs.size() == 3);
}

TEST_CASE("run bundle tables") {
  const auto rep = run_scenario(small());
  const auto b = run_bundle(rep);
  CHECK(first_line(to_csv(b.table("summary"))) == "metric,mean,sd,ci95,n");
  CHECK(first_line(to_csv(b.table("pair_summary"))) ==
        "pair,su_rate_pps,handoffs,mean_handoff_delay,mean_service_time,throughput_pps");
  CHECK(first_line(to_csv(b.table("replications"))).rfind("replication,measured_slots,throughput_pps,", 0) == 0);
  CHECK(b.table("pairs").rows.size() == 2 * 3);
  CHECK_THROWS(b.table("nope"));

  const auto js = to_json(b.table("summary"));
  REQUIRE(js.size() == metric_names().size());
  CHECK(js[0].begin().key() == "metric");

  const auto& m = b.manifest;
  CHECK(m.at("tool") == "crh");
  CHECK(m.at("version") == artifact_version());
  CHECK(m.at("input") == to_json(rep.config));
  CHECK(m.at("tables").size() == 4);
}

TEST_CASE("csv quoting") {
  Table t{"t", {"a", "b"}, {{json("x,y"), json(1.5)}, {json("say \"hi\""), json(nullptr)}}};
  CHECK(to_csv(t) == "a,b\n\"x,y\",1.5\n\"say \"\"hi\"\"\",\n");
}

TEST_CASE("bundles are written to disk") {
  const auto dir = std::filesystem::temp_directory_path() / "crh_test_bundle";
  std::filesystem::remove_all(dir);
  const auto b = run_bundle(run_scenario(small()));
  const auto paths = write_bundle(b, dir.string(), OutputFormat::Json);
  CHECK(paths.size() == 5);
  CHECK(std::filesystem::exists(dir / "summary.json"));
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("command") == "run");
  write_bundle(b, dir.string(), OutputFormat::Csv);
  CHECK(first_line(slurp(dir / "summary.csv")) == "metric,mean,sd,ci95,n");
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(write_bundle(b, "/proc/crh/forbidden", OutputFormat::Csv), std::runtime_error);
  CHECK(output_format_from_string("json") == OutputFormat::Json);
  CHECK_THROWS_AS(output_format_from_string("xml"), InvalidParameter);
}

TEST_CASE("analysis without PUs matches the closed form") {
  AnalyzeRequest req;
  req.chain.p = 0.0;
  req.chain.c = 4;
  req.chain.h = 3;
  req.s_values = {0.05, 0.3, 0.9};
  req.ts_values = {0, 2};
  const auto res = analyze(req);
  REQUIRE(res.points.size() == 6);
  for (const auto& pt : res.points) {
    CAPTURE(pt.chain.s);
    CAPTURE(pt.chain.ts);
    CHECK(pt.chain.u == 1.0);
    CHECK(pt.theta == doctest::Approx(no_pu_theta(pt.chain.s, 4, 3)).epsilon(1e-12));
  }
  const auto b = analyze_bundle(res);
  CHECK(b.table("analytic").rows.size() == 6);
  CHECK(b.manifest.at("max_abs_rel_diff") == 0.0);
}

TEST_CASE("analysis with a matched simulation") {
  AnalyzeRequest req;
  req.chain.p = 0.02;
  req.chain.v = 0.2;
  req.s_values = {0.3};
  req.simulate = true;
  req.duration_slots = 100'000;
  req.replications = 2;
  const auto res = analyze(req);
  REQUIRE(res.points.size() == 1);
  const auto& pt = res.points[0];
  CHECK(pt.simulated);
  CHECK(pt.chain.u < 1.0);
  CHECK(std::abs(pt.rel_diff) < 0.1);
  CHECK(res.max_abs_rel_diff == std::abs(pt.rel_diff));
}

TEST_CASE("matched scenario") {
  AnalyzeRequest req;
  markov::ChainParams cp;
  cp.p = 0.05;
  cp.v = 0.25;
  cp.s = 0.4;
  cp.ts = 3;
  const auto c = matched_scenario(req, cp);
  CHECK(validate(c).empty());
  CHECK(c.pu_length_model == PacketLengthModel::Geometric);
  CHECK(c.pu_packet_length == 4.0);
  CHECK(*c.su_arrival_prob == 0.4);
  CHECK(c.sensing_delay_slots == 3);
  CHECK(c.handoff_mode == HandoffMode::Reactive);
  cp.q = 0.1;
  CHECK_THROWS_AS(matched_scenario(req, cp), InvalidParameter);
}

TEST_CASE("analyze and validate options from json") {
  const auto r = analyze_request_from_json(json{{"p", 0.1}, {"u", 0.5}, {"s_values", {0.1, 0.2}}});
  CHECK(r.chain.p == 0.1);
  CHECK_FALSE(r.derive_u);
  CHECK(r.s_values.size() == 2);
  CHECK(to_json(analyze_request_from_json(to_json(r))) == to_json(r));
  CHECK_THROWS_AS(analyze_request_from_json(json{{"pp", 1}}), ConfigError);
  CHECK_THROWS_AS(analyze_request_from_json(json{{"p", "high"}}), ConfigError);
  CHECK_THROWS_AS(analyze_request_from_json(json::array()), ConfigError);

  const auto v = validation_options_from_json(json{{"tolerance", 0.1}, {"ts_values", {1}}});
  CHECK(v.tolerance == 0.1);
  CHECK(v.ts_values == std::vector<int>{1});
  CHECK(v.s_values.size() == 8);
  CHECK_THROWS_AS(validation_options_from_json(json{{"tol", 0.1}}), ConfigError);
}

TEST_CASE("validation reports one check per sensing delay") {
  ValidationOptions o;
  o.s_values = {0.2};
  o.ts_values = {0, 4};
  o.duration_slots = 50'000;
  o.replications = 2;
  const auto v = validate_against_chain(o);
  REQUIRE(v.checks.size() == 2);
  CHECK(v.checks[0].name == "sim_vs_chain_Ts_c");
  CHECK(v.checks[1].name == "sim_vs_chain_Ts_4");
  CHECK(v.passed);
  o.tolerance = 0.0;
  CHECK_FALSE(validate_against_chain(o).passed);
  const auto b = validate_bundle(v);
  CHECK(b.manifest.at("passed") == true);
  CHECK(b.table("criteria").rows.size() == 2);
}
