#include <algorithm>

#include "crh/scenario.hpp"
#include "doctest.h"

using namespace crh;
using nlohmann::json;

namespace {

bool has_error(const ConfigError& e, const std::string& field) {
  return std::any_of(e.errors().begin(), e.errors().end(), [&](const FieldError& f) { return f.field == field; });
}

}  // namespace

TEST_CASE("defaults are valid") {
  ScenarioConfig c;
  CHECK(validate(c).empty());
  CHECK(c.warmup_slots() == 20000);
}

TEST_CASE("json round trip") {
  ScenarioConfig c;
  c.num_su_pairs = 3;
  c.su_rates_pps = {1, 2, 3};
  c.pu_arrival_prob = 0.05;
  c.selection = SelectionStrategy::Bargaining;
  c.handoff_mode = HandoffMode::Reactive;
  c.pu_length_model = PacketLengthModel::Geometric;
  c.pu_packet_length = 4.5;
  c.seed = 99;
  const json j = to_json(c);
  const ScenarioConfig back = scenario_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.su_rates_pps == c.su_rates_pps);
  CHECK(back.selection == SelectionStrategy::Bargaining);
  CHECK(j.at("selection") == "bargaining");
}

TEST_CASE("partial json keeps defaults") {
  auto c = scenario_from_json(json{{"num_channels", 5}, {"chi", 0.2}});
  CHECK(c.num_channels == 5);
  CHECK(c.chi == 0.2);
  CHECK(c.num_su_pairs == ScenarioConfig{}.num_su_pairs);
}

TEST_CASE("field-level diagnostics") {
  try {
    scenario_from_json(json{{"num_channels", 0}, {"tau_low", 0.95}, {"replications", 0}, {"bogus", 1}});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_error(e, "bogus"));
  }
  try {
    scenario_from_json(json{{"num_channels", 0}, {"tau_low", 0.95}, {"replications", 0}});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_error(e, "num_channels"));
    CHECK(has_error(e, "tau_low"));
    CHECK(has_error(e, "replications"));
    CHECK(e.errors().size() == 3);
  }
  CHECK_THROWS_AS(scenario_from_json(json{{"selection", "best"}}), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json{{"num_channels", "ten"}}), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json{{"su_rates_pps", {1.0, 2.0}}}), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json{{"sensing_delay_slots", 11}}), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json{{"pu_packet_length", 2.5}}), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json::array()), ConfigError);
}

TEST_CASE("set_field") {
  ScenarioConfig c;
  set_field(c, "num_su_pairs", 40);
  CHECK(c.num_su_pairs == 40);
  set_field(c, "coordination", "multiple");
  CHECK(c.coordination == CoordinationKind::MultipleRendezvous);
  CHECK_THROWS_AS(set_field(c, "nope", 1), ConfigError);
  CHECK_THROWS_AS(set_field(c, "chi", 2.0), ConfigError);
  CHECK(c.chi == 0.0);
  CHECK(is_sweepable("chi"));
  CHECK_FALSE(is_sweepable("su_rates_pps"));
  CHECK_FALSE(is_sweepable("nope"));
}

TEST_CASE("rate resolution") {
  ScenarioConfig c;
  auto r = resolve_rates(c);
  CHECK(r.su_prob.front() == 1.0);
  CHECK(r.warnings.empty());  // 500 * 0.002 = 1 exactly
  CHECK(r.pu_prob.front() == doctest::Approx(0.02));

  c.su_rate_pps = 800;
  CHECK_FALSE(resolve_rates(c).warnings.empty());

  c.pu_rate_spread = 0.5;
  r = resolve_rates(c);
  CHECK(r.pu_prob.front() == doctest::Approx(0.01));
  CHECK(r.pu_prob.back() == doctest::Approx(0.03));

  c.su_rate_range = std::make_pair(0.0, 500.0);
  auto a = resolve_rates(c), b = resolve_rates(c);
  CHECK(a.su_rate_pps == b.su_rate_pps);
  c.seed = 2;
  CHECK(resolve_rates(c).su_rate_pps != a.su_rate_pps);
  for (double v : a.su_rate_pps) {
    CHECK(v >= 0.0);
    CHECK(v <= 500.0);
  }
  for (std::size_t i = 0; i < a.su_prob.size(); ++i)
    CHECK(a.su_prob[i] == doctest::Approx(a.su_rate_pps[i] * c.slot_seconds));
}
