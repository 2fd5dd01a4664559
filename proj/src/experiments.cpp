#include "crh/experiments.hpp"

#include <cmath>
#include <sstream>

namespace crh {

using nlohmann::json;

SweepResult run_sweep(const ScenarioConfig& base, const std::string& axis, const std::vector<json>& values) {
  if (!is_sweepable(axis)) throw UnknownAxis("unknown or non-sweepable axis '" + axis + "'");
  validate_or_throw(base);
  SweepResult out{base, axis, values, {}};
  std::vector<ScenarioConfig> points;
  for (const auto& v : values) {
    ScenarioConfig c = base;
    set_field(c, axis, v);
    points.push_back(c);
  }
  for (const auto& c : points) out.reports.push_back(run_scenario(c));
  return out;
}

json to_json(const AnalyzeRequest& r) {
  const auto& c = r.chain;
  return json{{"p", c.p},
              {"s", c.s},
              {"h", c.h},
              {"c", c.c},
              {"q", c.q},
              {"u", c.u},
              {"ts", c.ts},
              {"num_channels", c.num_channels},
              {"v", c.v},
              {"derive_u", r.derive_u},
              {"s_values", r.s_values},
              {"ts_values", r.ts_values},
              {"simulate", r.simulate},
              {"sim_pairs", r.sim_pairs},
              {"sim_coordination", to_string(r.sim_coordination)},
              {"duration_slots", r.duration_slots},
              {"replications", r.replications},
              {"seed", r.seed}};
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

void check_keys(const json& j, const json& reference) {
  if (!j.is_object()) throw ConfigError(std::vector<FieldError>{{"<root>", "expected a JSON object"}});
  std::vector<FieldError> errs;
  for (const auto& [k, v] : j.items())
    if (!reference.contains(k)) errs.push_back({k, "unknown field"});
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

template <typename F>
auto typed(const char* what, F f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::vector<FieldError>{{what, e.what()}});
  }
}

}  // namespace

AnalyzeRequest analyze_request_from_json(const json& j) {
  AnalyzeRequest r;
  check_keys(j, to_json(r));
  typed("analyze", [&] {
    auto& c = r.chain;
    take(j, "p", c.p);
    take(j, "s", c.s);
    take(j, "h", c.h);
    take(j, "c", c.c);
    take(j, "q", c.q);
    take(j, "ts", c.ts);
    take(j, "num_channels", c.num_channels);
    take(j, "v", c.v);
    take(j, "derive_u", r.derive_u);
    if (j.contains("u")) {
      c.u = j.at("u").get<double>();
      if (!j.contains("derive_u")) r.derive_u = false;
    }
    take(j, "s_values", r.s_values);
    take(j, "ts_values", r.ts_values);
    take(j, "simulate", r.simulate);
    take(j, "sim_pairs", r.sim_pairs);
    if (j.contains("sim_coordination"))
      r.sim_coordination = coordination_from_string(j.at("sim_coordination").get<std::string>());
    take(j, "duration_slots", r.duration_slots);
    take(j, "replications", r.replications);
    take(j, "seed", r.seed);
    return 0;
  });
  return r;
}

ScenarioConfig matched_scenario(const AnalyzeRequest& req, const markov::ChainParams& point) {
  if (point.q != 0.0) throw InvalidParameter("the matched simulation needs q = 0");
  if (point.v <= 0.0 || point.v > 1.0) throw InvalidParameter("the matched simulation needs v in (0, 1]");
  ScenarioConfig c;
  c.num_su_pairs = req.sim_pairs;
  c.num_channels = point.num_channels;
  c.slots_per_frame = point.c;
  c.frames_per_packet = point.h;
  c.su_arrival_prob = point.s;
  c.su_min_gap = 1;
  c.pu_arrival_prob = point.p;
  c.pu_length_model = PacketLengthModel::Geometric;
  c.pu_packet_length = 1.0 / point.v;
  c.handoff_mode = HandoffMode::Reactive;
  c.coordination = req.sim_coordination;
  c.selection = SelectionStrategy::Random;
  c.sensing_delay_slots = point.ts == point.c ? 0 : point.ts;
  c.duration_slots = req.duration_slots;
  c.replications = req.replications;
  c.seed = req.seed;
  return c;
}

AnalyzeResult analyze(const AnalyzeRequest& req) {
  AnalyzeResult out;
  out.request = req;
  const auto s_values = req.s_values.empty() ? std::vector<double>{req.chain.s} : req.s_values;
  const auto ts_values = req.ts_values.empty() ? std::vector<int>{req.chain.ts} : req.ts_values;
  for (int ts : ts_values) {
    for (double s : s_values) {
      AnalyzePoint pt;
      pt.chain = req.chain;
      pt.chain.s = s;
      pt.chain.ts = ts;
      if (req.derive_u) pt.chain.u = markov::pu_occupancy_u(pt.chain.num_channels, pt.chain.p, pt.chain.v).u;
      pt.chain.validate();
      const int delay = pt.chain.sensing_delay();
      pt.steady = delay < pt.chain.c ? markov::steady_state_with_sensing_delay(pt.chain)
                                     : markov::steady_state_with_pu(pt.chain);
      pt.theta = markov::normalized_throughput(pt.steady);
      if (req.simulate) {
        const auto cfg = matched_scenario(req, pt.chain);
        const auto rep = run_scenario(cfg);
        const auto& sm = rep.summary.at("normalized_throughput");
        pt.simulated = true;
        pt.sim_theta = sm.mean;
        pt.sim_ci95 = sm.ci95;
        pt.rel_diff = pt.theta > 0.0 ? (pt.sim_theta - pt.theta) / pt.theta : 0.0;
        out.max_abs_rel_diff = std::max(out.max_abs_rel_diff, std::abs(pt.rel_diff));
      }
      out.points.push_back(std::move(pt));
    }
  }
  return out;
}

json to_json(const ValidationOptions& o) {
  return json{{"s_values", o.s_values},
              {"ts_values", o.ts_values},
              {"p", o.p},
              {"v", o.v},
              {"num_channels", o.num_channels},
              {"c", o.c},
              {"sim_pairs", o.sim_pairs},
              {"duration_slots", o.duration_slots},
              {"replications", o.replications},
              {"seed", o.seed},
              {"tolerance", o.tolerance}};
}

ValidationOptions validation_options_from_json(const json& j) {
  ValidationOptions o;
  check_keys(j, to_json(o));
  typed("validate", [&] {
    take(j, "s_values", o.s_values);
    take(j, "ts_values", o.ts_values);
    take(j, "p", o.p);
    take(j, "v", o.v);
    take(j, "num_channels", o.num_channels);
    take(j, "c", o.c);
    take(j, "sim_pairs", o.sim_pairs);
    take(j, "duration_slots", o.duration_slots);
    take(j, "replications", o.replications);
    take(j, "seed", o.seed);
    take(j, "tolerance", o.tolerance);
    return 0;
  });
  return o;
}

ValidationResult validate_against_chain(const ValidationOptions& opt) {
  AnalyzeRequest req;
  req.chain.p = opt.p;
  req.chain.v = opt.v;
  req.chain.c = opt.c;
  req.chain.h = 1;
  req.chain.q = 0.0;
  req.chain.num_channels = opt.num_channels;
  req.s_values = opt.s_values;
  req.ts_values = opt.ts_values;
  req.simulate = true;
  req.sim_pairs = opt.sim_pairs;
  req.duration_slots = opt.duration_slots;
  req.replications = opt.replications;
  req.seed = opt.seed;

  ValidationResult out;
  out.options = opt;
  out.analysis = analyze(req);
  out.passed = true;
  for (int ts : opt.ts_values) {
    ValidationCheck chk;
    std::ostringstream name;
    name << "sim_vs_chain_Ts_" << (ts == 0 ? std::string("c") : std::to_string(ts));
    chk.name = name.str();
    chk.limit = opt.tolerance;
    for (const auto& pt : out.analysis.points)
      if (pt.chain.ts == ts) chk.value = std::max(chk.value, std::abs(pt.rel_diff));
    chk.passed = chk.value <= chk.limit;
    out.passed = out.passed && chk.passed;
    out.checks.push_back(chk);
  }
  return out;
}

}  // namespace crh
