#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crh/engine.hpp"
#include "crh/markov.hpp"
#include "json.hpp"

namespace crh {

class UnknownAxis : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

struct SweepResult {
  ScenarioConfig base;
  std::string axis;
  std::vector<nlohmann::json> values;
  std::vector<MetricsReport> reports;  // one per value, same order
};

/// One report per value. Every point reuses the base seed, so replication k
/// of each point sees the same derived streams. Every value is validated
/// before anything runs.
SweepResult run_sweep(const ScenarioConfig& base, const std::string& axis,
                      const std::vector<nlohmann::json>& values);

struct AnalyzeRequest {
  markov::ChainParams chain;
  bool derive_u = true;  // u from the PU occupancy chain of num_channels channels
  std::vector<double> s_values;  // empty: just chain.s
  std::vector<int> ts_values;    // empty: just chain.ts
  bool simulate = false;

  // Matched simulation. The SU pairs use random selection with reactive
  // handoff, and PU packets have geometric length with mean 1/v.
  int sim_pairs = 2;
  CoordinationKind sim_coordination = CoordinationKind::MultipleRendezvous;
  std::uint64_t duration_slots = 1'000'000;
  int replications = 10;
  std::uint64_t seed = 1;
};

struct AnalyzePoint {
  markov::ChainParams chain;  // with u filled in
  double theta = 0.0;
  markov::SteadyState steady;
  bool simulated = false;
  double sim_theta = 0.0;
  double sim_ci95 = 0.0;
  double rel_diff = 0.0;  // (sim - analytic) / analytic
};

struct AnalyzeResult {
  AnalyzeRequest request;
  std::vector<AnalyzePoint> points;
  double max_abs_rel_diff = 0.0;  // over simulated points
};

nlohmann::json to_json(const AnalyzeRequest& r);
AnalyzeRequest analyze_request_from_json(const nlohmann::json& j);

/// Scenario that mirrors one chain point.
ScenarioConfig matched_scenario(const AnalyzeRequest& req, const markov::ChainParams& point);

AnalyzeResult analyze(const AnalyzeRequest& req);

struct ValidationOptions {
  std::vector<double> s_values{0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0};
  std::vector<int> ts_values{0, 1, 6};  // 0: detection at the end of the frame
  double p = 0.02;
  double v = 0.2;
  int num_channels = 10;
  int c = 10;
  int sim_pairs = 2;
  std::uint64_t duration_slots = 1'000'000;
  int replications = 10;
  std::uint64_t seed = 1;
  double tolerance = 0.06;
};

nlohmann::json to_json(const ValidationOptions& o);
ValidationOptions validation_options_from_json(const nlohmann::json& j);

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

struct ValidationResult {
  ValidationOptions options;
  AnalyzeResult analysis;
  std::vector<ValidationCheck> checks;  // one per sensing delay
  bool passed = false;
};

/// Paired simulation against the chain over the s grid, once per sensing
/// delay. A check passes when every point is within the tolerance.
ValidationResult validate_against_chain(const ValidationOptions& opt);

}  // namespace crh
