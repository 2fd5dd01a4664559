#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crh/channel_selection.hpp"
#include "crh/coordination.hpp"
#include "crh/core_model.hpp"
#include "crh/handoff_protocol.hpp"
#include "json.hpp"

namespace crh {

/// One experiment. Rates are converted to per-slot probabilities with
/// x = rate * slot_seconds unless the *_arrival_prob override is set.
struct ScenarioConfig {
  int num_su_pairs = 10;
  int num_channels = 10;
  double slot_seconds = 0.002;
  int slots_per_frame = 10;
  int frames_per_packet = 2;
  int mini_slots = 4;

  double tau_low = 0.8;
  double tau_high = 0.9;
  double theta = 0.7;

  double su_rate_pps = 500.0;
  std::optional<double> su_arrival_prob;
  /// Per-pair rates; when non-empty it must have num_su_pairs entries.
  std::vector<double> su_rates_pps;
  /// Per-pair rates drawn uniformly from [lo, hi], once per seed; every
  /// replication sees the same draw so per-pair results can be pooled.
  std::optional<std::pair<double, double>> su_rate_range;
  int su_min_gap = 1;

  double pu_rate_pps = 10.0;
  std::optional<double> pu_arrival_prob;
  /// Channel m gets rate * (1 + spread * (2 (m-1)/(M-1) - 1)); 0 = homogeneous.
  double pu_rate_spread = 0.0;
  double pu_packet_length = 5.0;
  PacketLengthModel pu_length_model = PacketLengthModel::Fixed;

  HandoffMode handoff_mode = HandoffMode::Proactive;
  CoordinationKind coordination = CoordinationKind::SingleRendezvous;
  SelectionStrategy selection = SelectionStrategy::Proposed;
  double chi = 0.0;
  int sensing_delay_slots = 0;  // Ts; 0 = detection at the end of the frame

  std::uint64_t seed = 1;
  std::uint64_t duration_slots = 200'000;
  int replications = 10;
  double warmup_fraction = 0.1;

  std::uint64_t warmup_slots() const noexcept;
  FrameSpec frame() const noexcept { return {slots_per_frame, frames_per_packet}; }
};

struct FieldError {
  std::string field;
  std::string message;
};

/// Raised with every problem found, not just the first.
class ConfigError : public InvalidParameter {
 public:
  explicit ConfigError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const noexcept { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

std::vector<FieldError> validate(const ScenarioConfig& cfg);
void validate_or_throw(const ScenarioConfig& cfg);

nlohmann::json to_json(const ScenarioConfig& cfg);
/// Missing keys keep their defaults; unknown keys and bad types are errors.
ScenarioConfig scenario_from_json(const nlohmann::json& j);

/// Sets one top-level field by name (the JSON key).
void set_field(ScenarioConfig& cfg, const std::string& name, const nlohmann::json& value);

/// JSON keys accepted by set_field, in schema order.
const std::vector<std::string>& scenario_fields();

/// Fields that take a single number or string and so can be swept.
bool is_sweepable(const std::string& name);

/// Rates resolved to per-slot probabilities.
struct ResolvedRates {
  std::vector<double> su_rate_pps;  // per pair, for reporting
  std::vector<double> su_prob;      // per pair
  std::vector<double> pu_prob;      // per channel, index 0 = channel 1
  std::vector<std::string> warnings;
};

ResolvedRates resolve_rates(const ScenarioConfig& cfg);

}  // namespace crh
