#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crh/scenario.hpp"

namespace crh {

/// Slot classes, one per pair per measured slot.
enum class SlotClass : char {
  Transmitting = 'T',  // clean data slot
  Collided = 'C',      // from the overlap onset to its detection
  Handoff = 'H',       // vacated, waiting for the new channel
  Backlogged = 'B',    // holds a packet but is not on air
  Idle = 'I',          // no packet
};

struct PairMetrics {
  int pair = 0;
  double su_rate_pps = 0.0;
  double arrival_prob = 0.0;

  std::uint64_t measured_slots = 0;
  std::uint64_t transmitting_slots = 0;
  std::uint64_t collided_slots = 0;
  std::uint64_t handoff_slots = 0;
  std::uint64_t backlogged_slots = 0;  // excludes handoff slots
  std::uint64_t idle_slots = 0;

  // Transmitting slots split by the fate of their frame.
  std::uint64_t delivered_frame_slots = 0;
  std::uint64_t wasted_frame_slots = 0;
  std::uint64_t in_flight_slots = 0;

  std::uint64_t frames_delivered = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t pu_collisions = 0;
  std::uint64_t su_su_collisions = 0;
  std::uint64_t type1_collisions = 0;
  std::uint64_t prediction_misses = 0;
  std::uint64_t handoffs = 0;
  std::uint64_t proactive_handoffs = 0;
  double handoff_delay_sum = 0.0;  // slots
  double service_time_sum = 0.0;   // slots, arrival to last frame slot inclusive

  double mean_handoff_delay() const noexcept {
    return handoffs ? handoff_delay_sum / static_cast<double>(handoffs) : 0.0;
  }
  double mean_service_time() const noexcept {
    return packets_delivered ? service_time_sum / static_cast<double>(packets_delivered) : 0.0;
  }
};

struct ReplicationMetrics {
  int replication = 0;
  std::uint64_t measured_slots = 0;

  double throughput_pps = 0.0;         // delivered SU packets per second, all pairs
  double normalized_throughput = 0.0;  // mean fraction of clean data slots per pair
  double goodput = 0.0;                // mean fraction of slots in delivered frames
  double collision_rate = 0.0;         // SU-PU collisions per delivered SU packet
  double collisions_per_second = 0.0;
  std::uint64_t pu_collision_count = 0;
  std::uint64_t su_su_collision_count = 0;
  std::uint64_t type1_collision_count = 0;
  std::uint64_t prediction_miss_count = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t handoff_count = 0;
  std::uint64_t proactive_handoff_count = 0;
  double handoff_delay_mean = 0.0;  // slots
  double handoff_delay_p50 = 0.0;
  double handoff_delay_p95 = 0.0;
  double service_time_mean = 0.0;  // slots

  // Slot-fraction breakdown averaged over pairs.
  double frac_transmitting = 0.0;
  double frac_collided = 0.0;
  double frac_handoff = 0.0;
  double frac_backlogged = 0.0;
  double frac_idle = 0.0;

  std::vector<PairMetrics> pairs;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double ci95 = 0.0;  // half-width, normal approximation
  int n = 0;
};

Summary summarize(const std::vector<double>& values);

/// Per-pair view pooled over replications.
struct PairSummary {
  int pair = 0;
  double su_rate_pps = 0.0;
  std::uint64_t handoffs = 0;
  double mean_handoff_delay = 0.0;  // slots
  double mean_service_time = 0.0;   // slots
  double throughput_pps = 0.0;
};

struct MetricsReport {
  ScenarioConfig config;
  std::vector<ReplicationMetrics> replications;
  std::map<std::string, Summary> summary;  // keyed by ReplicationMetrics field name
  std::vector<PairSummary> pairs;
  std::vector<std::string> warnings;
};

/// Names of the ReplicationMetrics scalars, in report column order.
const std::vector<std::string>& metric_names();
double metric_value(const ReplicationMetrics& m, const std::string& name);

struct ReplicationTrace {
  /// classes[pair][t] for every slot, warmup included.
  std::vector<std::string> classes;
  /// channels[pair][t]: channel carrying the pair's data in slot t, or 0.
  std::vector<std::vector<int>> channels;
  /// pu_on[ch - 1][t].
  std::vector<std::vector<bool>> pu_on;
  std::vector<HandoffRecord> handoffs;
};

struct ReplicationResult {
  ReplicationMetrics metrics;
  ReplicationTrace trace;  // empty unless requested
};

/// Runs one replication. The configuration must be valid.
ReplicationResult run_replication(const ScenarioConfig& cfg, int replication, bool record_trace = false);

/// Validates, then runs every replication and aggregates.
MetricsReport run_scenario(const ScenarioConfig& cfg);

MetricsReport aggregate(const ScenarioConfig& cfg, std::vector<ReplicationMetrics> reps);

}  // namespace crh
