#pragma once

#include <span>
#include <vector>

namespace crh {

/// Thresholds of the handoff (tau_L) and candidate (tau_H, theta) policies.
struct PredictionThresholds {
  double tau_low = 0.8;   // tau_L
  double tau_high = 0.9;  // tau_H
  double theta = 0.8;
  int eta = 11;  // frame plus one slot

  void validate() const;
};

struct ChannelForecast {
  int channel_id = 0;
  double prob_idle = 1.0;             // Pr(N_k(n) = 0)
  double prob_off_exceeds_eta = 1.0;  // Pr(t_off > eta)
};

/// 1 - sum_{i=1..n} x (1-x)^(i-1), evaluated as the literal sum.
double prob_no_arrival(int n, double x);

/// Total slotted idle probability at slot n: P_0 + sum_{h=1..floor(n/L)} P_h,
/// clamped to [0, 1].
double prob_idle_at_slot(int n, double x, int pu_length);

/// Pr(t_off > eta) = 1 - sum_{i=1..eta} x (1-x)^(i-1).
double prob_off_exceeds(int eta, double x);

/// Handoff policy: strict Pr(idle) < tau_L.
bool should_handoff(const ChannelForecast& current, const PredictionThresholds& thresholds);

/// Candidate policy: Pr(idle) >= tau_H and Pr(t_off > eta) >= theta.
bool is_candidate(const ChannelForecast& f, const PredictionThresholds& thresholds);

/// LSC: channels passing the candidate policy, by descending idle probability,
/// ties by ascending channel id.
std::vector<int> candidate_channels(std::span<const ChannelForecast> forecasts,
                                    const PredictionThresholds& thresholds);

/// Forecast for a channel given what the scanning radio currently sees.
/// `sensed_busy_remaining` counts the slots after the observation slot that the
/// sensed occupancy still covers (0 = free from the next slot on). A busy
/// channel can only be idle at n if its occupancy ends first; the remainder is
/// forecast from that point.
ChannelForecast forecast_channel(int channel_id, double x, int pu_length, int horizon, int eta,
                                 int sensed_busy_remaining);

}  // namespace crh
