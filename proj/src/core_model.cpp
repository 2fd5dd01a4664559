#include "crh/core_model.hpp"

#include <cmath>

namespace crh {

void FrameSpec::validate() const {
  if (slots_per_frame < 1) throw InvalidParameter("slots_per_frame (c) must be >= 1");
  if (frames_per_packet < 1) throw InvalidParameter("frames_per_packet (h) must be >= 1");
}

std::string to_string(PacketLengthModel m) {
  return m == PacketLengthModel::Fixed ? "fixed" : "geometric";
}

PacketLengthModel packet_length_model_from_string(const std::string& s) {
  if (s == "fixed") return PacketLengthModel::Fixed;
  if (s == "geometric") return PacketLengthModel::Geometric;
  throw InvalidParameter("unknown PU packet length model '" + s + "' (expected fixed|geometric)");
}

void PuTrafficParams::validate() const {
  if (!(arrival_prob >= 0.0 && arrival_prob <= 1.0))
    throw InvalidParameter("PU arrival probability must be in [0, 1]");
  if (!(mean_length >= 1.0)) throw InvalidParameter("PU packet length must be >= 1 slot");
  if (length_model == PacketLengthModel::Fixed && std::floor(mean_length) != mean_length)
    throw InvalidParameter("fixed PU packet length must be an integer number of slots");
}

int sample_pu_packet_length(const PuTrafficParams& params, RandomStream& rng) {
  if (params.length_model == PacketLengthModel::Fixed) return params.fixed_length();
  // Per-slot completion with probability v gives a length >= 1 with mean 1/v.
  const auto failures = rng.geometric_failures(params.completion_prob());
  constexpr std::uint64_t cap = 1u << 30;
  return static_cast<int>(1 + (failures < cap ? failures : cap));
}

ChannelState advance_pu_channel(const ChannelState& state, const PuTrafficParams& params,
                                RandomStream& rng) {
  ChannelState next = state;
  const bool arrival = rng.bernoulli(params.arrival_prob);
  if (state.off()) {
    if (arrival) {
      next.remaining_slots = sample_pu_packet_length(params, rng);
      next.pending_pu_packet = false;
    }
    return next;
  }
  if (state.remaining_slots > 1) {
    next.remaining_slots = state.remaining_slots - 1;
    next.pending_pu_packet = state.pending_pu_packet || arrival;
    return next;
  }
  // The current packet ends with this slot.
  if (state.pending_pu_packet) {
    next.remaining_slots = sample_pu_packet_length(params, rng);
    next.pending_pu_packet = arrival;
  } else if (arrival) {
    next.remaining_slots = sample_pu_packet_length(params, rng);
    next.pending_pu_packet = false;
  } else {
    next.remaining_slots = 0;
    next.pending_pu_packet = false;
  }
  return next;
}

void SuTrafficParams::validate() const {
  if (!(normalized_arrival >= 0.0 && normalized_arrival <= 1.0))
    throw InvalidParameter("SU normalized arrival x must be in [0, 1]");
  if (min_gap < 0) throw InvalidParameter("SU minimum inter-arrival gap a must be >= 0");
}

int next_su_arrival_gap(const SuTrafficParams& params, RandomStream& rng) {
  params.validate();
  if (params.normalized_arrival == 0.0)
    throw InvalidParameter("x = 0: the SU never generates another packet");
  const auto extra = rng.geometric_failures(params.normalized_arrival);
  constexpr std::uint64_t cap = 1u << 30;
  return params.min_gap + static_cast<int>(extra < cap ? extra : cap);
}

double rate_to_probability(double rate_per_second, double beta, bool* clamped) {
  if (!(rate_per_second >= 0.0)) throw InvalidParameter("arrival rate must be >= 0");
  if (!(beta > 0.0)) throw InvalidParameter("slot length beta must be > 0");
  double x = rate_per_second * beta;
  const bool c = x > 1.0;
  if (c) x = 1.0;
  if (clamped) *clamped = c;
  return x;
}

}  // namespace crh
