#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "crh/rng.hpp"

namespace crh {

/// Thrown for any parameter set that violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SlotClock {
  std::uint64_t slot_index = 0;
  double slot_length_beta = 0.002;  // seconds

  void tick() noexcept { ++slot_index; }
  double seconds() const noexcept { return static_cast<double>(slot_index) * slot_length_beta; }
  double seconds_for(std::uint64_t slots) const noexcept {
    return static_cast<double>(slots) * slot_length_beta;
  }
};

/// A SU packet is h frames of c slots each.
struct FrameSpec {
  int slots_per_frame = 10;   // c
  int frames_per_packet = 1;  // h

  /// Frame plus one slot, in slots.
  int eta() const noexcept { return slots_per_frame + 1; }
  int packet_slots() const noexcept { return slots_per_frame * frames_per_packet; }
  double frame_seconds(double beta) const noexcept { return slots_per_frame * beta; }
  void validate() const;
};

enum class PacketLengthModel { Fixed, Geometric };

std::string to_string(PacketLengthModel m);
PacketLengthModel packet_length_model_from_string(const std::string& s);

struct PuTrafficParams {
  double arrival_prob = 0.0;  // p, per slot
  PacketLengthModel length_model = PacketLengthModel::Fixed;
  double mean_length = 1.0;  // L for Fixed (must be integral), mean L for Geometric

  /// Per-slot completion probability v = 1 / mean length.
  double completion_prob() const noexcept { return 1.0 / mean_length; }
  int fixed_length() const noexcept { return static_cast<int>(mean_length); }
  void validate() const;
};

/// Channel occupancy at one slot. remaining_slots == 0 means OFF; otherwise the
/// channel is ON and the current PU packet occupies this slot and
/// remaining_slots - 1 further slots.
struct ChannelState {
  int channel_id = 1;
  int remaining_slots = 0;
  bool pending_pu_packet = false;

  bool on() const noexcept { return remaining_slots > 0; }
  bool off() const noexcept { return remaining_slots == 0; }
  friend bool operator==(const ChannelState&, const ChannelState&) = default;
};

int sample_pu_packet_length(const PuTrafficParams& params, RandomStream& rng);

/// One-slot transition of a PU channel with a one-packet buffer.
ChannelState advance_pu_channel(const ChannelState& state, const PuTrafficParams& params,
                                RandomStream& rng);

struct SuTrafficParams {
  double normalized_arrival = 0.0;  // x = lambda * beta
  int min_gap = 1;                  // a, slots

  void validate() const;
};

/// Draw from the biased geometric gap: Pr(n) = x (1 - x)^(n - a) for n >= a.
int next_su_arrival_gap(const SuTrafficParams& params, RandomStream& rng);

/// x = lambda * beta. Values above 1 are clamped; `clamped` reports it.
double rate_to_probability(double rate_per_second, double beta, bool* clamped = nullptr);

}  // namespace crh
