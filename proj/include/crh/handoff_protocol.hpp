#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crh/coordination.hpp"
#include "crh/core_model.hpp"
#include "crh/prediction.hpp"

namespace crh {

enum class HandoffMode { Proactive, Reactive };
enum class HandoffCause { Proactive, Reactive, PredictionMiss };

std::string to_string(HandoffMode m);
std::string to_string(HandoffCause c);
HandoffMode handoff_mode_from_string(const std::string& s);

enum class PairPhase { Hopping, AwaitingCts, Transmitting, HandoffBroadcast, AwaitingCsa, Stopped };

std::string to_string(PairPhase p);

struct HandoffRecord {
  int pair = 0;
  std::uint64_t start_slot = 0;   // handoff began (collision onset for collision-triggered ones)
  std::uint64_t vacate_slot = 0;  // first slot off the old channel
  std::uint64_t resume_slot = 0;  // first data slot on the new channel
  int from_channel = 0;
  int target_channel = 0;
  HandoffCause cause = HandoffCause::Proactive;
  int misses = 0;  // target found busy at resume and handoff relaunched

  std::uint64_t delay_slots() const noexcept { return resume_slot - start_slot; }
};

/// Registers and phase of one transmitter/receiver pair.
struct SuPairState {
  bool dat = false;  // data transmission requested
  bool dsf = false;  // data sending (link up)
  bool csw = false;  // channel switching
  std::vector<int> lsc;
  PairPhase phase = PairPhase::Hopping;

  int frame_slot = 0;  // 1..c while a frame is on air, 0 between frames
  int frames_done = 0;
  std::optional<int> current_channel;
  int rts_channel = 0;

  bool frame_collided = false;
  bool su_overlap = false;  // another SU transmitted over this frame
  int overlap_slots = 0;
  std::uint64_t collision_onset = 0;

  int nuc() const noexcept { return static_cast<int>(lsc.size()); }
};

enum class ActionKind {
  SendRts,
  StartFrame,
  TransmitSlot,
  CollidedSlot,
  FrameComplete,
  PacketComplete,
  CollisionDetected,
  BeginHandoff,
  StopTransmission,
  SwitchChannel,
  PredictionMiss,
  ResumeHopping,
  Backoff,
};

struct ProtocolAction {
  ActionKind kind;
  int channel = 0;
  std::uint64_t slot = 0;
};

struct StepResult {
  SuPairState state;
  std::vector<ProtocolAction> actions;

  bool has(ActionKind k) const;
};

/// Protocol 1, decision half. Run in a slot where the pair holds a packet and
/// is hopping; `rendezvous` forecasts the channel the receiver will be on in
/// the next slot. Emits SendRts for slot + 1 when the candidate policy holds.
StepResult protocol1_step(const SuPairState& s, const ChannelForecast& rendezvous,
                          const PredictionThresholds& th, std::uint64_t slot);

/// Protocol 1, outcome half, in the RTS slot. A link starts frame slot 1 in
/// this same slot; a collision backs the packet off; anything else keeps
/// hopping.
StepResult on_rendezvous(const SuPairState& s, const RendezvousOutcome& outcome, std::uint64_t slot);

/// One data slot on the current channel. `sensed_collision` is true when a PU
/// (or, with `su_overlap`, another SU) shares the slot. The frame is abandoned
/// Ts overlap slots after the onset, or at the end of the frame when Ts is 0
/// or the frame ends first. A clean final slot completes the frame and, after
/// h frames, the packet.
StepResult reactive_step(const SuPairState& s, bool sensed_collision, int sensing_delay_ts,
                         const FrameSpec& frame, std::uint64_t slot, bool su_overlap = false);

/// Protocol 2 at the last slot of a clean frame. `current` forecasts the
/// current channel at the end of the next frame; `others` are the
/// forecasts used to build LSC.
StepResult protocol2_step(const SuPairState& s, const ChannelForecast& current,
                          std::span<const ChannelForecast> others, const PredictionThresholds& th,
                          std::uint64_t slot);

/// Rebuilds LSC for a pair waiting in a handoff. Stopped and HandoffBroadcast
/// swap according to whether the list is empty.
StepResult refresh_candidates(const SuPairState& s, std::span<const ChannelForecast> forecasts,
                              const PredictionThresholds& th, std::uint64_t slot);

/// CSR/CSA slot. With a target both nodes switch and the next frame starts
/// on it in the following slot; without one the pair stays stopped.
StepResult on_csa(const SuPairState& s, std::optional<int> target, std::uint64_t slot);

/// Scanning-radio check in the first slot on a new channel. A busy verdict
/// sends the pair back to the shared handoff hopping.
StepResult verify_target(const SuPairState& s, bool sensed_busy, std::uint64_t slot);

}  // namespace crh
