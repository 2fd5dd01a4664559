#include "crh/handoff_protocol.hpp"

#include <algorithm>

namespace crh {

std::string to_string(HandoffMode m) { return m == HandoffMode::Proactive ? "proactive" : "reactive"; }

std::string to_string(HandoffCause c) {
  switch (c) {
    case HandoffCause::Proactive: return "proactive";
    case HandoffCause::Reactive: return "reactive";
    case HandoffCause::PredictionMiss: return "prediction_miss";
  }
  return "unknown";
}

HandoffMode handoff_mode_from_string(const std::string& s) {
  if (s == "proactive") return HandoffMode::Proactive;
  if (s == "reactive") return HandoffMode::Reactive;
  throw InvalidParameter("unknown handoff mode '" + s + "' (expected proactive|reactive)");
}

std::string to_string(PairPhase p) {
  switch (p) {
    case PairPhase::Hopping: return "hopping";
    case PairPhase::AwaitingCts: return "awaiting_cts";
    case PairPhase::Transmitting: return "transmitting";
    case PairPhase::HandoffBroadcast: return "handoff_broadcast";
    case PairPhase::AwaitingCsa: return "awaiting_csa";
    case PairPhase::Stopped: return "stopped";
  }
  return "unknown";
}

bool StepResult::has(ActionKind k) const {
  return std::any_of(actions.begin(), actions.end(), [k](const ProtocolAction& a) { return a.kind == k; });
}

namespace {

std::vector<int> candidates_without(std::span<const ChannelForecast> f, const PredictionThresholds& th,
                                    std::optional<int> skip) {
  auto lsc = candidate_channels(f, th);
  if (skip) std::erase(lsc, *skip);
  return lsc;
}

void reset_frame(SuPairState& s) {
  s.frame_slot = 0;
  s.frame_collided = false;
  s.su_overlap = false;
  s.overlap_slots = 0;
}

}  // namespace

StepResult protocol1_step(const SuPairState& s, const ChannelForecast& rendezvous,
                          const PredictionThresholds& th, std::uint64_t slot) {
  StepResult r{s, {}};
  if (s.phase != PairPhase::Hopping) return r;
  if (!is_candidate(rendezvous, th)) return r;
  r.state.dat = true;
  r.state.phase = PairPhase::AwaitingCts;
  r.state.rts_channel = rendezvous.channel_id;
  r.actions.push_back({ActionKind::SendRts, rendezvous.channel_id, slot + 1});
  return r;
}

StepResult on_rendezvous(const SuPairState& s, const RendezvousOutcome& outcome, std::uint64_t slot) {
  StepResult r{s, {}};
  auto& st = r.state;
  st.rts_channel = 0;
  switch (outcome.result) {
    case RendezvousResult::LinkEstablished:
      st.dsf = true;
      st.phase = PairPhase::Transmitting;
      st.current_channel = outcome.channel;
      reset_frame(st);
      st.frames_done = 0;
      break;
    case RendezvousResult::Type1Collision:
      st.dat = false;
      st.phase = PairPhase::Hopping;
      r.actions.push_back({ActionKind::Backoff, outcome.channel, slot});
      break;
    case RendezvousResult::ChannelBusy:
    case RendezvousResult::NoAttempt:
      st.dat = false;
      st.phase = PairPhase::Hopping;
      break;
  }
  return r;
}

StepResult reactive_step(const SuPairState& s, bool sensed_collision, int sensing_delay_ts,
                         const FrameSpec& frame, std::uint64_t slot, bool su_overlap) {
  StepResult r{s, {}};
  auto& st = r.state;
  if (st.phase != PairPhase::Transmitting || !st.current_channel) return r;
  const int ch = *st.current_channel;

  ++st.frame_slot;
  if (st.frame_slot == 1) r.actions.push_back({ActionKind::StartFrame, ch, slot});

  if (sensed_collision && !st.frame_collided) {
    st.frame_collided = true;
    st.collision_onset = slot;
  }
  if (st.frame_collided) {
    // Every slot from the onset to the detection is wasted, whether or not
    // the PU is still there.
    ++st.overlap_slots;
    st.su_overlap = st.su_overlap || su_overlap;
    r.actions.push_back({ActionKind::CollidedSlot, ch, slot});
  } else {
    r.actions.push_back({ActionKind::TransmitSlot, ch, slot});
  }

  const bool frame_end = st.frame_slot >= frame.slots_per_frame;
  if (st.frame_collided) {
    const bool detected = (sensing_delay_ts > 0 && st.overlap_slots >= sensing_delay_ts) || frame_end;
    if (detected) {
      r.actions.push_back({ActionKind::CollisionDetected, ch, slot});
      st.dsf = false;
      st.csw = true;
      st.phase = PairPhase::HandoffBroadcast;
      st.current_channel.reset();
      st.lsc.clear();
      const bool su = st.su_overlap;
      reset_frame(st);
      st.su_overlap = su;  // kept for the engine's accounting until the next frame
    }
    return r;
  }

  if (frame_end) {
    reset_frame(st);
    ++st.frames_done;
    r.actions.push_back({ActionKind::FrameComplete, ch, slot});
    if (st.frames_done >= frame.frames_per_packet) {
      r.actions.push_back({ActionKind::PacketComplete, ch, slot});
      st.frames_done = 0;
      st.dat = false;
      st.dsf = false;
      st.phase = PairPhase::Hopping;
      st.current_channel.reset();
    }
  }
  return r;
}

StepResult protocol2_step(const SuPairState& s, const ChannelForecast& current,
                          std::span<const ChannelForecast> others, const PredictionThresholds& th,
                          std::uint64_t slot) {
  StepResult r{s, {}};
  auto& st = r.state;
  if (st.phase != PairPhase::Transmitting || !st.dat || !st.current_channel) return r;
  if (!should_handoff(current, th)) return r;

  const int from = *st.current_channel;
  st.csw = true;
  st.dsf = false;
  st.current_channel.reset();
  st.lsc = candidates_without(others, th, from);
  r.actions.push_back({ActionKind::BeginHandoff, from, slot + 1});
  if (st.lsc.empty()) {
    st.phase = PairPhase::Stopped;
    r.actions.push_back({ActionKind::StopTransmission, from, slot + 1});
  } else {
    st.phase = PairPhase::HandoffBroadcast;
  }
  return r;
}

StepResult refresh_candidates(const SuPairState& s, std::span<const ChannelForecast> forecasts,
                              const PredictionThresholds& th, std::uint64_t slot) {
  StepResult r{s, {}};
  auto& st = r.state;
  if (st.phase != PairPhase::Stopped && st.phase != PairPhase::HandoffBroadcast &&
      st.phase != PairPhase::AwaitingCsa)
    return r;
  st.lsc = candidate_channels(forecasts, th);
  if (st.lsc.empty()) {
    if (st.phase != PairPhase::Stopped) r.actions.push_back({ActionKind::StopTransmission, 0, slot});
    st.phase = PairPhase::Stopped;
  } else if (st.phase == PairPhase::Stopped) {
    st.phase = PairPhase::HandoffBroadcast;
  }
  return r;
}

StepResult on_csa(const SuPairState& s, std::optional<int> target, std::uint64_t slot) {
  StepResult r{s, {}};
  auto& st = r.state;
  if (!target) {
    st.phase = PairPhase::Stopped;
    return r;
  }
  st.phase = PairPhase::Transmitting;
  st.current_channel = *target;
  st.csw = false;
  st.dsf = true;
  st.lsc.clear();
  reset_frame(st);
  r.actions.push_back({ActionKind::SwitchChannel, *target, slot + 1});
  return r;
}

StepResult verify_target(const SuPairState& s, bool sensed_busy, std::uint64_t slot) {
  StepResult r{s, {}};
  auto& st = r.state;
  if (!sensed_busy || st.phase != PairPhase::Transmitting || !st.current_channel) return r;
  const int ch = *st.current_channel;
  r.actions.push_back({ActionKind::PredictionMiss, ch, slot});
  r.actions.push_back({ActionKind::ResumeHopping, ch, slot});
  st.phase = PairPhase::HandoffBroadcast;
  st.csw = true;
  st.dsf = false;
  st.current_channel.reset();
  return r;
}

}  // namespace crh
