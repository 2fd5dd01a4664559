#include "crh/coordination.hpp"

#include <vector>

#include "crh/core_model.hpp"
#include "crh/rng.hpp"

namespace crh {

std::string to_string(CoordinationKind k) {
  return k == CoordinationKind::SingleRendezvous ? "single" : "multiple";
}

CoordinationKind coordination_from_string(const std::string& s) {
  if (s == "single") return CoordinationKind::SingleRendezvous;
  if (s == "multiple") return CoordinationKind::MultipleRendezvous;
  throw InvalidParameter("unknown coordination scheme '" + s + "' (expected single|multiple)");
}

std::string to_string(RendezvousResult r) {
  switch (r) {
    case RendezvousResult::LinkEstablished: return "link_established";
    case RendezvousResult::Type1Collision: return "type1_collision";
    case RendezvousResult::ChannelBusy: return "channel_busy";
    case RendezvousResult::NoAttempt: return "no_attempt";
  }
  return "unknown";
}

int common_hop_channel(int num_channels, std::uint64_t slot) {
  if (num_channels < 1) throw InvalidParameter("number of channels must be >= 1");
  return static_cast<int>(slot % static_cast<std::uint64_t>(num_channels)) + 1;
}

int hop_channel(const HoppingScheme& scheme, std::uint64_t node_seed, std::uint64_t slot) {
  if (scheme.kind == CoordinationKind::SingleRendezvous)
    return common_hop_channel(scheme.num_channels, slot);
  if (scheme.num_channels < 1) throw InvalidParameter("number of channels must be >= 1");
  const std::uint64_t h = mix64(mix64(node_seed) ^ (slot * 0x9e3779b97f4a7c15ULL));
  return static_cast<int>(h % static_cast<std::uint64_t>(scheme.num_channels)) + 1;
}

int rejoin_hopping(const HoppingScheme& scheme, std::uint64_t node_seed, std::uint64_t slot,
                   bool performing_handoff) {
  if (performing_handoff) return common_hop_channel(scheme.num_channels, slot);
  return hop_channel(scheme, node_seed, slot);
}

std::map<int, RendezvousOutcome> attempt_rendezvous(const HoppingScheme& scheme,
                                                    std::span<const Contender> contenders,
                                                    std::uint64_t slot,
                                                    std::span<const bool> channel_busy) {
  std::map<int, RendezvousOutcome> outcomes;
  std::vector<std::vector<int>> per_channel(static_cast<std::size_t>(scheme.num_channels) + 1);
  for (const auto& c : contenders) {
    if (!c.receiver_available) {
      outcomes[c.transmitter] = {RendezvousResult::NoAttempt, 0};
      continue;
    }
    const int ch = hop_channel(scheme, c.receiver_seed, slot);
    per_channel[static_cast<std::size_t>(ch)].push_back(c.transmitter);
  }
  for (int ch = 1; ch <= scheme.num_channels; ++ch) {
    const auto& txs = per_channel[static_cast<std::size_t>(ch)];
    if (txs.empty()) continue;
    const bool busy = static_cast<std::size_t>(ch - 1) < channel_busy.size() &&
                      channel_busy[static_cast<std::size_t>(ch - 1)];
    RendezvousResult r = busy                ? RendezvousResult::ChannelBusy
                         : txs.size() == 1   ? RendezvousResult::LinkEstablished
                                             : RendezvousResult::Type1Collision;
    for (int tx : txs) outcomes[tx] = {r, ch};
  }
  return outcomes;
}

}  // namespace crh
