#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

namespace crh {

enum class CoordinationKind { SingleRendezvous, MultipleRendezvous };

std::string to_string(CoordinationKind k);
CoordinationKind coordination_from_string(const std::string& s);

struct HoppingScheme {
  CoordinationKind kind = CoordinationKind::SingleRendezvous;
  int num_channels = 10;  // M
};

/// Common Hopping cycle: (slot mod M) + 1, shared by every node. Also the
/// sequence followed by all pairs performing a spectrum handoff.
int common_hop_channel(int num_channels, std::uint64_t slot);

/// Channel in [1, M] the node dwells on at `slot`. Under MultipleRendezvous the
/// sequence is a public function of (node_seed, slot), so any node can compute
/// any other node's position.
int hop_channel(const HoppingScheme& scheme, std::uint64_t node_seed, std::uint64_t slot);

/// Channel a pair returns to when it leaves a channel. During a spectrum
/// handoff everyone follows the common cycle regardless of scheme.
int rejoin_hopping(const HoppingScheme& scheme, std::uint64_t node_seed, std::uint64_t slot,
                   bool performing_handoff);

enum class RendezvousResult { LinkEstablished, Type1Collision, ChannelBusy, NoAttempt };

std::string to_string(RendezvousResult r);

struct RendezvousOutcome {
  RendezvousResult result = RendezvousResult::NoAttempt;
  int channel = 0;  // channel the RTS was sent on (0 for NoAttempt)
  friend bool operator==(const RendezvousOutcome&, const RendezvousOutcome&) = default;
};

struct Contender {
  int transmitter = 0;
  int receiver = 0;
  std::uint64_t receiver_seed = 0;
  /// False when the receiver is engaged elsewhere; the attempt is deferred.
  bool receiver_available = true;
};

/// Resolves one slot of RTS/CTS attempts. Each transmitter targets its
/// receiver's hop channel. `channel_busy[ch - 1]` marks channels that cannot
/// carry the exchange this slot (PU present or already claimed).
std::map<int, RendezvousOutcome> attempt_rendezvous(const HoppingScheme& scheme,
                                                    std::span<const Contender> contenders,
                                                    std::uint64_t slot,
                                                    std::span<const bool> channel_busy);

}  // namespace crh
