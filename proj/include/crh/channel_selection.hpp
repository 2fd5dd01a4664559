#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crh/rng.hpp"

namespace crh {

enum class SelectionStrategy { Proposed, Random, Greedy, Bargaining };

std::string to_string(SelectionStrategy s);
SelectionStrategy selection_from_string(const std::string& s);

struct CandidateEntry {
  int channel = 0;
  double prob_idle = 0.0;
};

/// Everything a handoff participant knows once the broadcast step is over.
/// Every participant holds an identical copy.
struct SelectionContext {
  std::vector<int> participants;
  std::map<int, std::vector<CandidateEntry>> candidate_lists;
  std::uint64_t sequence_seed = 0;
  int mini_slots = 4;  // W
};

/// Channel id or no channel.
using Assignment = std::map<int, std::optional<int>>;

/// Step 1: a permutation of the participants that depends only on the seed and
/// the participant set, never on the order the set is given in.
std::vector<int> generate_selection_sequence(std::uint64_t seed, std::span<const int> participants);

/// Step 2: whole slots needed for every participant to broadcast once.
int broadcast_rounds(int num_participants, int mini_slots);

/// Step 3: the target channel `me` computes locally, or nullopt when its list
/// runs empty.
std::optional<int> compute_target_channel(const SelectionContext& ctx, int me);

/// The assignment implied by the context for every participant.
Assignment compute_assignment(const SelectionContext& ctx);

struct BaselineChoice {
  std::optional<int> channel;
  int cost_slots = 0;  // extra slots spent on coordination messages
};

/// Random / Greedy / Bargaining baselines. `greedy_ranking` is the fixed
/// scenario-wide channel order used by Greedy; `rng` feeds Random only.
BaselineChoice baseline_select(SelectionStrategy strategy, const SelectionContext& ctx, int me,
                               RandomStream& rng, std::span<const int> greedy_ranking);

}  // namespace crh
