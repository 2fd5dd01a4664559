#include "crh/channel_selection.hpp"

#include <algorithm>

#include "crh/core_model.hpp"

namespace crh {

std::string to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::Proposed: return "proposed";
    case SelectionStrategy::Random: return "random";
    case SelectionStrategy::Greedy: return "greedy";
    case SelectionStrategy::Bargaining: return "bargaining";
  }
  return "unknown";
}

SelectionStrategy selection_from_string(const std::string& s) {
  if (s == "proposed") return SelectionStrategy::Proposed;
  if (s == "random") return SelectionStrategy::Random;
  if (s == "greedy") return SelectionStrategy::Greedy;
  if (s == "bargaining") return SelectionStrategy::Bargaining;
  throw InvalidParameter("unknown selection scheme '" + s +
                         "' (expected proposed|random|greedy|bargaining)");
}

std::vector<int> generate_selection_sequence(std::uint64_t seed, std::span<const int> participants) {
  std::vector<int> order(participants.begin(), participants.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  RandomStream rng(mix64(seed ^ 0x5e1ec7ULL));
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

int broadcast_rounds(int num_participants, int mini_slots) {
  if (mini_slots < 1) throw InvalidParameter("mini slots per slot (W) must be >= 1");
  if (num_participants <= 0) return 0;
  return (num_participants + mini_slots - 1) / mini_slots;
}

namespace {

// Highest idle probability; ties go to the lowest channel id.
std::optional<int> best_channel(const std::vector<CandidateEntry>& list) {
  const CandidateEntry* best = nullptr;
  for (const auto& e : list) {
    if (!best || e.prob_idle > best->prob_idle ||
        (e.prob_idle == best->prob_idle && e.channel < best->channel))
      best = &e;
  }
  if (!best) return std::nullopt;
  return best->channel;
}

// Walks the selecting sequence; stops after `me` when me is given.
Assignment walk_sequence(const SelectionContext& ctx, std::optional<int> me) {
  const auto sequence = generate_selection_sequence(ctx.sequence_seed, ctx.participants);
  std::map<int, std::vector<CandidateEntry>> lists;
  for (int su : sequence) {
    auto it = ctx.candidate_lists.find(su);
    lists[su] = it == ctx.candidate_lists.end() ? std::vector<CandidateEntry>{} : it->second;
  }
  Assignment out;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const int su = sequence[i];
    const auto chosen = best_channel(lists[su]);
    out[su] = chosen;
    if (me && su == *me) break;
    if (!chosen) continue;
    for (std::size_t m = i + 1; m < sequence.size(); ++m) {
      auto& later = lists[sequence[m]];
      std::erase_if(later, [&](const CandidateEntry& e) { return e.channel == *chosen; });
    }
  }
  return out;
}

}  // namespace

std::optional<int> compute_target_channel(const SelectionContext& ctx, int me) {
  if (std::find(ctx.participants.begin(), ctx.participants.end(), me) == ctx.participants.end())
    throw InvalidParameter("compute_target_channel: SU is not a participant");
  const auto assignment = walk_sequence(ctx, me);
  auto it = assignment.find(me);
  return it == assignment.end() ? std::nullopt : it->second;
}

Assignment compute_assignment(const SelectionContext& ctx) { return walk_sequence(ctx, std::nullopt); }

BaselineChoice baseline_select(SelectionStrategy strategy, const SelectionContext& ctx, int me,
                               RandomStream& rng, std::span<const int> greedy_ranking) {
  const auto it = ctx.candidate_lists.find(me);
  static const std::vector<CandidateEntry> empty;
  const auto& mine = it == ctx.candidate_lists.end() ? empty : it->second;
  BaselineChoice choice;
  switch (strategy) {
    case SelectionStrategy::Random:
      if (!mine.empty()) choice.channel = mine[static_cast<std::size_t>(rng.below(mine.size()))].channel;
      break;
    case SelectionStrategy::Greedy:
      // Same fixed order for every SU, restricted to what this SU may use.
      for (int ch : greedy_ranking) {
        if (std::any_of(mine.begin(), mine.end(), [&](const CandidateEntry& e) { return e.channel == ch; })) {
          choice.channel = ch;
          break;
        }
      }
      break;
    case SelectionStrategy::Bargaining: {
      // Four-way handshake per member: 2 N_LB messages, W per slot. The group
      // header (first in the sequence) hands out channels in sequence order.
      const int n = static_cast<int>(ctx.participants.size());
      choice.cost_slots = broadcast_rounds(2 * n, ctx.mini_slots);
      choice.channel = compute_target_channel(ctx, me);
      break;
    }
    case SelectionStrategy::Proposed:
      choice.cost_slots = broadcast_rounds(static_cast<int>(ctx.participants.size()), ctx.mini_slots);
      choice.channel = compute_target_channel(ctx, me);
      break;
  }
  return choice;
}

}  // namespace crh
