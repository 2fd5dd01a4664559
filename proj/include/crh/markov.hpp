#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace crh::markov {

/// Inputs of the three-dimensional reactive-handoff chain.
struct ChainParams {
  double p = 0.0;  // PU arrival probability per slot
  double s = 0.1;  // SU arrival probability per slot
  int h = 1;       // frames per packet
  int c = 10;      // slots per frame
  double q = 0.0;  // SU-SU collision probability
  double u = 1.0;  // probability that at least one channel is idle
  int ts = 0;      // sensing delay in slots; 0 means c (detection at frame end)
  int num_channels = 10;  // M, used when u is derived from the PU occupancy chain
  double v = 0.1;         // PU completion probability per slot

  int sensing_delay() const noexcept { return ts == 0 ? c : ts; }
  void validate() const;
};

/// (N_t, N_c, N_f): transmitted slots, collided slots, frame index.
struct ChainState {
  int i = 0;
  int j = 0;
  int k = 0;
  auto operator<=>(const ChainState&) const = default;
};

enum class StateKind { Idle, Transmitting, Collided, Backlogged };

StateKind classify(const ChainState& st) noexcept;

struct SteadyState {
  std::map<ChainState, double> probs;
  bool degenerate = false;
  std::string note;

  double at(int i, int j, int k) const;
  double total() const;
  std::size_t size() const noexcept { return probs.size(); }
};

/// The number of busy channels forms an (M+1)-state chain; g is its
/// stationary law and u = sum_{i < M} g_i.
struct PuOccupancy {
  std::vector<double> g;
  double u = 1.0;
  bool degenerate = false;
};

/// Transition matrix of the busy-channel count.
std::vector<std::vector<double>> pu_occupancy_matrix(int num_channels, double p, double v);

PuOccupancy pu_occupancy_u(int num_channels, double p, double v);

/// Case One closed forms (p = 0, u = 1).
SteadyState steady_state_no_pu(const ChainParams& params);

/// Case Two closed forms on the full chain (collision detected at frame end).
SteadyState steady_state_with_pu(const ChainParams& params);

/// Case Two closed forms on the chain truncated to at most Ts collided slots.
SteadyState steady_state_with_sensing_delay(const ChainParams& params);

/// Theta: stationary mass of the Transmitting states.
double normalized_throughput(const SteadyState& ss);

/// [Ts (c - Ts + 1) + Ts (Ts - 1) / 2] h.
std::size_t collided_state_count(int c, int h, int ts);

/// All states of the (possibly truncated) chain in a fixed order.
std::vector<ChainState> enumerate_states(const ChainParams& params);

struct TransitionMatrix {
  std::vector<ChainState> states;
  std::map<ChainState, std::size_t> index;
  /// rows[r] = list of (column, probability).
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;

  double row_sum(std::size_t r) const;
};

/// Explicit one-step matrix built from the transition list.
TransitionMatrix build_transition_matrix(const ChainParams& params);

struct PowerIterationInfo {
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Stationary law by (damped) power iteration on the explicit matrix.
/// Throws for non-ergodic corners (s = 0, or no exit from the backlog).
SteadyState brute_force_steady_state(const ChainParams& params, double tolerance = 1e-12,
                                     PowerIterationInfo* info = nullptr);

/// max_j |(pi T)_j - pi_j| for an arbitrary distribution over the matrix states.
double stationarity_residual(const TransitionMatrix& t, const SteadyState& ss);

}  // namespace crh::markov
